"""Vehicles api resource and its fields"""
from typing import Tuple

from flask_restful import Resource
from flask_restful import abort
from flask_restful import fields, marshal_with
from flask_restful import inputs
from flask_restful import reqparse

from app import db
from app.agent.exceptions import InvalidRecordError
from app.agent.models import Vehicle
from app.api.utils import return_vehicle_or_abort

vehicle_fields = {
    'vehicle_id': fields.String,
    'title_valid': fields.Boolean,
    'insurance_valid': fields.Boolean,
    'condition': fields.String,
    'driver_id': fields.String,
    'roadworthy': fields.Boolean(attribute='is_roadworthy'),
}
vehicle_single_fields = {
    'message': fields.String,
    'data': fields.Nested(vehicle_fields),
}


class VehicleSingle(Resource):
    @marshal_with(vehicle_single_fields)
    def get(self, vehicle_id: str) -> Tuple[dict, int]:
        """Returns the registered vehicle with specified id"""
        return {'data': return_vehicle_or_abort(vehicle_id)}, 200

    @marshal_with(vehicle_single_fields)
    def put(self, vehicle_id: str) -> Tuple[dict, int]:
        """Registers a vehicle or replaces its record"""
        parser = reqparse.RequestParser()
        parser.add_argument('title_valid', type=inputs.boolean, location='json', required=True,
                            help='Only vehicles with a valid title can be registered')
        parser.add_argument('insurance_valid', type=inputs.boolean, location='json', default=False)
        parser.add_argument('condition', type=str, location='json', default='proper', choices=('proper', 'improper'))
        parser.add_argument('driver_id', type=str, location='json')
        args = parser.parse_args()

        created = db.session.get(Vehicle, vehicle_id) is None
        try:
            vehicle = Vehicle.register_vehicle(vehicle_id, **args)
        except InvalidRecordError as error:
            db.session.rollback()
            abort(422, message=f'InvalidRecordError: {error.message}')
        db.session.commit()
        message = 'Vehicle was successfully registered' if created else 'Vehicle record was successfully updated'
        return {'message': message, 'data': vehicle}, 201 if created else 200
