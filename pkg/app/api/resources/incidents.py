"""Incidents api resource: envelope ingest, listings and payload fetch"""
from typing import Tuple

from flask import Response
from flask import request
from flask_restful import Resource
from flask_restful import abort
from flask_restful import fields, marshal_with
from flask_restful import reqparse

from app import incident_ledger
from app.agent.exceptions import UnknownKeyIdError, DuplicateEnvelopeError
from app.api import logger
from app.api.utils import return_incident_or_abort, return_vehicle_or_abort, session_id_hex
from app.vault.exceptions import MalformedEnvelopeError, KeyMismatchError, IntegrityFailureError

incident_fields = {
    'incident_id': fields.Integer,
    'session_id': fields.String,
    'vehicle_id': fields.String,
    'received_at_ms': fields.Integer,
    'timestamp_ms': fields.Integer,
    'class': fields.String,
    'confidence': fields.Float,
}
incidents_list_fields = {
    'session_id': fields.String,
    'data': fields.List(fields.Nested(incident_fields)),
}
incident_single_fields = {
    'data': fields.Nested(incident_fields),
}


class IncidentsList(Resource):
    @marshal_with(incidents_list_fields)
    def get(self) -> Tuple[dict, int]:
        """Returns metadata of the incidents of one session in arrival order. Payloads are never listed"""
        parser = reqparse.RequestParser()
        parser.add_argument('session', type=session_id_hex, location='args', required=True,
                            help='Session id, 32 hex digits')
        session_id = parser.parse_args()['session']
        incidents = [incident.to_dict() for incident in incident_ledger.query_incidents(session_id)]
        return {'session_id': session_id.hex(), 'data': incidents}, 200

    def post(self) -> Tuple[dict, int]:
        """Ingests one envelope sent as the raw request body. `X-Vehicle-Id` binds its session to a vehicle"""
        envelope = request.get_data()
        vehicle_id = request.headers.get('X-Vehicle-Id')
        if vehicle_id:
            return_vehicle_or_abort(vehicle_id)
        try:
            incident_id = incident_ledger.ingest(envelope, vehicle_id=vehicle_id)
        except MalformedEnvelopeError as error:
            abort(400, message=f'{type(error).__name__}: {error}')
        except DuplicateEnvelopeError as error:
            abort(409, message=f'DuplicateEnvelopeError: {error}')
        except UnknownKeyIdError as error:
            abort(422, message=f'UnknownKeyIdError: no key with id {error.args[0]}')
        except (KeyMismatchError, IntegrityFailureError) as error:
            logger.error(f'Envelope failed verification: {error}')
            abort(422, message=f'{type(error).__name__}: {error}')
        return {'incident_id': incident_id, 'message': 'Incident was successfully ingested'}, 201


class IncidentSingle(Resource):
    @marshal_with(incident_single_fields)
    def get(self, incident_id: int) -> Tuple[dict, int]:
        """Returns metadata of a certain incident"""
        return {'data': return_incident_or_abort(incident_id).to_dict()}, 200


class IncidentPayload(Resource):
    def get(self, incident_id: int) -> Response:
        """Returns the decrypted payload of a certain incident as raw bytes"""
        incident = return_incident_or_abort(incident_id)
        if incident.payload is None:
            abort(422, message=f'UnknownKeyIdError: payload of incident {incident_id} cannot be decrypted')
        return Response(incident.payload, status=200, mimetype='application/octet-stream')
