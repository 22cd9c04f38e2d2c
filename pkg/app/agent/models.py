"""Vehicle registry of the ridesharing agent"""
import datetime
import enum

from app import db
from . import logger
from .exceptions import UnknownVehicleError, InvalidRecordError


class VehicleCondition(str, enum.Enum):
    PROPER = 'proper'
    IMPROPER = 'improper'


class Vehicle(db.Model):
    """
    Vehicle which is allowed to drive for the service. Only vehicles with a valid title can be registered, so every
    stored row has `title_valid` set. Insurance and condition are kept as they were reported.
    """
    __tablename__ = 'vehicles'

    vehicle_id = db.Column(db.String(64), primary_key=True)
    title_valid = db.Column(db.Boolean, nullable=False)
    insurance_valid = db.Column(db.Boolean, nullable=False, default=False)
    condition = db.Column(db.String(16), nullable=False, default=VehicleCondition.PROPER.value)
    driver_id = db.Column(db.String(64), index=True)
    registered_at = db.Column(db.DateTime, default=datetime.datetime.utcnow)

    def __repr__(self) -> str:
        return f'Vehicle - {self.vehicle_id}'

    @property
    def is_roadworthy(self) -> bool:
        """Valid title, proper condition and valid insurance"""
        return bool(self.title_valid and self.insurance_valid and self.condition == VehicleCondition.PROPER.value)

    def to_dict(self) -> dict:
        return {
            'vehicle_id': self.vehicle_id,
            'title_valid': self.title_valid,
            'insurance_valid': self.insurance_valid,
            'condition': self.condition,
            'driver_id': self.driver_id,
        }

    @classmethod
    def register_vehicle(cls, vehicle_id: str, title_valid: bool, insurance_valid: bool = False,
                         condition: str = VehicleCondition.PROPER.value, driver_id: str = None) -> 'Vehicle':
        """
        Inserts a new vehicle or replaces the record of an existing one.
        db.session must be committed after executing the method to save changes.
        :param vehicle_id: registration id of the vehicle
        :param title_valid: must be true, a vehicle without a valid title cannot be registered
        :param insurance_valid: whether the insurance is valid
        :param condition: `proper` or `improper`
        :param driver_id: driver who uses the vehicle
        :return: registered vehicle
        :rtype: Vehicle
        """
        if not vehicle_id:
            raise InvalidRecordError('Vehicle id cannot be empty')
        if not title_valid:
            logger.info(f'Vehicle {vehicle_id} without a valid title was not registered')
            raise InvalidRecordError(f'Vehicle {vehicle_id} must have a valid title to be registered')
        try:
            condition = VehicleCondition(condition).value
        except ValueError as error:
            raise InvalidRecordError(f'Condition {condition!r} must be one of proper or improper') from error

        vehicle = db.session.get(cls, vehicle_id)
        if vehicle is None:
            vehicle = cls(vehicle_id=vehicle_id)
            db.session.add(vehicle)
            logger.info(f'Vehicle {vehicle_id} is being registered')
        vehicle.title_valid = True
        vehicle.insurance_valid = bool(insurance_valid)
        vehicle.condition = condition
        vehicle.driver_id = driver_id
        return vehicle

    @classmethod
    def get_vehicle_by_id(cls, vehicle_id: str) -> 'Vehicle':
        """Return vehicle with given id if it is registered, else - raise error"""
        vehicle = db.session.get(cls, vehicle_id)
        if not vehicle:
            logger.info('Vehicle was not found by index')
            raise UnknownVehicleError(f'Vehicle {vehicle_id} is not registered')
        return vehicle
