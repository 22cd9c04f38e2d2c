"""Essential and repetitive utils for rest api views"""
from typing import Any

from flask_restful import abort

from app import incident_ledger
from app.agent.exceptions import UnknownVehicleError, IncidentNotFoundError
from app.agent.ledger import StoredIncident
from app.agent.models import Vehicle
from . import logger

SESSION_ID_HEX_LENGTH = 32


def session_id_hex(value: Any) -> bytes:
    """Custom input validator for flask_restful.reqparse.RequestParser. A session id travels as 32 hex digits
    (16 bytes); anything else is refused with ValueError, which the parser turns into a 400 response.
    :param value: a value from the request parser
    :type value: Any
    :returns: session id bytes
    :rtype: bytes"""
    value = str(value).strip()
    if len(value) != SESSION_ID_HEX_LENGTH:
        logger.info('Session id of a wrong length')
        raise ValueError(f'Session id must be {SESSION_ID_HEX_LENGTH} hex digits')
    try:
        return bytes.fromhex(value)
    except ValueError:
        raise ValueError('Session id must consist of hex digits only')


def return_vehicle_or_abort(vehicle_id: str) -> Vehicle:
    """Returns vehicle model instance if it is registered, else - makes abort"""
    try:
        return Vehicle.get_vehicle_by_id(vehicle_id)
    except UnknownVehicleError:
        logger.info('Abort because vehicle was not found')
        abort(404, message=f'Vehicle {vehicle_id} is not registered')


def return_incident_or_abort(incident_id: int) -> StoredIncident:
    """Returns stored incident by id if it exists, if not - raises abort"""
    try:
        return incident_ledger.get_incident(incident_id)
    except IncidentNotFoundError:
        logger.info('Abort because incident was not found')
        abort(404, message=f'Incident {incident_id} does not exist')
