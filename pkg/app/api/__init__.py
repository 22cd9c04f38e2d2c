"""Init flask-restful and a separate blueprint for the agent api"""
import logging

from flask import Blueprint
from flask_restful import Api

api_bp = Blueprint('agent', __name__, url_prefix='/api')
api = Api(api_bp)
logger = logging.getLogger(__name__)
logger.info('Agent api blueprint is being loaded')


from .resources.incidents import IncidentsList, IncidentSingle, IncidentPayload
from .resources.vehicles import VehicleSingle

api.add_resource(IncidentsList, '/incidents', strict_slashes=False)
api.add_resource(IncidentSingle, '/incidents/<int:incident_id>', strict_slashes=False)
api.add_resource(IncidentPayload, '/incidents/<int:incident_id>/payload', strict_slashes=False)

api.add_resource(VehicleSingle, '/vehicles/<string:vehicle_id>', strict_slashes=False)
