"""This module supplies with view blueprint. It allows to make up general routs instead of
typical :func:`app.route` in order to work with application factory properly"""
from typing import Tuple

from flask import Blueprint
from flask import jsonify
from werkzeug.exceptions import NotFound

from app import incident_ledger
from . import logger

view = Blueprint('view', __name__)


@view.route('/')
def index():
    """
    Handles start page. The agent has no ui, so it just reports its state.
    """
    return jsonify({'service': 'ride-monitor agent', 'incidents': incident_ledger.count,
                    'key_ids': sorted(incident_ledger.key_ids)})


@view.app_errorhandler(NotFound)
def page_not_found(error: NotFound) -> Tuple[dict, int]:
    """
    Handles 404 error.
    """
    logger.info('404 error was raised')
    return jsonify({'message': error.description}), error.code
