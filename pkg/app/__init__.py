"""Initial module according to the flask factory pattern"""
import logging
import os

from flask import Flask
from flask_migrate import Migrate
from flask_sqlalchemy import SQLAlchemy

from .config import Config

db = SQLAlchemy()
migrate = Migrate()

# Official documentation recommends to configure logging before creating the main app instance
Config.configure_logging()
logger = logging.getLogger(__name__)

from app.agent.ledger import IncidentLedger

incident_ledger = IncidentLedger()


def make_app(test_config: object = None) -> Flask:
    """
    An application factory like in the official documentation.
    Creates and configures the ridesharing agent service registering all the blueprints and additions:
    the rest api which ingests incident envelopes and hosts the vehicle registry, and the cli groups
    `flask sim` and `flask vault` which drive the on-device pipeline simulator.

    :Example:
        $ export FLASK_APP=app
        $ flask sim run --scenario scenario.json --strategy onload --out reports

    :param test_config: can be used to specify special settings for conducting tests.
                        If nothing is put, the function will load a production config if it exists.
    :type test_config: dict; some dict inheritance.
    :returns: a new configured flask application instance.
    :rtype: Flask
    """
    app = Flask(__name__, instance_relative_config=True)
    app.config.from_object(Config)
    if test_config:
        app.config.from_object(test_config)
    else:
        app.config.from_pyfile('production_config.py', silent=True)
    os.makedirs(app.instance_path, exist_ok=True)

    if not app.config['LOGGING']:
        Config.disable_configured_loggers()

    db.init_app(app)
    migrate.init_app(app, db)
    incident_ledger.init_app(app)

    from app.views import view
    app.register_blueprint(view)

    from app.commands import cli_commands
    app.register_blueprint(cli_commands)

    from app.api import api_bp
    app.register_blueprint(api_bp)

    from app.vault.commands import vault_commands
    app.register_blueprint(vault_commands)

    from app.simcore.commands import sim_commands
    app.register_blueprint(sim_commands)

    return app
