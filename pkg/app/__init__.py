# app/__init__.py
import logging
import os
from flask import Flask
from dotenv import load_dotenv

load_dotenv()

__version__ = "1.0.0"

from .config import Config
from .database import init_db, init_schema

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """Single stream handler on the `app` logger; repeated calls only change the level."""
    logger = logging.getLogger("app")
    if not any(getattr(h, "_carnot_lab", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._carnot_lab = True
        logger.addHandler(handler)
    logger.setLevel(str(level).upper())


def create_app(test_config: dict = None) -> Flask:
    """
    Flask application factory.
    """
    app = Flask(__name__, instance_relative_config=True)

    app.config.from_object(Config)

    # Ensure instance folder exists (for SQLite file, etc.)
    try:
        os.makedirs(app.instance_path, exist_ok=True)
    except OSError:
        pass

    # For tests: allow overriding any config key, including DATABASE
    if test_config is not None:
        app.config.update(test_config)

    configure_logging(app.config["LOG_LEVEL"])
    init_db(app)

    with app.app_context():
        init_schema()

    # --- Blueprint registration ---
    from .routes.health import health_bp
    from .routes.groups import groups_bp
    from .routes.scenarios import scenarios_bp
    from .routes.reports import reports_bp

    app.register_blueprint(health_bp)
    app.register_blueprint(groups_bp)
    app.register_blueprint(scenarios_bp)
    app.register_blueprint(reports_bp)

    from .cli import cli
    app.cli.add_command(cli, name="lab")

    return app
