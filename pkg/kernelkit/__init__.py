"""
Flask application factory.

Creates the HTTP front end of the kernel toolkit; the same commands are
available from the command line via `python -m kernelkit`.
"""
from typing import Optional

from flask import Flask, jsonify
from werkzeug.exceptions import HTTPException

from kernelkit.config import configure_logging, settings
from kernelkit.exceptions import InstanceTooLarge, KernelKitError

__version__ = '1.0.0'


def create_app(config_override: Optional[dict] = None) -> Flask:
    """
    Create and configure the Flask application.

    Args:
        config_override: Optional dictionary to override Flask config

    Returns:
        Configured Flask application instance

    Usage:
        app = create_app()
        app.run()
    """
    app = Flask(__name__)
    app.config['DEBUG'] = settings.debug
    app.json.sort_keys = False

    if config_override:
        app.config.update(config_override)

    configure_logging()

    from kernelkit.api import health_bp, toolkit_bp
    app.register_blueprint(health_bp)
    app.register_blueprint(toolkit_bp)

    register_error_handlers(app)

    @app.route('/')
    def index():
        """Root endpoint with API information."""
        return jsonify({
            'name': 'Kernel Toolkit API',
            'version': __version__,
            'description': 'Kernels in orientations of line multigraphs via stable matchings',
            'endpoints': {
                'health': '/health',
                'ping': '/ping',
                'commands': '/api/v1/toolkit',
                'run': '/api/v1/toolkit/<command>',
            },
        })

    return app


def register_error_handlers(app: Flask) -> None:
    """
    Register global error handlers.

    Args:
        app: Flask application instance
    """

    @app.errorhandler(InstanceTooLarge)
    def handle_too_large(e):
        return jsonify(e.to_dict()), 413

    @app.errorhandler(KernelKitError)
    def handle_toolkit_error(e):
        return jsonify(e.to_dict()), 400

    @app.errorhandler(HTTPException)
    def handle_http_exception(e):
        """Handle HTTP exceptions."""
        return jsonify({
            'error': e.name,
            'message': e.description,
            'status_code': e.code
        }), e.code

    @app.errorhandler(Exception)
    def handle_exception(e):
        """Handle unexpected exceptions."""
        app.logger.error(f"Unhandled exception: {str(e)}", exc_info=True)

        if settings.is_production:
            return jsonify({
                'error': 'Internal server error',
                'message': 'An unexpected error occurred'
            }), 500
        return jsonify({
            'error': 'Internal server error',
            'message': str(e),
            'type': type(e).__name__
        }), 500
