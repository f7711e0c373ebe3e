"""
Health check endpoints.
"""
from flask import Blueprint, jsonify

from kernelkit import __version__
from kernelkit.config import settings

health_bp = Blueprint('health', __name__)


@health_bp.route('/health', methods=['GET'])
def health_check():
    """
    Health check endpoint.

    Reports the version and whether the shipped gadget table is readable.

    Example:
        GET /health

        Response:
        {
            "status": "healthy",
            "gadget_table": "found",
            "version": "1.0.0"
        }
    """
    status = {
        'status': 'healthy',
        'version': __version__,
        'gadget_table': 'found' if settings.default_gadget_table.exists() else 'missing',
    }
    if status['gadget_table'] == 'missing':
        status['status'] = 'degraded'
    return jsonify(status), 200 if status['status'] == 'healthy' else 503


@health_bp.route('/ping', methods=['GET'])
def ping():
    """Simple ping endpoint."""
    return jsonify({'message': 'pong'}), 200
