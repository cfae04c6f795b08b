"""Route-layer helpers.

Shared request parsing and error responses used by multiple blueprints.
"""

from flask import jsonify, request

from app.domain.exceptions import LabError

INTERNAL_SERVER_ERROR = "Internal server error"


def error_response(message: str, status: int, **extra):
    return jsonify({"error": message, **extra}), status


def lab_error_response(exc: LabError):
    """Validation and configuration problems are the client's to fix: 422."""
    return error_response(str(exc), 422, type=type(exc).__name__)


def parse_json_object():
    """
    Helper to read a JSON object body.
    Returns (data, error_tuple).
    If error_tuple is not None, it is a ready (response, status_code) pair.
    """
    data = request.get_json(silent=True)
    if data is None:
        return None, error_response("Request body must be JSON", 400)
    if not isinstance(data, dict):
        return None, error_response("Request body must be a JSON object", 400)
    return data, None


def parse_int(data: dict, key: str, default: int, minimum: int = 0):
    """Returns (value, error_tuple) for an optional integer field >= minimum."""
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        return None, error_response(f"Invalid {key}", 400)
    return value, None
