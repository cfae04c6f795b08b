"""Group check routes.

Validates a group given as JSON (same keys as a group TOML file) and runs the
group-axiom properties on it.
"""

import logging

from flask import Blueprint, jsonify

from app.domain.exceptions import LabError
from app.repository.groups_repo import group_source_from_table
from app.routes.helpers import (
    INTERNAL_SERVER_ERROR,
    error_response,
    lab_error_response,
    parse_json_object,
    parse_int,
)
from app.services import group_service

logger = logging.getLogger(__name__)

groups_bp = Blueprint("groups", __name__, url_prefix="/api/groups")


@groups_bp.route("/check", methods=["POST"])
def check_group():
    data, error = parse_json_object()
    if error:
        return error
    if not isinstance(data.get("group"), dict):
        return error_response("Missing group", 400)

    samples, error = parse_int(data, "samples", group_service.AXIOM_SAMPLES, minimum=1)
    if error:
        return error
    seed, error = parse_int(data, "seed", 0)
    if error:
        return error

    try:
        spec = group_service.load_group(group_source_from_table(data["group"]), seed=seed)
        report = group_service.check_group(spec, samples=samples, seed=seed)
    except LabError as e:
        return lab_error_response(e)
    except (KeyError, TypeError, ValueError) as e:
        return error_response("Invalid group", 400, detail=str(e))
    except Exception:  # pylint: disable=broad-except
        logger.exception("group check failed")
        return error_response(INTERNAL_SERVER_ERROR, 500)

    return jsonify({"passed": report.all_passed, "report": report.to_dict()}), 200
