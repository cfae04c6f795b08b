"""Scenario verification routes.

POST a scenario (a path under the scenario directory, or the TOML text itself),
run every check and optionally archive the report.
"""

from pathlib import Path

from flask import Blueprint, current_app, jsonify

from app.domain.exceptions import LabError
from app.repository.reports_repo import archive_report
from app.repository.scenarios_repo import load_scenario, parse_scenario
from app.routes.helpers import error_response, lab_error_response, parse_json_object
from app.services.scenario_service import run_scenario

scenarios_bp = Blueprint("scenarios", __name__, url_prefix="/api/scenarios")


@scenarios_bp.route("/verify", methods=["POST"])
def verify_scenario():
    data, error = parse_json_object()
    if error:
        return error
    if "path" not in data and "scenario" not in data:
        return error_response("Missing path or scenario", 400)
    if not isinstance(data.get("archive", False), bool):
        return error_response("Invalid archive flag", 400)

    scenario_dir = Path(current_app.config["CARNOT_LAB_SCENARIO_DIR"])
    try:
        if "scenario" in data:
            if not isinstance(data["scenario"], str):
                return error_response("scenario must be TOML text", 400)
            scenario = parse_scenario(data["scenario"], base_dir=scenario_dir,
                                      default_name=str(data.get("name", "scenario")))
        else:
            path = Path(str(data["path"]))
            scenario = load_scenario(path if path.is_absolute() else scenario_dir / path)
        report = run_scenario(scenario)
    except LabError as e:
        return lab_error_response(e)

    payload = {"passed": report.all_passed, "report": report.to_dict()}
    if data.get("archive", False):
        payload["id"] = archive_report(report, scenario.name)
        return jsonify(payload), 201
    return jsonify(payload), 200
