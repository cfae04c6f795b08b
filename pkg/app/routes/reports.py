"""Archived report routes."""

from flask import Blueprint, jsonify, request

from app.domain.exceptions import ReportNotFound
from app.repository import reports_repo

reports_bp = Blueprint("reports", __name__, url_prefix="/api/reports")


@reports_bp.route("", methods=["GET"])
def list_reports():
    return jsonify(reports_repo.list_reports(request.args.get("scenario"))), 200


@reports_bp.route("/<run_id>", methods=["GET"])
def get_report(run_id):
    try:
        return jsonify(reports_repo.get_report(run_id)), 200
    except ReportNotFound as e:
        return jsonify({"error": str(e)}), 404
