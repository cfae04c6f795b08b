"""Verification reports: JSON files, text summaries, plot series and the SQLite archive."""

import csv
import json
import logging
from pathlib import Path
from typing import List, Optional, Union
from uuid import uuid4

from ..database import get_db
from app.domain.exceptions import ConfigError, ReportNotFound
from app.domain.models.VerificationReport import VerificationReport

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def write_report(report: VerificationReport, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
    logger.info("wrote report %s", path)
    return path


def read_report(path: PathLike) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"report {path} does not exist")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"report {path} is not valid JSON: {exc}") from exc


def summary_table(report: Union[VerificationReport, dict]) -> str:
    """Aligned text table: one line per record, then the verdict."""
    data = report.to_dict() if isinstance(report, VerificationReport) else report
    rows = [("check", "status", "measured", "tolerance")]
    for record in data["records"]:
        rows.append((
            record["name"],
            record["status"],
            _number(record["measured"]),
            _number(record["tolerance"]),
        ))
    widths = [max(len(row[k]) for row in rows) for k in range(4)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    lines.append("")
    lines.append(f"verdict: {data.get('verdict') or '-'}")
    lines.append(f"payload: {data.get('payload_hash', '-')}")
    return "\n".join(lines) + "\n"


def write_plotdata(report: dict, directory: PathLike) -> List[Path]:
    """
    CSV series for external plotting: checks.csv with one row per record, plus
    one CSV per record whose details carry a series (lists of equal length).
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    summary = directory / "checks.csv"
    with summary.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["name", "status", "measured", "tolerance", "runtime"])
        for record in report["records"]:
            writer.writerow([record["name"], record["status"], record["measured"],
                             record["tolerance"], record.get("runtime", "")])
    written.append(summary)

    for record in report["records"]:
        series = record.get("details", {}).get("series")
        if not series:
            continue
        columns = list(series)
        path = directory / f"{record['name']}.csv"
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(columns)
            writer.writerows(zip(*(series[c] for c in columns)))
        written.append(path)
    logger.info("wrote %d plot series to %s", len(written), directory)
    return written


def archive_report(report: VerificationReport, scenario: str) -> str:
    """Insert the report and its check rows; returns the run id."""
    run_id = str(uuid4())
    db = get_db()
    db.execute(
        """
        INSERT INTO runs (id, scenario, verdict, payload_hash, created_at, report_json)
        VALUES (?, ?, ?, ?, ?, ?)
        """,
        (
            run_id,
            scenario,
            report.verdict.value if report.verdict else None,
            report.payload_hash(),
            report.created_at or "",
            json.dumps(report.to_dict(), sort_keys=True),
        ),
    )
    db.executemany(
        """
        INSERT INTO checks (run_id, name, status, measured, tolerance, runtime)
        VALUES (?, ?, ?, ?, ?, ?)
        """,
        [
            (run_id, r.name, r.status.value, r.measured, r.tolerance, r.runtime)
            for r in report.records
        ],
    )
    db.commit()
    return run_id


def list_reports(scenario: Optional[str] = None) -> List[dict]:
    db = get_db()
    query = "SELECT id, scenario, verdict, payload_hash, created_at FROM runs"
    params: tuple = ()
    if scenario:
        query += " WHERE scenario = ?"
        params = (scenario,)
    rows = db.execute(query + " ORDER BY created_at DESC", params).fetchall()
    return [dict(row) for row in rows]


def get_report(run_id: str) -> dict:
    db = get_db()
    row = db.execute("SELECT id, report_json FROM runs WHERE id = ?", (run_id,)).fetchone()
    if row is None:
        raise ReportNotFound(f"report {run_id} not found")
    checks = db.execute(
        "SELECT name, status, measured, tolerance FROM checks WHERE run_id = ? ORDER BY id",
        (run_id,),
    ).fetchall()
    report = json.loads(row["report_json"])
    report["id"] = row["id"]
    report["check_rows"] = [dict(c) for c in checks]
    return report


def _number(value: Optional[float]) -> str:
    if value is None:
        return "-"
    return f"{value:.3e}"
