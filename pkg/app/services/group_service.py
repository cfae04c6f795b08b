"""Group construction and axiom runs.

Builds GroupSpecs from sources (builtin families or explicit matrices) and
checks the group axioms, the metric properties of the homogeneous norm and the
bracket structure numerically on random samples.
"""

import hashlib
import json
import logging
from pathlib import Path
from time import perf_counter
from typing import Callable, Union

import numpy as np

from app import __version__
from app.domain.enums import CheckStatus
from app.domain.exceptions import LabError
from app.domain.models.GroupSpec import GroupSpec
from app.domain.models.Scenario import GroupSource
from app.domain.models.VerificationReport import CheckRecord, VerificationReport
from app.domain.rules.group_law import (
    dilate,
    distance,
    flow_commutator,
    hnorm,
    identity,
    inverse,
    multiply,
    structure_constants,
)
from app.domain.rules.group_spec import calibrate_eps, calibration_pairs, make_builtin, validate_spec
from app.repository.groups_repo import load_group_file

logger = logging.getLogger(__name__)

AXIOM_TOL = 1e-12
AXIOM_SAMPLES = 10_000
AXIOM_BOX = 1.0
FLOW_STEP = 1e-3


def load_group(source: GroupSource, calibration_samples: int = 100_000, seed: int = 0) -> GroupSpec:
    """GroupSpec from a source; eps is calibrated when the source leaves it open."""
    if source.kind is None:
        params = source.params
        return validate_spec(
            params["m"], params["n"], source.matrices, source.eps,
            calibration_samples=calibration_samples, seed=seed,
        )

    spec = make_builtin(source.kind, {**source.params, "eps": source.eps or 1.0})
    if source.eps is not None:
        return spec
    eps = calibrate_eps(spec.m, spec.n, spec.B, samples=calibration_samples, seed=seed)
    return validate_spec(spec.m, spec.n, spec.B, eps)


def group_hash(spec: GroupSpec) -> str:
    canonical = json.dumps(spec.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def check_group(
    spec: GroupSpec,
    samples: int = AXIOM_SAMPLES,
    seed: int = 0,
    h: float = FLOW_STEP,
    calibration_samples: int = 100_000,
) -> VerificationReport:
    """One record per property, measured as the worst error over the samples."""
    rng = np.random.default_rng(seed)
    p, q, r = (rng.uniform(-AXIOM_BOX, AXIOM_BOX, size=(samples, spec.dim)) for _ in range(3))
    lam = rng.uniform(0.1, 4.0, size=(samples, 1))
    report = VerificationReport(provenance={
        "group_hash": group_hash(spec),
        "group": spec.to_dict(),
        "seed": seed,
        "samples": samples,
        "version": __version__,
    })

    def worst(values: np.ndarray) -> float:
        return float(np.max(np.abs(values)))

    properties: list[tuple[str, Callable[[], float], float]] = [
        ("associativity", lambda: worst(
            multiply(spec, multiply(spec, p, q), r) - multiply(spec, p, multiply(spec, q, r))
        ), AXIOM_TOL),
        ("identity", lambda: worst(np.concatenate([
            multiply(spec, identity(spec), p) - p, multiply(spec, p, identity(spec)) - p
        ])), AXIOM_TOL),
        ("inverse", lambda: worst(np.concatenate([
            multiply(spec, p, inverse(spec, p)), multiply(spec, inverse(spec, p), p)
        ])), AXIOM_TOL),
        ("norm_homogeneity", lambda: worst(
            hnorm(spec, _dilate_rows(spec, lam, p)) - lam[:, 0] * hnorm(spec, p)
        ), AXIOM_TOL),
        ("left_invariance", lambda: worst(
            distance(spec, multiply(spec, r, p), multiply(spec, r, q)) - distance(spec, p, q)
        ), AXIOM_TOL),
        ("dilation_compatibility", lambda: worst(np.array([
            distance(spec, dilate(spec, 2.5, p), dilate(spec, 2.5, q)) - 2.5 * distance(spec, p, q),
            distance(spec, dilate(spec, 0.3, p), dilate(spec, 0.3, q)) - 0.3 * distance(spec, p, q),
        ])), AXIOM_TOL),
        ("triangle", lambda: _triangle_excess(spec, calibration_samples, seed), AXIOM_TOL),
        ("structure_constants", lambda: _flow_error(spec, h), 10.0 * h**3),
    ]

    for name, measure, tolerance in properties:
        started = perf_counter()
        measured = measure()
        report.add(CheckRecord(
            name=name,
            status=CheckStatus.PASS if measured <= tolerance else CheckStatus.FAIL,
            measured=measured,
            tolerance=tolerance,
            resolution={"samples": samples} if name != "structure_constants" else {"h": h},
            runtime=perf_counter() - started,
        ))
    report.provenance["setting_ok"] = spec.setting_ok
    logger.info("group check m=%d n=%d: %s", spec.m, spec.n,
                "all passed" if report.all_passed else "failures")
    return report


def check_group_file(
    path: Union[str, Path],
    samples: int = AXIOM_SAMPLES,
    seed: int = 0,
    calibration_samples: int = 100_000,
) -> VerificationReport:
    """Validation and axiom run of a group file; validation errors become ERROR records."""
    try:
        spec = load_group(load_group_file(path), calibration_samples, seed)
    except LabError as exc:
        logger.warning("group file %s rejected: %s", path, exc)
        report = VerificationReport(provenance={"path": Path(path).as_posix(), "seed": seed})
        report.add(error_record(type(exc).__name__, exc))
        return report
    return check_group(spec, samples=samples, seed=seed, calibration_samples=calibration_samples)


def error_record(name: str, exc: Exception) -> CheckRecord:
    return CheckRecord(
        name=name,
        status=CheckStatus.ERROR,
        measured=None,
        tolerance=None,
        details={"error": type(exc).__name__, "message": str(exc)},
    )


def _triangle_excess(spec: GroupSpec, samples: int, seed: int) -> float:
    """Worst ‖pq‖ - ‖p‖ - ‖q‖ on the calibration pairs, floored at 0."""
    p, q = calibration_pairs(spec.dim, samples, seed=seed)
    excess = hnorm(spec, multiply(spec, p, q)) - hnorm(spec, p) - hnorm(spec, q)
    return max(float(np.max(excess)), 0.0)


def _flow_error(spec: GroupSpec, h: float) -> float:
    errors = [0.0]
    for j in range(1, spec.m + 1):
        for l in range(j + 1, spec.m + 1):
            vertical = flow_commutator(spec, j, l, h)[spec.m :]
            errors.append(float(np.max(np.abs(vertical - h**2 * structure_constants(spec, j, l)))))
    return max(errors)


def _dilate_rows(spec: GroupSpec, lam: np.ndarray, p: np.ndarray) -> np.ndarray:
    """δ_λ with one factor per row."""
    return np.concatenate([lam * p[:, : spec.m], lam**2 * p[:, spec.m :]], axis=1)
