"""Scenario orchestration.

Runs the hypothesis gate and the three equivalent conditions (intrinsic
Lipschitz, distributional solution, Lagrangian solution) against one datum,
then derives the equivalence verdict. Check failures and errors raised inside a
check are report records; only an invalid scenario raises.
"""

from dataclasses import dataclass, field as dataclass_field
from datetime import datetime, timezone
import hashlib
import json
import logging
from time import perf_counter
from typing import Optional, Sequence

import numpy as np

from app import __version__
from app.domain.enums import CheckName, CheckStatus, CurveFlavor, Verdict
from app.domain.exceptions import ConfigError, LabError, NoReferenceComponent
from app.domain.models.Characteristic import Characteristic
from app.domain.models.Datum import Datum
from app.domain.models.GroupSpec import GroupSpec
from app.domain.models.LagrangianParam import LagrangianParam
from app.domain.models.ScalarField import ScalarField
from app.domain.models.Scenario import Scenario
from app.domain.models.VerificationReport import CheckRecord, VerificationReport
from app.domain.rules.characteristics import integrate, min_forward_max_backward, min_max_through
from app.domain.rules.graph_geometry import (
    estimate_lipschitz,
    estimate_vertical_holder,
    refinement_check,
)
from app.domain.rules.intrinsic_ops import build_test_battery, distributional_residual
from app.domain.rules.lagrangian import attach_wbar, build_full_param, verify_lagrangian
from app.domain.rules.mollification import mollification_margin, mollified_phi_and_w, mollify_chi
from .field_catalog import build_datum, build_field, extracted_datum
from .group_service import error_record, group_hash, load_group

logger = logging.getLogger(__name__)

# (1), (2), (3) of the equivalence
CONDITIONS = (CheckName.LIPSCHITZ, CheckName.RESIDUAL, CheckName.LAGRANGIAN)
BOUND_SLACK = 1e-9


@dataclass
class ScenarioContext:
    """Everything a check needs: the built group, φ, w and the cached parameterizations."""
    scenario: Scenario
    spec: GroupSpec
    field: ScalarField
    datum: Optional[Datum]
    params: dict[int, LagrangianParam] = dataclass_field(default_factory=dict)

    def param(self, j: int) -> LagrangianParam:
        """Parameterization of direction j with w̄ attached, built once per run."""
        if j not in self.params:
            res = self.scenario.resolutions
            tol = self.scenario.tolerances
            built = build_full_param(
                self.spec, self.field, j,
                step=res.build_step,
                labels=res.labels,
                seeds=res.seeds,
                eps_seq=res.eps_seq(),
                theta_depth=res.theta_depth,
                gap_tol=tol.characteristic_gap,
                overshoot_tol=tol.overshoot,
                monotone_tol=tol.monotone,
            )
            if built.reference is not None:
                built = attach_wbar(self.spec, self.field, built, tol.cauchy)
            self.params[j] = built
        return self.params[j]

    def resolved_datum(self) -> Datum:
        """The supplied datum, or the one extracted from the parameterizations."""
        if self.datum is None:
            wbars = {}
            for j in range(2, self.spec.m + 1):
                param = self.param(j)
                if param.wbar is None:
                    raise NoReferenceComponent(f"direction {j} has no coupled component to extract from")
                wbars[j] = param.wbar
            self.datum = extracted_datum(self.spec, wbars)
        return self.datum


def prepare(scenario: Scenario) -> ScenarioContext:
    """Build group, φ and w; any failure here means the scenario itself is unusable."""
    res = scenario.resolutions
    try:
        spec = load_group(scenario.group, res.calibration_samples, scenario.seed)
        phi = build_field(spec, scenario.field_source, scenario.domain)
        datum = build_datum(spec, scenario.datum_source, scenario.domain, phi)
    except ConfigError:
        raise
    except LabError as exc:
        raise ConfigError(f"scenario {scenario.name}: {exc}") from exc
    logger.info("prepared scenario %s: m=%d n=%d eps=%s", scenario.name, spec.m, spec.n, spec.eps)
    return ScenarioContext(scenario=scenario, spec=spec, field=phi, datum=datum)


def scenario_hash(scenario: Scenario) -> str:
    canonical = json.dumps(scenario.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def run_scenario(scenario: Scenario) -> VerificationReport:
    """
    Execute the scenario's checks and attach the equivalence verdict.

    Checks run in the order gate, (1), (2), (3), mollification. When the gate
    fails every later check is recorded as SKIPPED.
    """
    ctx = prepare(scenario)
    report = VerificationReport(
        provenance={
            "scenario": scenario.name,
            "scenario_hash": scenario_hash(scenario),
            "group_hash": group_hash(ctx.spec),
            "eps": ctx.spec.eps,
            "setting_ok": ctx.spec.setting_ok,
            "seed": scenario.seed,
            "version": __version__,
        },
        created_at=datetime.now(timezone.utc).isoformat(),
    )

    gate_failed = False
    for name in [c for c in CheckName if c in scenario.checks]:
        if gate_failed:
            report.add(CheckRecord(
                name=name.value, status=CheckStatus.SKIPPED, measured=None, tolerance=None,
                details={"reason": "hypothesis gate failed"},
            ))
            continue
        report.add(_run_check(ctx, name))
        if name is CheckName.HOLDER_GATE and not report.get(name.value).passed:
            gate_failed = True

    report.verdict = verdict_for(report, scenario.checks)
    logger.info("scenario %s: verdict %s", scenario.name, report.verdict.value)
    return report


def verdict_for(report: VerificationReport, checks: Sequence[CheckName]) -> Verdict:
    gate = report.get(CheckName.HOLDER_GATE.value)
    if gate is not None and not gate.passed:
        return Verdict.HYPOTHESIS_FAILED
    if any(c not in checks for c in CONDITIONS):
        return Verdict.INCOMPLETE

    lipschitz, residual, lagrangian = (report.get(c.value).passed for c in CONDITIONS)
    if lipschitz and residual and lagrangian:
        return Verdict.EQUIVALENT_HOLD
    if not (lipschitz or residual or lagrangian):
        return Verdict.EQUIVALENT_FAIL
    if lipschitz and not residual and not lagrangian:
        return Verdict.DATUM_MISMATCH
    return Verdict.COUNTEREXAMPLE


def _run_check(ctx: ScenarioContext, name: CheckName) -> CheckRecord:
    runner = {
        CheckName.HOLDER_GATE: _holder_gate,
        CheckName.LIPSCHITZ: _lipschitz,
        CheckName.RESIDUAL: _residual,
        CheckName.LAGRANGIAN: _lagrangian,
        CheckName.MOLLIFICATION: _mollification,
    }[name]
    started = perf_counter()
    try:
        record = runner(ctx)
    except LabError as exc:
        logger.warning("check %s raised %s: %s", name.value, type(exc).__name__, exc)
        record = error_record(name.value, exc)
    record.runtime = perf_counter() - started
    return record


def _divergence_record(name: str, result: dict, growth: float, resolution: dict) -> CheckRecord:
    return CheckRecord(
        name=name,
        status=CheckStatus.FAIL if result["diverging"] else CheckStatus.PASS,
        measured=result["ratio"],
        tolerance=1.0 + growth,
        resolution=resolution,
        details={"fine": result["fine"], "coarse": result["coarse"], "diverging": result["diverging"]},
    )


def _holder_gate(ctx: ScenarioContext) -> CheckRecord:
    res, tol = ctx.scenario.resolutions, ctx.scenario.tolerances
    result = refinement_check(
        estimate_vertical_holder, ctx.spec, ctx.field, tol.holder_growth,
        pair_limit=res.pair_limit, seed=ctx.scenario.seed,
    )
    return _divergence_record(CheckName.HOLDER_GATE.value, result, tol.holder_growth,
                              {"pair_limit": res.pair_limit})


def _lipschitz(ctx: ScenarioContext) -> CheckRecord:
    res, tol = ctx.scenario.resolutions, ctx.scenario.tolerances
    result = refinement_check(
        estimate_lipschitz, ctx.spec, ctx.field, tol.lipschitz_growth,
        pair_limit=res.pair_limit, seed=ctx.scenario.seed, degenerate_tol=tol.degenerate,
    )
    return _divergence_record(CheckName.LIPSCHITZ.value, result, tol.lipschitz_growth,
                              {"pair_limit": res.pair_limit})


def _residual(ctx: ScenarioContext) -> CheckRecord:
    scenario = ctx.scenario
    res, tol = scenario.resolutions, scenario.tolerances
    datum = ctx.resolved_datum()
    battery = build_test_battery(scenario.domain, res.battery_size, res.battery_radius, scenario.seed)
    per_j = {}
    for j in scenario.j_list:
        per_j[str(j)] = [
            distributional_residual(ctx.spec, ctx.field, datum, zeta, j, nodes=res.quadrature_nodes)
            for zeta in battery
        ]
    worst = max(abs(r) for values in per_j.values() for r in values)
    return CheckRecord(
        name=CheckName.RESIDUAL.value,
        status=CheckStatus.PASS if worst <= tol.residual else CheckStatus.FAIL,
        measured=worst,
        tolerance=tol.residual,
        resolution={"quadrature_nodes": res.quadrature_nodes, "battery_size": res.battery_size},
        details={"residuals": per_j},
    )


def _lagrangian(ctx: ScenarioContext) -> CheckRecord:
    scenario = ctx.scenario
    res, tol = scenario.resolutions, scenario.tolerances
    datum = ctx.resolved_datum()
    failed, per_j = 0, {}
    for j in scenario.j_list:
        param = ctx.param(j)
        sub = verify_lagrangian(ctx.spec, ctx.field, param, datum, tol,
                                ls2_samples=res.ls2_samples, seed=scenario.seed)
        failed += sum(1 for r in sub.records if r.failed)
        per_j[str(j)] = {
            "records": [r.to_dict(with_runtime=False) for r in sub.records],
            "shrinkage": param.meta.get("shrinkage"),
            "excluded_fraction": param.meta.get("excluded_fraction"),
            "gap": param.meta.get("gap"),
        }
    return CheckRecord(
        name=CheckName.LAGRANGIAN.value,
        status=CheckStatus.PASS if failed == 0 else CheckStatus.FAIL,
        measured=float(failed),
        tolerance=0.0,
        resolution={"build_step": res.build_step, "labels": res.labels, "seeds": res.seeds,
                    "theta_depth": res.theta_depth},
        details={"directions": per_j},
    )


def mollification_series(ctx: ScenarioContext, j: int, eps_values: Sequence[float]) -> dict:
    """L¹ distance to φ, w^ε bound and monotonicity margin per ε (largest ε first)."""
    param = ctx.param(j)
    if param.reference is None:
        raise NoReferenceComponent(f"direction {j} has no coupled component to mollify")
    tol = ctx.scenario.tolerances
    eps_sorted = sorted(eps_values, reverse=True)
    axis = 2 + param.reference - 1
    labels = param.label_axes[param.reference - 1]
    wbar_max = float(np.max(np.abs(param.wbar_lagrangian)))

    mollified = [mollified_phi_and_w(ctx.spec, ctx.field, param, eps, tol.inversion_margin)
                 for eps in eps_sorted]
    common = np.logical_and.reduce([phi_eps.valid_mask for phi_eps, _ in mollified])
    cell = ctx.field.grid.cell_volume
    series = {"eps": [], "l1": [], "w_max": [], "w_bound": [], "margin": []}
    for eps, (phi_eps, w_eps) in zip(eps_sorted, mollified):
        series["eps"].append(float(eps))
        series["l1"].append(float(np.sum(np.abs(phi_eps.values - ctx.field.values)[common]) * cell))
        series["w_max"].append(float(np.max(np.abs(w_eps.values[w_eps.valid_mask]), initial=0.0)))
        series["w_bound"].append((1.0 + eps * float(labels[-1])) * wbar_max)
        series["margin"].append(mollification_margin(mollify_chi(param, eps), axis))
    series["common_cells"] = int(common.sum())
    return series


def _mollification(ctx: ScenarioContext) -> CheckRecord:
    scenario = ctx.scenario
    columns = ("eps", "l1", "w_max", "w_bound", "margin")
    combined = {"j": [], **{c: [] for c in columns}}
    per_j, ok, worst_ratio = {}, True, 0.0
    for j in scenario.j_list:
        series = mollification_series(ctx, j, scenario.mollify_eps)
        l1 = series["l1"]
        ratios = [l1[k + 1] / l1[k] if l1[k] > 0 else np.inf for k in range(len(l1) - 1)]
        worst_ratio = max([worst_ratio] + ratios)
        decreasing = all(l1[k + 1] < l1[k] for k in range(len(l1) - 1))
        bounded = all(w <= b + BOUND_SLACK for w, b in zip(series["w_max"], series["w_bound"]))
        positive = all(m > 0 for m in series["margin"])
        ok = ok and decreasing and bounded and positive and series["common_cells"] > 0
        per_j[str(j)] = {"decreasing": decreasing, "bounded": bounded,
                         "positive_margin": positive, "common_cells": series["common_cells"]}
        combined["j"].extend([j] * len(l1))
        for c in columns:
            combined[c].extend(series[c])
    return CheckRecord(
        name=CheckName.MOLLIFICATION.value,
        status=CheckStatus.PASS if ok else CheckStatus.FAIL,
        measured=float(worst_ratio),
        tolerance=1.0,
        resolution={"eps": sorted(scenario.mollify_eps, reverse=True)},
        details={"directions": per_j, "series": combined},
    )


def trace_characteristic(
    ctx: ScenarioContext,
    j: int,
    point: tuple,
    interval: tuple[float, float],
    flavor: CurveFlavor = CurveFlavor.PLAIN,
    step: Optional[float] = None,
) -> Characteristic:
    """
    One characteristic through point = (t̄, x̂_j, ȳ).

    PLAIN integrates forward from t̄ to interval[1]; MINIMAL / MAXIMAL select
    the extremal solution over the whole interval and MIN_FORWARD_MAX_BACKWARD
    glues the minimal curve after t̄ to the maximal one before it.
    """
    step = step or ctx.scenario.resolutions.step
    if flavor is CurveFlavor.PLAIN:
        return integrate(ctx.spec, ctx.field, j, (point[1], point[2]), (point[0], interval[1]), step)
    selection = {
        "eps_seq": ctx.scenario.resolutions.eps_seq(),
        "gap_tol": ctx.scenario.tolerances.characteristic_gap,
        "overshoot_tol": ctx.scenario.tolerances.overshoot,
    }
    if flavor is CurveFlavor.MIN_FORWARD_MAX_BACKWARD:
        return min_forward_max_backward(ctx.spec, ctx.field, j, point, interval, step, **selection)
    lower, upper = min_max_through(ctx.spec, ctx.field, j, point, interval, step, **selection)
    return lower if flavor is CurveFlavor.MINIMAL else upper
