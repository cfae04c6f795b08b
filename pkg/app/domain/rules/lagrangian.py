"""Full Lagrangian-type parameterizations and their verification.

A parameterization for direction j is a monotone, surjective family of
characteristics χ(t, x̂_j, label). The reference component is built from
min-forward/max-backward curves seeded on both ends of the x_j interval,
run through the constant extension of φ past the box, and labelled by the
order map θ; the remaining components are closed-form lines. Image cells no
kept curve reaches count as excluded.
"""

from dataclasses import replace
from fractions import Fraction
from functools import lru_cache
import logging
import math
from typing import Sequence, Union

import numpy as np

from ..enums import CheckStatus, Interpolation
from ..exceptions import (
    BadParams,
    CurveNotOnUnitInterval,
    EmptyLabelDomain,
    GridTooCoarse,
    ImmediateExit,
    IndexOutOfRange,
    NoReferenceComponent,
    NonConvergent,
    NonMonotoneFamily,
    SettingViolated,
)
from ..models.Characteristic import Characteristic
from ..models.Datum import Datum
from ..models.GroupSpec import GroupSpec
from ..models.LagrangianParam import LagrangianParam
from ..models.ScalarField import ScalarField
from ..models.Scenario import Tolerances
from ..models.VerificationReport import CheckRecord, VerificationReport
from .characteristics import (
    DEFAULT_EPS_SEQ,
    GAP_TOL,
    OVERSHOOT_TOL,
    extremal_batch,
    integrate,
    line_slopes,
    reference_component,
    w_points,
)

logger = logging.getLogger(__name__)

THETA_DEPTH = 24
BUILD_STEP = 1e-2
LABELS = 101
SEEDS = 81
MONOTONE_TOL = 1e-9
CAUCHY_TOL = 1e-2


@lru_cache(maxsize=None)
def rational_enumeration(depth: int) -> tuple[Fraction, ...]:
    """First `depth` rationals of [0, 1] in Stern-Brocot breadth-first order: 0, 1, 1/2, 1/3, 2/3, 1/4, ..."""
    if depth < 1:
        raise BadParams(f"enumeration depth must be >= 1, got {depth}")
    out = [Fraction(0), Fraction(1)]
    row = [Fraction(0), Fraction(1)]
    while len(out) < depth:
        next_row = [row[0]]
        for left, right in zip(row, row[1:]):
            mediant = Fraction(left.numerator + right.numerator, left.denominator + right.denominator)
            out.append(mediant)
            next_row.extend([mediant, right])
        row = next_row
    return tuple(out[:depth])


def theta_mass(depth: int) -> float:
    """θ of the constant curve 1: Σ_{l<depth} 2^-l."""
    return 2.0 - 2.0 ** (1 - depth)


def theta_values(t_unit: np.ndarray, curves: np.ndarray, depth: int = THETA_DEPTH) -> np.ndarray:
    """θ for every column of curves (T, ...) sampled at increasing times t_unit spanning [0, 1]."""
    total = np.zeros(curves.shape[1:])
    last = len(t_unit) - 2
    for level, rational in enumerate(rational_enumeration(depth)):
        r = float(rational)
        k = min(max(int(np.searchsorted(t_unit, r, side="right")) - 1, 0), last)
        lam = (r - t_unit[k]) / (t_unit[k + 1] - t_unit[k])
        total = total + 2.0**-level * (curves[k] + lam * (curves[k + 1] - curves[k]))
    return total


def theta(
    curve: Union[Characteristic, tuple[np.ndarray, np.ndarray]],
    L: int = THETA_DEPTH,
    component: int = 1,
) -> float:
    """
    Order map Σ_{l<L} 2^-l γ(r_l) over the Stern-Brocot enumeration (r_l).

    Strictly order preserving on ordered curve families, up to truncation.
    """
    if isinstance(curve, Characteristic):
        t, values = curve.t_samples, curve.component(component)
    else:
        t, values = curve
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(t) < 2 or t[0] > 1e-12 or t[-1] < 1.0 - 1e-12:
        raise CurveNotOnUnitInterval("the order map needs a curve sampled over all of [0, 1]")
    return float(theta_values(t, values, L))


def label_bounds(spec: GroupSpec, j: int) -> np.ndarray:
    """B_s = (m-1)·B_max + 3 for the coupled component, (m-1)·B_max + 1 for the others."""
    _check_direction(spec, j)
    b_max = float(np.max(np.abs(spec.B[:, j - 1, :])))
    base = (spec.m - 1) * b_max
    coupled = np.abs(spec.coupling(j)) > 0
    return np.where(coupled, base + 3.0, base + 1.0)


def build_full_param(
    spec: GroupSpec,
    field: ScalarField,
    j: int,
    *,
    step: float = BUILD_STEP,
    labels: int = LABELS,
    seeds: int = SEEDS,
    eps_seq: Sequence[float] = DEFAULT_EPS_SEQ,
    theta_depth: int = THETA_DEPTH,
    gap_tol: float = GAP_TOL,
    overshoot_tol: float = OVERSHOOT_TOL,
    monotone_tol: float = MONOTONE_TOL,
) -> LagrangianParam:
    """
    Full Lagrangian-type parameterization of direction j over the field's box.

    Reference-component curves start from a lattice of initial values on both
    ends of the x_j interval (forward minimal from the left end, backward
    maximal from the right end). The lattice reaches past the box by the
    largest drift over the interval, and curves run through the constant
    extension of φ, so every box point lies between two seeded curves. Curves
    that never come within overshoot_tol of the box are dropped and the dropped
    share is reported as shrinkage. θ labels of the kept curves are mapped
    affinely onto (0, B_s).
    """
    _check_direction(spec, j)
    if not (spec.setting_ok or spec.n == 1):
        raise SettingViolated(f"direction {j} couples more than one vertical component")
    if labels < 2 or seeds < 2:
        raise BadParams("labels and seeds must both be >= 2")

    grid = field.grid
    m, n = spec.m, spec.n
    t_samples = _aligned_times(grid.axes[j - 2], step)
    t0, t1 = float(t_samples[0]), float(t_samples[-1])
    xhat_nodes = _xhat_lattice(spec, grid, j)
    slopes = line_slopes(spec, j, xhat_nodes)
    y_lower = np.array(grid.lower[m - 1 :])
    y_upper = np.array(grid.upper[m - 1 :])
    reference = reference_component(spec, j)
    mass = theta_mass(theta_depth)
    bounds = label_bounds(spec, j)

    label_axes = []
    for s in range(n):
        if reference is not None and s == reference - 1:
            label_axes.append(np.linspace(0.0, float(bounds[s]), labels))
            continue
        lo, hi = _line_label_range(slopes[:, s], t1 - t0, y_lower[s], y_upper[s])
        count = labels if reference is None else grid.counts[m - 1 + s]
        label_axes.append(np.linspace(lo, hi, count))

    meta = {
        "theta_depth": theta_depth,
        "theta_mass": mass,
        "eps_seq": list(map(float, eps_seq)),
        "step": float(t_samples[1] - t_samples[0]),
        "t_bar": t0,
        "label_bounds": bounds.tolist(),
        "y_lower": y_lower.tolist(),
        "y_upper": y_upper.tolist(),
        "grid": grid.to_dict(),
        "seeds": seeds,
        "shrinkage": 0.0,
        "gap": 0.0,
    }

    shape = (len(t_samples), len(xhat_nodes)) + tuple(len(a) for a in label_axes)
    chi = [_line_chi(s, label_axes, slopes, t_samples - t0, shape) for s in range(n)]
    if reference is None:
        logger.info("direction %d has no coupled component; all %d components are lines", j, n)
        return LagrangianParam(j=j, t_samples=t_samples, xhat_nodes=xhat_nodes,
                               label_axes=tuple(label_axes), chi=tuple(chi), reference=None, meta=meta)

    r = reference - 1
    others = [s for s in range(n) if s != r]
    yhat = _lattice([label_axes[s] for s in others])  # (Yh, n-1) values at t0
    families_x = np.repeat(np.arange(len(xhat_nodes)), len(yhat))
    families_y = np.tile(np.arange(len(yhat)), len(xhat_nodes))
    family_count = len(families_x)

    height = float(y_upper[r] - y_lower[r])
    pad = _drift_bound(spec, field, j, r, slopes, t1 - t0) + float(grid.spacing[m - 1 + r])
    # same seed density as `seeds` over the box height
    seed_count = max(seeds, math.ceil(seeds * (height + 2.0 * pad) / height))
    seed_values = np.linspace(y_lower[r] - pad, y_upper[r] + pad, seed_count)

    curves, gaps = [], []
    for t_bar, times in ((t0, t_samples), (t1, t_samples[::-1])):
        y_bar = np.zeros((family_count, seed_count, n))
        y_bar[:, :, r] = seed_values
        for col, s in enumerate(others):
            y_bar[:, :, s] = (yhat[families_y, col] + slopes[families_x, s] * (t_bar - t0))[:, None]
        xhat_batch = np.repeat(xhat_nodes[families_x], seed_count, axis=0)
        limit, gap, _ = extremal_batch(
            spec, field, j, xhat_batch, t_bar, y_bar.reshape(-1, n), times, eps_seq, -1.0, clamp=False
        )
        curves.append(limit if t_bar == t0 else limit[::-1])
        gaps.append(gap)

    T = len(t_samples)
    family_curves = np.concatenate(
        [c.reshape(T, family_count, seed_count) for c in curves], axis=2
    )  # (T, F, 2S)
    distance = np.maximum(y_lower[r] - family_curves, family_curves - y_upper[r])
    keep = np.min(distance, axis=0) <= overshoot_tol
    if not keep.any():
        raise EmptyLabelDomain(f"no curve of direction {j} meets the closed box")
    # curves that never meet the box do not enter the parameterization
    curve_gaps = np.concatenate([g.reshape(family_count, seed_count) for g in gaps], axis=1)
    gap = float(curve_gaps[keep].max())
    if gap > gap_tol:
        raise NonConvergent(gap, gap_tol)

    t_unit = (t_samples - t0) / (t1 - t0)
    thetas = theta_values(t_unit, family_curves, theta_depth)  # (F, 2S)
    theta_lo, theta_hi = float(thetas[keep].min()), float(thetas[keep].max())
    if not theta_hi > theta_lo:
        raise EmptyLabelDomain(f"kept curves of direction {j} carry a single label")
    label_axis = label_axes[r]
    thetas = (thetas - theta_lo) * (label_axis[-1] / (theta_hi - theta_lo))
    chi_ref = np.empty((T, family_count, len(label_axis)))
    for f in range(family_count):
        if not keep[f].any():
            raise EmptyLabelDomain(f"no curve of family {f} meets the closed box")
        chi_ref[:, f] = _interpolate_family(
            thetas[f, keep[f]], family_curves[:, f, keep[f]], label_axis, monotone_tol
        )

    other_counts = tuple(len(label_axes[s]) for s in others)
    chi_ref = chi_ref.reshape((T, len(xhat_nodes)) + other_counts + (len(label_axis),))
    chi[r] = np.moveaxis(chi_ref, -1, 2 + r)

    meta["shrinkage"] = float(1.0 - keep.mean())
    meta["gap"] = gap
    meta["pad"] = pad
    meta["theta_range"] = [theta_lo, theta_hi]
    meta["label_upper"] = float(label_axis[-1])
    meta["chi_lower"] = float(np.min(chi[r]))
    logger.info("built parameterization j=%d: %d families, %d seeds per end, shrinkage %.3f, gap %.2e",
                j, family_count, seed_count, meta["shrinkage"], gap)
    return LagrangianParam(j=j, t_samples=t_samples, xhat_nodes=xhat_nodes,
                           label_axes=tuple(label_axes), chi=tuple(chi), reference=reference, meta=meta)


def second_t_difference(values: np.ndarray, h: float, stride: int = 1) -> np.ndarray:
    """D²_t along axis 0 with spacing stride·h: centered inside, one-sided 4-point at both ends."""
    v = np.asarray(values, dtype=float)
    count, s = len(v), stride
    if count < 4 * s:
        raise GridTooCoarse(f"need at least {4 * s} time samples, got {count}")
    scale = (s * h) ** 2
    out = np.empty_like(v)
    out[s : count - s] = (v[2 * s :] - 2.0 * v[s : count - s] + v[: count - 2 * s]) / scale
    for k in range(s):
        out[k] = (2.0 * v[k] - 5.0 * v[k + s] + 4.0 * v[k + 2 * s] - v[k + 3 * s]) / scale
        e = count - 1 - k
        out[e] = (2.0 * v[e] - 5.0 * v[e - s] + 4.0 * v[e - 2 * s] - v[e - 3 * s]) / scale
    return out


def image_points(spec: GroupSpec, param: LagrangianParam) -> np.ndarray:
    """Υ_j on the parameter lattice, shape (T, X, *labels, m-1+n)."""
    chi = np.stack(param.chi, axis=-1)
    rank = chi.ndim - 1
    t = param.t_samples.reshape((-1,) + (1,) * (rank - 1))
    xhat = param.xhat_nodes.reshape((1, len(param.xhat_nodes)) + (1,) * (rank - 2) + (spec.m - 2,))
    return w_points(spec, param.j, t, xhat, chi)


def lagrangian_datum(
    spec: GroupSpec, param: LagrangianParam, cauchy_tol: float = CAUCHY_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """(1/b) D²_t χ_ref on the parameter lattice, with the step-refinement validity mask."""
    if param.reference is None:
        raise NoReferenceComponent(f"direction {param.j} has no coupled component")
    chi = param.chi[param.reference - 1]
    fine = second_t_difference(chi, param.step)
    coarse = second_t_difference(chi, param.step, stride=2)
    b = spec.coupling(param.j)[param.reference - 1]
    return fine / b, np.abs(fine - coarse) <= cauchy_tol


def extract_wbar(
    spec: GroupSpec,
    field: ScalarField,
    param: LagrangianParam,
    cauchy_tol: float = CAUCHY_TOL,
) -> ScalarField:
    """w̄_j on the field lattice: the smallest-label parameter point of each image cell wins."""
    return attach_wbar(spec, field, param, cauchy_tol).wbar


def attach_wbar(
    spec: GroupSpec,
    field: ScalarField,
    param: LagrangianParam,
    cauchy_tol: float = CAUCHY_TOL,
) -> LagrangianParam:
    """Copy of param carrying w̄ on the image lattice and (1/b) D²_t χ on its own lattice."""
    wbar_lag, cauchy_ok = lagrangian_datum(spec, param, cauchy_tol)
    grid = field.grid

    # only t samples on field x_j nodes map to image cells unambiguously
    on_nodes = np.isin(np.round(param.t_samples, 12), np.round(grid.axes[param.j - 2], 12))
    points = image_points(spec, param)[on_nodes].reshape(-1, grid.ndim)
    inside = grid.contains(points, 0.5 * float(np.min(grid.spacing)))
    cells = np.ravel_multi_index(tuple(grid.nearest_index(points[inside]).T), grid.counts)
    values = wbar_lag[on_nodes].reshape(-1)[inside]
    valid = cauchy_ok[on_nodes].reshape(-1)[inside]
    # row-major flattening puts the smallest label of each cell first
    hit, first = np.unique(cells, return_index=True)

    wbar_values = np.zeros(int(np.prod(grid.counts)))
    wbar_valid = np.zeros_like(wbar_values, dtype=bool)
    hit_mask = np.zeros_like(wbar_valid)
    wbar_values[hit] = values[first]
    wbar_valid[hit] = valid[first]
    hit_mask[hit] = True

    wbar = ScalarField(
        grid=grid,
        values=wbar_values.reshape(grid.counts),
        interp=Interpolation.NEAREST,
        valid=wbar_valid.reshape(grid.counts),
        axis_names=field.axis_names,
    )
    # cells the image never reaches count as excluded alongside non-Cauchy ones
    excluded = int(np.sum(~wbar_valid))
    meta = {
        **param.meta,
        "image_cells": int(hit_mask.sum()),
        "unhit_cells": int(np.sum(~hit_mask)),
        "excluded_cells": excluded,
        "excluded_fraction": excluded / hit_mask.size,
        "cauchy_tol": cauchy_tol,
    }
    logger.debug("extracted wbar on %d image cells, %d excluded", hit_mask.sum(), excluded)
    return replace(param, wbar=wbar, wbar_lagrangian=wbar_lag, wbar_lagrangian_valid=cauchy_ok, meta=meta)


def verify_lagrangian(
    spec: GroupSpec,
    field: ScalarField,
    param: LagrangianParam,
    datum: Datum,
    tolerances: Tolerances = Tolerances(),
    *,
    ls2_samples: int = 16,
    seed: int = 0,
) -> VerificationReport:
    """
    Full-parameterization checks (L.2, L.3, surjectivity) and Lagrangian-solution
    checks (LS1, LS2, LS3) plus the Lipschitz bound along characteristics.
    Failures are report entries, never exceptions.
    """
    report = VerificationReport(provenance={"j": param.j})
    if param.wbar_lagrangian is None and param.reference is not None:
        param = attach_wbar(spec, field, param, tolerances.cauchy)

    report.add(_check_monotone(param, tolerances.monotone))
    phi_image = field.evaluate(image_points(spec, param))
    report.add(_check_characteristic(spec, param, phi_image, tolerances.l3_factor))
    report.add(_check_surjective(spec, field, param, tolerances.excluded_fraction))

    if param.reference is None:
        for name in ("LS1", "LS2", "LS3"):
            report.add(CheckRecord(name=name, status=CheckStatus.SKIPPED, measured=None,
                                   tolerance=None, details={"reason": "no coupled component"}))
        return report

    derivative = np.gradient(phi_image, param.step, axis=0)
    report.add(_check_ls1(param, derivative, tolerances.ls1))
    report.add(_check_ls2(spec, field, param, tolerances, ls2_samples, seed))
    report.add(_check_ls3(field, param, datum, tolerances))

    bound = 1.1 * datum.bound
    along = float(np.max(np.abs(derivative)))
    report.add(CheckRecord(
        name="lipschitz_along",
        status=CheckStatus.PASS if along <= bound + 1e-9 else CheckStatus.FAIL,
        measured=along,
        tolerance=bound,
        details={"datum_bound": datum.bound},
    ))
    return report


def _check_monotone(param: LagrangianParam, tol: float) -> CheckRecord:
    worst = min(
        float(np.min(np.diff(chi, axis=2 + s))) for s, chi in enumerate(param.chi)
    )
    return CheckRecord(
        name="L2_monotone",
        status=CheckStatus.PASS if worst >= -tol else CheckStatus.FAIL,
        measured=worst,
        tolerance=-tol,
    )


def _check_characteristic(
    spec: GroupSpec, param: LagrangianParam, phi_image: np.ndarray, factor: float
) -> CheckRecord:
    slopes = line_slopes(spec, param.j, param.xhat_nodes)
    rank = param.chi[0].ndim
    worst = 0.0
    for s, chi in enumerate(param.chi):
        d_t = np.gradient(chi, param.step, axis=0)
        c_s = slopes[:, s].reshape((1, -1) + (1,) * (rank - 2))
        expected = spec.coupling(param.j)[s] * phi_image + c_s
        worst = max(worst, float(np.max(np.abs(d_t - expected))))
    tol = factor * param.step
    return CheckRecord(
        name="L3_characteristic",
        status=CheckStatus.PASS if worst <= tol else CheckStatus.FAIL,
        measured=worst,
        tolerance=tol,
        resolution={"step": param.step},
    )


def _check_surjective(
    spec: GroupSpec, field: ScalarField, param: LagrangianParam, excluded_fraction: float
) -> CheckRecord:
    """Label steps inside the box stay below one cell and the image spans the box for almost every line."""
    s = (param.reference or 1) - 1
    axis = 2 + s
    chi = param.chi[s]
    cell = float(field.grid.spacing[spec.m - 1 + s])
    lo, hi = field.grid.lower[spec.m - 1 + s], field.grid.upper[spec.m - 1 + s]
    below, above = np.delete(chi, -1, axis=axis), np.delete(chi, 0, axis=axis)
    meets_box = (above >= lo) & (below <= hi)
    widest = float(np.max(np.where(meets_box, above - below, 0.0)))
    covered = (np.min(chi, axis=axis) - lo <= cell) & (hi - np.max(chi, axis=axis) <= cell)
    coverage = float(np.mean(covered))
    ok = widest <= cell + 1e-12 and coverage >= 1.0 - excluded_fraction
    return CheckRecord(
        name="surjectivity",
        status=CheckStatus.PASS if ok else CheckStatus.FAIL,
        measured=widest,
        tolerance=cell,
        details={"coverage": coverage, "min_coverage": 1.0 - excluded_fraction,
                 "shrinkage": param.meta.get("shrinkage", 0.0)},
    )


def _check_ls1(param: LagrangianParam, derivative: np.ndarray, tol: float) -> CheckRecord:
    valid = param.wbar_lagrangian_valid
    span = float(param.t_samples[-1] - param.t_samples[0])
    gap = np.abs(derivative - param.wbar_lagrangian)[valid]
    measured = float(gap.mean() * span) if gap.size else 0.0
    return CheckRecord(
        name="LS1",
        status=CheckStatus.PASS if measured <= tol else CheckStatus.FAIL,
        measured=measured,
        tolerance=tol,
        resolution={"step": param.step},
    )


def _check_ls2(
    spec: GroupSpec,
    field: ScalarField,
    param: LagrangianParam,
    tolerances: Tolerances,
    samples: int,
    seed: int,
) -> CheckRecord:
    rng = np.random.default_rng(seed)
    shape = param.lattice_shape
    delta = 2.0 * param.step
    interior = np.arange(2, shape[0] - 2)
    worst, stable = 0.0, 0
    for _ in range(samples):
        index = (int(rng.choice(interior)),) + tuple(int(rng.integers(0, c)) for c in shape[1:])
        t = float(param.t_samples[index[0]])
        xhat = param.xhat_nodes[index[1]]
        y = np.array([chi[index] for chi in param.chi])
        if not field.grid.contains(w_points(spec, param.j, t, xhat, y)):
            continue
        quotients = [_two_sided(spec, field, param.j, t, xhat, y, d) for d in (delta, delta / 2)]
        if any(q is None for q in quotients):
            continue
        if abs(quotients[0] - quotients[1]) > tolerances.ls2_stability:
            continue
        if not param.wbar_lagrangian_valid[index]:
            continue
        stable += 1
        worst = max(worst, abs(quotients[1] - float(param.wbar_lagrangian[index])))

    coverage = stable / samples if samples else 0.0
    if stable == 0:
        logger.warning("LS2: no sampled curve has a refinement-stable derivative")
    return CheckRecord(
        name="LS2",
        status=CheckStatus.PASS if worst <= tolerances.ls2 else CheckStatus.FAIL,
        measured=worst,
        tolerance=tolerances.ls2,
        resolution={"delta": delta, "samples": samples},
        details={"coverage": coverage, "stable": stable},
    )


def _two_sided(spec, field, j, t, xhat, y, delta):
    ends = []
    for target in (t + delta, t - delta):
        try:
            curve = integrate(spec, field, j, (xhat, y), (t, target), step=delta / 8)
        except ImmediateExit:
            return None
        if curve.truncated:
            return None
        end = curve.t_samples[-1] if target > t else curve.t_samples[0]
        ends.append(float(field.evaluate(w_points(spec, j, end, xhat, curve.at(end)))))
    return (ends[0] - ends[1]) / (2.0 * delta)


def _check_ls3(field: ScalarField, param: LagrangianParam, datum: Datum, tolerances: Tolerances) -> CheckRecord:
    grid = field.grid
    w = datum.component(param.j).evaluate(grid.mesh()).reshape(grid.counts)
    valid = param.wbar.valid_mask
    gap = float(np.sum(np.abs(param.wbar.values - w)[valid]) * grid.cell_volume)
    tol = tolerances.ls3 * grid.volume
    excluded = float(param.meta.get("excluded_fraction", 0.0))
    if excluded >= tolerances.excluded_fraction:
        logger.warning("LS3: %.1f%% of the domain excluded", 100 * excluded)
    ok = gap <= tol and excluded < tolerances.excluded_fraction
    return CheckRecord(
        name="LS3",
        status=CheckStatus.PASS if ok else CheckStatus.FAIL,
        measured=gap,
        tolerance=tol,
        details={
            "excluded_fraction": excluded,
            "image_cells": param.meta.get("image_cells"),
            "unhit_cells": param.meta.get("unhit_cells", 0),
        },
    )


def _check_direction(spec: GroupSpec, j: int) -> None:
    if not 2 <= j <= spec.m:
        raise IndexOutOfRange(f"derivative index j must lie in 2..{spec.m}, got {j}")


def _aligned_times(axis: np.ndarray, step: float) -> np.ndarray:
    """t samples containing every node of the x_j axis, spacing at most step."""
    intervals = len(axis) - 1
    per_cell = max(1, math.ceil((axis[1] - axis[0]) / step - 1e-9))
    return np.linspace(axis[0], axis[-1], intervals * per_cell + 1)


def _drift_bound(spec: GroupSpec, field: ScalarField, j: int, r: int, slopes: np.ndarray, duration: float) -> float:
    """Largest distance a reference-component curve can travel over the x_j interval."""
    speed = abs(float(spec.coupling(j)[r])) * float(np.max(np.abs(field.values)))
    speed += float(np.max(np.abs(slopes[:, r])))
    return speed * duration


def _lattice(axes: list[np.ndarray]) -> np.ndarray:
    if not axes:
        return np.zeros((1, 0))
    return np.stack([g.reshape(-1) for g in np.meshgrid(*axes, indexing="ij")], axis=-1)


def _xhat_lattice(spec: GroupSpec, grid, j: int) -> np.ndarray:
    return _lattice([grid.axes[k] for k in range(spec.m - 1) if k != j - 2])


def _line_label_range(slopes: np.ndarray, duration: float, lo: float, hi: float) -> tuple[float, float]:
    """Initial values whose lines stay inside [lo, hi] for every x̂ node."""
    drift = slopes * duration
    low = lo - min(0.0, float(drift.min()))
    high = hi - max(0.0, float(drift.max()))
    if not low < high:
        raise EmptyLabelDomain("line components leave the box for every initial value")
    return low, high


def _line_chi(s: int, label_axes, slopes: np.ndarray, elapsed: np.ndarray, shape) -> np.ndarray:
    rank = len(shape)
    label = label_axes[s].reshape((1, 1) + tuple(-1 if k == s else 1 for k in range(rank - 2)))
    drift = slopes[:, s].reshape((1, -1) + (1,) * (rank - 2)) * elapsed.reshape((-1,) + (1,) * (rank - 1))
    return np.broadcast_to(label + drift, shape).copy()


def _interpolate_family(
    thetas: np.ndarray, curves: np.ndarray, label_axis: np.ndarray, tol: float
) -> np.ndarray:
    """Monotone interpolation of an ordered family in its θ labels, constant beyond both ends."""
    order = np.argsort(thetas, kind="stable")
    thetas, curves = thetas[order], curves[:, order]
    thetas, unique = np.unique(thetas, return_index=True)
    curves = curves[:, unique]
    if curves.shape[1] == 1:
        return np.repeat(curves, len(label_axis), axis=1)
    if np.min(np.diff(curves, axis=1)) < -tol:
        raise NonMonotoneFamily("curves of the family cross")
    curves = np.maximum.accumulate(curves, axis=1)
    idx = np.clip(np.searchsorted(thetas, label_axis, side="right") - 1, 0, len(thetas) - 2)
    lam = np.clip((label_axis - thetas[idx]) / (thetas[idx + 1] - thetas[idx]), 0.0, 1.0)
    return curves[:, idx] + lam * (curves[:, idx + 1] - curves[:, idx])
