"""Characteristic curves of D^φ_j.

Along a characteristic x_j = t runs freely, x̂_j (the other horizontal
coordinates) is frozen and the vertical part obeys
    γ'_s(t) = β_s φ(t, x̂_j, γ(t)) + c_s,   β = spec.coupling(j),   c = line_coefficients.
Components with β_s = 0 are straight lines. The coupled ones are
affine functions of a single reference component, so every non-uniqueness
question reduces to one scalar equation.
"""

from dataclasses import replace
import logging
from typing import Optional, Sequence

import numpy as np

from ..enums import CurveFlavor
from ..exceptions import (
    BadParams,
    ImmediateExit,
    IndexOutOfRange,
    NoReferenceComponent,
    NonConvergent,
    NonMonotoneFamily,
    OutOfDomain,
)
from ..models.Characteristic import Characteristic
from ..models.GroupSpec import GroupSpec
from ..models.ScalarField import ScalarField
from .intrinsic_ops import line_coefficients
from .rk4 import rk4_step, time_grid

logger = logging.getLogger(__name__)

COUPLING_TOL = 1e-12
DOMAIN_TOL = 1e-9
GAP_TOL = 1e-4
OVERSHOOT_TOL = 1e-6
DEFAULT_STEP = 1e-3
DEFAULT_EPS_SEQ = tuple(2.0**-k for k in range(3, 13))


def reference_component(spec: GroupSpec, j: int) -> Optional[int]:
    """First 1-based s with β_s = spec.coupling(j)[s] != 0, None when φ drives no component."""
    coupled = np.flatnonzero(np.abs(spec.coupling(j)) > COUPLING_TOL)
    return int(coupled[0]) + 1 if coupled.size else None


def w_points(spec: GroupSpec, j: int, t, xhat, gamma) -> np.ndarray:
    """W points (x_2..x_m, y) with x_j = t, the other x from x̂_j and y = γ."""
    t = np.asarray(t, dtype=float)
    xhat = np.asarray(xhat, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    lead = np.broadcast_shapes(t.shape, xhat.shape[:-1], gamma.shape[:-1])
    k = j - 2
    xw = np.empty(lead + (spec.m - 1,))
    xw[..., :k] = xhat[..., :k]
    xw[..., k] = t
    xw[..., k + 1 :] = xhat[..., k:]
    return np.concatenate([xw, np.broadcast_to(gamma, lead + (spec.n,))], axis=-1)


def line_slopes(spec: GroupSpec, j: int, xhat) -> np.ndarray:
    """c_s for every vertical component; constant along the characteristic."""
    xhat = np.asarray(xhat, dtype=float)
    xw = w_points(spec, j, 0.0, xhat, np.zeros(spec.n))[..., : spec.m - 1]
    return line_coefficients(spec, j, xw)


def rhs(spec: GroupSpec, field: ScalarField, j: int, s: int, t: float, xhat, gamma_t) -> float:
    """γ'_s at time t."""
    if not 2 <= j <= spec.m:
        raise IndexOutOfRange(f"derivative index j must lie in 2..{spec.m}, got {j}")
    if not 1 <= s <= spec.n:
        raise IndexOutOfRange(f"vertical index s must lie in 1..{spec.n}, got {s}")
    point = w_points(spec, j, t, xhat, gamma_t)
    if not np.all(field.grid.contains(point, DOMAIN_TOL)):
        raise OutOfDomain(f"characteristic point {point} is outside the field domain")
    slope = line_slopes(spec, j, xhat)[..., s - 1]
    return float(spec.coupling(j)[s - 1] * field.evaluate(point) + slope)


def integrate(
    spec: GroupSpec,
    field: ScalarField,
    j: int,
    init: tuple,
    interval: tuple[float, float],
    step: float = DEFAULT_STEP,
) -> Characteristic:
    """
    Classical RK4 trajectory of the full vertical system from interval[0] to interval[1].

    Integration stops at the boundary of the closed box and the curve is flagged
    truncated. Uncoupled components are replaced by their closed-form lines.
    """
    if step <= 0:
        raise BadParams(f"step must be positive, got {step}")
    xhat = np.asarray(init[0], dtype=float).reshape(spec.m - 2)
    y0 = np.asarray(init[1], dtype=float).reshape(spec.n)
    t0, t1 = float(interval[0]), float(interval[1])
    grid = field.grid

    start = w_points(spec, j, t0, xhat, y0)
    if not grid.contains(start, DOMAIN_TOL):
        raise OutOfDomain("initial point is outside the field domain")

    coupling = spec.coupling(j)
    slopes = line_slopes(spec, j, xhat)

    def velocity(t: float, y: np.ndarray) -> np.ndarray:
        return coupling * field.evaluate(w_points(spec, j, t, xhat, y)) + slopes

    times = time_grid(t0, t1, step)
    states = [y0]
    truncated = False
    for k in range(len(times) - 1):
        nxt = rk4_step(velocity, times[k], states[-1], times[k + 1] - times[k])
        if not grid.contains(w_points(spec, j, times[k + 1], xhat, nxt), DOMAIN_TOL):
            truncated = True
            break
        states.append(nxt)

    if len(states) == 1 and truncated and _on_boundary(grid, start):
        raise ImmediateExit("characteristic leaves the domain from its initial point")

    kept = times[: len(states)]
    gamma = np.array(states)
    uncoupled = np.abs(coupling) <= COUPLING_TOL
    gamma[:, uncoupled] = y0[uncoupled] + np.outer(kept - t0, slopes[uncoupled])
    if t1 < t0:
        kept, gamma = kept[::-1], gamma[::-1]
    if truncated:
        logger.debug("characteristic j=%d truncated at t=%.6f", j, kept[-1] if t1 >= t0 else kept[0])
    return Characteristic(
        j=j, xhat=xhat, t_samples=kept, gamma=gamma, truncated=truncated, t_bar=t0
    )


def reconstruct(
    spec: GroupSpec, j: int, reference: int, u, xhat, y_bar, t, t_bar: float
) -> np.ndarray:
    """
    All vertical components from the reference one:
    γ_s = α_s γ_ref + (c_s - α_s c_ref)(t - t̄) + (ȳ_s - α_s ȳ_ref), α_s = β_s / β_ref.
    """
    coupling = spec.coupling(j)
    r = reference - 1
    alpha = coupling / coupling[r] if abs(coupling[r]) > COUPLING_TOL else np.eye(spec.n)[r]
    slopes = line_slopes(spec, j, xhat)
    y_bar = np.asarray(y_bar, dtype=float)
    drift = slopes - alpha * slopes[..., r : r + 1]
    offset = y_bar - alpha * y_bar[..., r : r + 1]
    u = np.asarray(u, dtype=float)[..., None]
    dt = (np.asarray(t, dtype=float) - t_bar)[..., None]
    return alpha * u + drift * dt + offset


def reduce_vertical(
    spec: GroupSpec,
    j: int,
    gamma_j1_samples,
    init_y,
    xhat,
    t_samples,
    t_bar: Optional[float] = None,
    reference: Optional[int] = None,
) -> np.ndarray:
    """
    Non-reference components, shape (T, n-1), from samples of the reference one.

    Without any coupled component the first component serves as reference and
    every other component is its closed-form line.
    """
    coupled = reference_component(spec, j)
    if reference is None:
        reference = coupled or 1
    elif coupled is not None and abs(spec.coupling(j)[reference - 1]) <= COUPLING_TOL:
        raise NoReferenceComponent(f"component {reference} is not coupled to φ in direction {j}")

    t_samples = np.asarray(t_samples, dtype=float)
    t_bar = float(t_samples[0]) if t_bar is None else t_bar
    full = reconstruct(spec, j, reference, gamma_j1_samples, xhat, init_y, t_samples, t_bar)
    return np.delete(full, reference - 1, axis=-1)


def extremal_batch(
    spec: GroupSpec,
    field: ScalarField,
    j: int,
    xhat,
    t_bar: float,
    y_bar,
    times: np.ndarray,
    eps_seq: Sequence[float],
    bias_sign: float,
    clamp: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Richardson limits of the ε-biased reduced equation u' = F(t, u) + bias_sign·ε.

    xhat (S, m-2) and y_bar (S, n) describe S initial points at time t̄ = times[0];
    times run away from t̄ in either direction. All ε levels march together. With
    clamp the reference component is held in the closed box; without it curves
    run on through the constant extension of φ outside the box. Returns the
    limits (T, S), the Cauchy gap of the last two extrapolants per curve, and the
    finest-level distance outside the box.
    """
    reference = reference_component(spec, j)
    if reference is None:
        raise NoReferenceComponent(f"no vertical component is coupled to φ in direction {j}")
    eps = np.asarray(eps_seq, dtype=float)
    if eps.size < 3 or np.any(np.diff(eps) >= 0) or np.any(eps <= 0):
        raise BadParams("eps_seq must be a decreasing positive sequence of length >= 3")

    r = reference - 1
    y_bar = np.atleast_2d(np.asarray(y_bar, dtype=float))
    seeds = len(y_bar)
    xhat = np.broadcast_to(np.asarray(xhat, dtype=float), (seeds, spec.m - 2))
    levels = len(eps)

    # batch layout: level-major, (K * S,)
    xhat_b = np.tile(xhat, (levels, 1))
    y_bar_b = np.tile(y_bar, (levels, 1))
    bias = bias_sign * np.repeat(eps, seeds)
    b_ref = spec.coupling(j)[r]
    slope_ref = line_slopes(spec, j, xhat_b)[:, r]
    lower = field.grid.lower[spec.m - 1 + r]
    upper = field.grid.upper[spec.m - 1 + r]

    def velocity(t: float, u: np.ndarray) -> np.ndarray:
        gamma = reconstruct(spec, j, reference, u, xhat_b, y_bar_b, t, t_bar)
        return b_ref * field.evaluate(w_points(spec, j, t, xhat_b, gamma)) + slope_ref + bias

    u = y_bar_b[:, r].copy()
    samples = [u]
    overshoot = np.zeros_like(u)
    for k in range(len(times) - 1):
        raw = rk4_step(velocity, times[k], u, times[k + 1] - times[k])
        inside = np.clip(raw, lower, upper)
        overshoot = np.maximum(overshoot, np.abs(raw - inside))
        u = inside if clamp else raw
        samples.append(u)

    marched = np.array(samples).reshape(len(times), levels, seeds)
    ratio = (eps[:-1] / eps[1:])[None, :, None]
    extrapolants = (ratio * marched[:, 1:] - marched[:, :-1]) / (ratio - 1.0)
    gap = np.max(np.abs(extrapolants[:, -1] - extrapolants[:, -2]), axis=0)
    limit = np.clip(extrapolants[:, -1], lower, upper) if clamp else extrapolants[:, -1]
    finest_overshoot = overshoot.reshape(levels, seeds)[-1]
    logger.debug(
        "extremal batch j=%d: %d curves x %d levels, worst gap %.2e", j, seeds, levels, gap.max()
    )
    return limit, gap, finest_overshoot


def min_max_through(
    spec: GroupSpec,
    field: ScalarField,
    j: int,
    point: tuple,
    interval: tuple[float, float],
    step: float = DEFAULT_STEP,
    eps_seq: Sequence[float] = DEFAULT_EPS_SEQ,
    gap_tol: float = GAP_TOL,
    overshoot_tol: float = OVERSHOOT_TOL,
) -> tuple[Characteristic, Characteristic]:
    """
    Minimal and maximal characteristics through point = (t̄, x̂_j, ȳ) over interval.

    Forward in time the minimal curve is the limit of u' = F - ε and the maximal
    of u' = F + ε; backward the biases swap.
    """
    t_bar = float(point[0])
    xhat = np.asarray(point[1], dtype=float).reshape(spec.m - 2)
    y_bar = np.asarray(point[2], dtype=float).reshape(spec.n)
    t0, t1 = float(interval[0]), float(interval[1])
    if not t0 <= t_bar <= t1:
        raise BadParams("t̄ must lie inside the integration interval")
    if not field.grid.contains(w_points(spec, j, t_bar, xhat, y_bar), DOMAIN_TOL):
        raise OutOfDomain("initial point is outside the field domain")

    forward = time_grid(t_bar, t1, step) if t1 > t_bar else np.array([t_bar])
    backward = time_grid(t_bar, t0, step) if t0 < t_bar else np.array([t_bar])
    times = np.concatenate([backward[::-1], forward[1:]])

    reference = reference_component(spec, j)
    if reference is None:
        gamma = reconstruct(spec, j, 1, y_bar[0] + line_slopes(spec, j, xhat)[0] * (times - t_bar),
                            xhat, y_bar, times, t_bar)
        truncated = not np.all(field.grid.contains(w_points(spec, j, times, xhat, gamma), DOMAIN_TOL))
        return tuple(
            Characteristic(j=j, xhat=xhat, t_samples=times, gamma=gamma, flavor=flavor,
                           truncated=truncated, gap=0.0, t_bar=t_bar)
            for flavor in (CurveFlavor.MINIMAL, CurveFlavor.MAXIMAL)
        )

    branches = {}
    gaps, overshoots = [], []
    for name, sweep, sign in (
        ("min_fwd", forward, -1.0), ("max_fwd", forward, 1.0),
        ("min_bwd", backward, 1.0), ("max_bwd", backward, -1.0),
    ):
        limit, gap, over = extremal_batch(spec, field, j, xhat, t_bar, y_bar, sweep, eps_seq, sign)
        branches[name] = limit[:, 0]
        gaps.append(float(gap[0]))
        overshoots.append(float(over[0]))

    gap = max(gaps)
    if gap > gap_tol:
        raise NonConvergent(gap, gap_tol)

    lower = np.concatenate([branches["min_bwd"][::-1], branches["min_fwd"][1:]])
    upper = np.concatenate([branches["max_bwd"][::-1], branches["max_fwd"][1:]])
    crossing = float(np.max(lower - upper))
    if crossing > gap_tol:
        raise NonMonotoneFamily(
            f"minimal curve lies {crossing:.3e} above the maximal one (tolerance {gap_tol:.1e})"
        )

    curves = []
    for flavor, u in ((CurveFlavor.MINIMAL, lower), (CurveFlavor.MAXIMAL, upper)):
        gamma = reconstruct(spec, j, reference, u, xhat, y_bar, times, t_bar)
        outside = not np.all(field.grid.contains(w_points(spec, j, times, xhat, gamma), DOMAIN_TOL))
        curves.append(Characteristic(
            j=j, xhat=xhat, t_samples=times, gamma=gamma, flavor=flavor,
            truncated=outside or max(overshoots) > overshoot_tol, gap=gap, t_bar=t_bar,
        ))
    return curves[0], curves[1]


def min_forward_max_backward(
    spec: GroupSpec,
    field: ScalarField,
    j: int,
    point: tuple,
    interval: tuple[float, float],
    step: float = DEFAULT_STEP,
    eps_seq: Sequence[float] = DEFAULT_EPS_SEQ,
    gap_tol: float = GAP_TOL,
    overshoot_tol: float = OVERSHOOT_TOL,
) -> Characteristic:
    """Minimal curve for t >= t̄ glued to the maximal one for t < t̄."""
    minimal, maximal = min_max_through(
        spec, field, j, point, interval, step, eps_seq, gap_tol, overshoot_tol
    )
    before = minimal.t_samples < minimal.t_bar
    gamma = np.where(before[:, None], maximal.gamma, minimal.gamma)
    return replace(minimal, gamma=gamma, flavor=CurveFlavor.MIN_FORWARD_MAX_BACKWARD,
                   truncated=minimal.truncated or maximal.truncated)


def phi_along(spec: GroupSpec, field: ScalarField, curve: Characteristic) -> np.ndarray:
    """φ(t, x̂_j, γ(t)) at the curve samples."""
    return field.evaluate(w_points(spec, curve.j, curve.t_samples, curve.xhat, curve.gamma))


def lipschitz_along(spec: GroupSpec, field: ScalarField, curve: Characteristic) -> float:
    """Largest difference quotient of φ along the curve."""
    values = phi_along(spec, field, curve)
    if len(values) < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(values)) / np.diff(curve.t_samples)))


def _on_boundary(grid, point: np.ndarray) -> bool:
    return bool(
        np.any(np.abs(point - np.array(grid.lower)) <= DOMAIN_TOL)
        or np.any(np.abs(point - np.array(grid.upper)) <= DOMAIN_TOL)
    )
