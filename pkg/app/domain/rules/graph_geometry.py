"""Intrinsic graphs over the canonical split G = W · V.

V is the first horizontal axis, W = {x_1 = 0}. W points are stored as
(x_2..x_m, y_1..y_n), i.e. with the x_1 slot dropped.
"""

import logging
from typing import Callable, Optional

import numpy as np

from ..enums import Interpolation
from ..exceptions import DegeneratePair, DimensionMismatch, EmptyTranslatedDomain, OutOfDomain
from ..models.GroupSpec import GroupSpec
from ..models.ScalarField import Grid, ScalarField
from .group_law import as_points, distance, hnorm, inverse, multiply

logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-12
PAIR_LIMIT = 1_000_000
_CHUNK = 1 << 18


def embed_w(spec: GroupSpec, a) -> np.ndarray:
    """The inclusion i: W -> G, (xw, y) -> (0, xw, y)."""
    a = np.asarray(a, dtype=float)
    if a.shape[-1] != spec.w_dim:
        raise DimensionMismatch(f"expected W points with {spec.w_dim} coordinates, got shape {a.shape}")
    return np.concatenate([np.zeros(a.shape[:-1] + (1,)), a], axis=-1)


def v_element(spec: GroupSpec, v) -> np.ndarray:
    """(v, 0, ..., 0) for scalar or array v."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape + (spec.dim,))
    out[..., 0] = v
    return out


def project_canonical(spec: GroupSpec, p) -> tuple[np.ndarray, np.ndarray]:
    """Unique (a, v) with p = i(a) · (v, 0, ..., 0)."""
    p = as_points(spec, p)
    v = p[..., 0]
    w_point = multiply(spec, p, v_element(spec, -v))
    return w_point[..., 1:], v


def graph_point(spec: GroupSpec, field: ScalarField, a) -> np.ndarray:
    """Φ(a) = i(a) · φ(a)."""
    a = np.asarray(a, dtype=float)
    if not np.all(field.grid.contains(a)):
        raise OutOfDomain("graph_point needs points inside the field domain")
    return multiply(spec, embed_w(spec, a), v_element(spec, field.evaluate(a)))


def shift_quantity(spec: GroupSpec, field: ScalarField, a, b) -> np.ndarray:
    """‖φ(a)^-1 · i(a)^-1 · i(b) · φ(a)‖, broadcast over pairs."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.all(field.grid.contains(a)) and np.all(field.grid.contains(b))):
        raise OutOfDomain("shift_quantity needs points inside the field domain")
    return _shift(spec, a, b, field.evaluate(a))


def _shift(spec: GroupSpec, a: np.ndarray, b: np.ndarray, phi_a: np.ndarray) -> np.ndarray:
    va = v_element(spec, phi_a)
    inner = multiply(spec, inverse(spec, embed_w(spec, a)), multiply(spec, embed_w(spec, b), va))
    return hnorm(spec, multiply(spec, inverse(spec, va), inner))


def sample_pairs(
    count: int,
    pair_limit: int = PAIR_LIMIT,
    samples: Optional[int] = None,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs i < j: all of them up to pair_limit, uniform random ones beyond."""
    total = count * (count - 1) // 2
    if total <= pair_limit:
        return np.triu_indices(count, k=1)
    rng = np.random.default_rng(seed)
    draws = samples or pair_limit
    i = rng.integers(0, count, size=draws)
    j = rng.integers(0, count, size=draws)
    keep = i != j
    logger.debug("sampling %d of %d pairs", int(keep.sum()), total)
    return np.minimum(i, j)[keep], np.maximum(i, j)[keep]


def estimate_lipschitz(
    spec: GroupSpec,
    field: ScalarField,
    samples: Optional[int] = None,
    *,
    pair_limit: int = PAIR_LIMIT,
    seed: int = 0,
    degenerate_tol: float = DEGENERATE_TOL,
) -> float:
    """sup |φ(b) - φ(a)| / shift_quantity(a, b) over lattice pairs."""
    points = field.grid.mesh()
    values = field.values.reshape(-1)
    first, second = sample_pairs(len(points), pair_limit, samples, seed)

    best = 0.0
    for start in range(0, len(first), _CHUNK):
        i = first[start : start + _CHUNK]
        j = second[start : start + _CHUNK]
        numerator = np.abs(values[j] - values[i])
        denominator = _shift(spec, points[i], points[j], values[i])
        degenerate = denominator <= degenerate_tol
        if np.any(degenerate & (numerator > degenerate_tol)):
            raise DegeneratePair("two points with zero shift carry different values")
        ratios = numerator[~degenerate] / denominator[~degenerate]
        if ratios.size:
            best = max(best, float(ratios.max()))
    return best


def estimate_vertical_holder(
    spec: GroupSpec,
    field: ScalarField,
    samples: Optional[int] = None,
    *,
    pair_limit: int = PAIR_LIMIT,
    seed: int = 0,
) -> float:
    """sup |φ(a) - φ(b)| / |y_a - y_b|^(1/2) over lattice pairs sharing x_2..x_m."""
    n = spec.n
    grid = field.grid
    columns = field.values.reshape(-1, int(np.prod(grid.counts[-n:])))
    y_nodes = np.stack(
        [g.reshape(-1) for g in np.meshgrid(*grid.axes[-n:], indexing="ij")], axis=-1
    )
    per_column = max(pair_limit // len(columns), 1)
    i, j = sample_pairs(len(y_nodes), per_column, samples, seed)
    gaps = np.sqrt(np.linalg.norm(y_nodes[j] - y_nodes[i], axis=-1))
    ratios = np.abs(columns[:, j] - columns[:, i]) / gaps
    return float(ratios.max()) if ratios.size else 0.0


def refinement_check(
    estimator: Callable[..., float],
    spec: GroupSpec,
    field: ScalarField,
    growth_tol: float = 0.1,
    floor: float = 1e-9,
    **kwargs,
) -> dict:
    """
    Divergence flag: compares the estimate on the lattice with the estimate on
    every other node. A bounded quantity settles, a diverging one keeps growing.
    """
    fine = estimator(spec, field, **kwargs)
    coarse = estimator(spec, field.coarsened(), **kwargs)
    ratio = fine / coarse if coarse > 0 else (np.inf if fine > floor else 1.0)
    diverging = bool(fine > (1.0 + growth_tol) * coarse and fine > floor)
    return {"fine": fine, "coarse": coarse, "ratio": float(ratio), "diverging": diverging}


def graph_distance_bounds(
    spec: GroupSpec,
    field: ScalarField,
    *,
    pair_limit: int = PAIR_LIMIT,
    seed: int = 0,
) -> tuple[float, float]:
    """min and max of d(Φ(a), Φ(b)) / shift_quantity(a, b) over lattice pairs."""
    points = field.grid.mesh()
    values = field.values.reshape(-1)
    first, second = sample_pairs(len(points), pair_limit, None, seed)
    lower, upper = np.inf, 0.0
    for start in range(0, len(first), _CHUNK):
        i = first[start : start + _CHUNK]
        j = second[start : start + _CHUNK]
        shift = _shift(spec, points[i], points[j], values[i])
        graph_a = multiply(spec, embed_w(spec, points[i]), v_element(spec, values[i]))
        graph_b = multiply(spec, embed_w(spec, points[j]), v_element(spec, values[j]))
        ratios = distance(spec, graph_a, graph_b)[shift > DEGENERATE_TOL] / shift[shift > DEGENERATE_TOL]
        if ratios.size:
            lower = min(lower, float(ratios.min()))
            upper = max(upper, float(ratios.max()))
    return lower, upper


def translate_graph(spec: GroupSpec, field: ScalarField, q) -> ScalarField:
    """
    φ_q with graph(φ_q) = q · graph(φ).

    φ_q(a) = φ(a') - v where q^-1 · i(a) = i(a') · (v, 0, ..., 0). The result is
    sampled on the largest axis-aligned box inside the translated domain.
    """
    q = as_points(spec, q)
    grid = field.grid
    n_x = spec.m - 1
    q_inv = inverse(spec, q)

    def preimage(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return project_canonical(spec, multiply(spec, q_inv, embed_w(spec, points)))

    # a'_y - a_y is affine in x_w, so its extremes sit on the corners of the x_w box
    xw_lower = np.array(grid.lower[:n_x]) + q[1 : spec.m]
    xw_upper = np.array(grid.upper[:n_x]) + q[1 : spec.m]
    corners = np.stack(
        [g.reshape(-1) for g in np.meshgrid(*zip(xw_lower, xw_upper), indexing="ij")], axis=-1
    ).reshape(-1, n_x)
    corner_points = np.concatenate([corners, np.zeros((len(corners), spec.n))], axis=-1)
    offsets = preimage(corner_points)[0][:, n_x:]

    y_lower = np.array(grid.lower[n_x:]) - offsets.min(axis=0)
    y_upper = np.array(grid.upper[n_x:]) - offsets.max(axis=0)
    if np.any(y_lower >= y_upper):
        raise EmptyTranslatedDomain("translated domain contains no axis-aligned box")

    new_grid = Grid(
        lower=tuple(xw_lower) + tuple(y_lower),
        upper=tuple(xw_upper) + tuple(y_upper),
        counts=grid.counts,
    )

    def translated(points: np.ndarray) -> np.ndarray:
        a_prime, v = preimage(np.asarray(points, dtype=float))
        return field.evaluate(a_prime) - v

    interp = Interpolation.ANALYTIC if field.source is not None else field.interp
    return ScalarField.from_function(new_grid, translated, interp=interp, axis_names=field.axis_names)
