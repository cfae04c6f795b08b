"""Step-2 Carnot group arithmetic in exponential coordinates.

Points are arrays of shape (..., m + n), horizontal coordinates first. Every
operation broadcasts over leading axes.
"""

import numpy as np

from ..exceptions import DimensionMismatch, IndexOutOfRange, NonFinitePoint, NonpositiveLambda
from ..models.GroupSpec import GroupSpec


def as_points(spec: GroupSpec, p) -> np.ndarray:
    """Coerce to a float array of points, checking width and finiteness."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != spec.dim:
        raise DimensionMismatch(f"expected points with {spec.dim} coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinitePoint("points must have finite coordinates")
    return arr


def split(spec: GroupSpec, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return p[..., : spec.m], p[..., spec.m :]


def bilinear(spec: GroupSpec, x: np.ndarray, x_prime: np.ndarray) -> np.ndarray:
    """⟨Bx, x'⟩, one entry per vertical component."""
    return np.einsum("sij,...j,...i->...s", spec.B, x, x_prime)


def multiply(spec: GroupSpec, p, q) -> np.ndarray:
    p, q = np.broadcast_arrays(as_points(spec, p), as_points(spec, q))
    x, y = split(spec, p)
    x_q, y_q = split(spec, q)
    return np.concatenate([x + x_q, y + y_q - 0.5 * bilinear(spec, x, x_q)], axis=-1)


def inverse(spec: GroupSpec, p) -> np.ndarray:
    return -as_points(spec, p)


def identity(spec: GroupSpec) -> np.ndarray:
    return np.zeros(spec.dim)


def dilate(spec: GroupSpec, lam: float, p) -> np.ndarray:
    if not lam > 0:
        raise NonpositiveLambda(f"dilation factor must be positive, got {lam}")
    x, y = split(spec, as_points(spec, p))
    return np.concatenate([lam * x, lam**2 * y], axis=-1)


def hnorm(spec: GroupSpec, p) -> np.ndarray:
    """max{|x|, eps·|y|^(1/2)}."""
    x, y = split(spec, as_points(spec, p))
    return np.maximum(
        np.linalg.norm(x, axis=-1), spec.eps * np.sqrt(np.linalg.norm(y, axis=-1))
    )


def distance(spec: GroupSpec, p, q) -> np.ndarray:
    """Left-invariant distance d(p, q) = ‖p^-1 · q‖."""
    return hnorm(spec, multiply(spec, inverse(spec, p), q))


def frame_at(spec: GroupSpec, p) -> np.ndarray:
    """
    Coefficients of X_1..X_m, Y_1..Y_n at p in the coordinate basis.

    Row k holds the k-th vector field, shape (..., m + n, m + n):
    X_j = ∂_{x_j} - ½ Σ_s Σ_l b^(s)_{jl} x_l ∂_{y_s}, Y_s = ∂_{y_s}.
    """
    x, _ = split(spec, as_points(spec, p))
    lead = x.shape[:-1]
    table = np.broadcast_to(np.eye(spec.dim), lead + (spec.dim, spec.dim)).copy()
    table[..., : spec.m, spec.m :] = -0.5 * np.einsum("sjl,...l->...js", spec.B, x)
    return table


def structure_constants(spec: GroupSpec, j: int, l: int) -> np.ndarray:
    """(b^(1)_{jl}, ..., b^(n)_{jl}): the Y-coordinates of [X_j, X_l]."""
    for idx in (j, l):
        if not 1 <= idx <= spec.m:
            raise IndexOutOfRange(f"horizontal index {idx} outside 1..{spec.m}")
    return spec.B[:, j - 1, l - 1].copy()


def flow_commutator(spec: GroupSpec, j: int, l: int, h: float) -> np.ndarray:
    """
    End point of the Euler flows h·X_j, h·X_l, -h·X_j, -h·X_l composed from the origin.

    Its vertical part approximates h² [X_j, X_l].
    """
    structure_constants(spec, j, l)
    p = identity(spec)
    for k, sign in ((j, 1.0), (l, 1.0), (j, -1.0), (l, -1.0)):
        p = p + sign * h * frame_at(spec, p)[k - 1]
    return p
