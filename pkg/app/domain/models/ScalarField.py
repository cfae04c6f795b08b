from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ..enums import Interpolation
from ..exceptions import BadParams, DimensionMismatch, GridTooCoarse, NonFinitePoint


def w_axis_names(m: int, n: int) -> tuple[str, ...]:
    """Axis names of W = {x_1 = 0}: x2..xm, then y1..yn."""
    return tuple(f"x{k}" for k in range(2, m + 1)) + tuple(f"y{s}" for s in range(1, n + 1))


@dataclass(frozen=True)
class Grid:
    '''
    Rectangular lattice over a closed box.
    - **lower**, **upper**: per-axis bounds
    - **counts**: per-axis number of nodes (at least 2)
    '''
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if not len(self.lower) == len(self.upper) == len(self.counts):
            raise DimensionMismatch("lower, upper and counts must have the same length")
        if any(int(c) < 2 for c in self.counts):
            raise GridTooCoarse("every axis needs at least 2 nodes")
        if any(not lo < hi for lo, hi in zip(self.lower, self.upper)):
            raise BadParams("every axis needs lower < upper")
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    @property
    def ndim(self) -> int:
        return len(self.counts)

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(
            np.linspace(lo, hi, c) for lo, hi, c in zip(self.lower, self.upper, self.counts)
        )

    @property
    def spacing(self) -> np.ndarray:
        return (np.array(self.upper) - np.array(self.lower)) / (np.array(self.counts) - 1)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod(np.array(self.upper) - np.array(self.lower)))

    def mesh(self) -> np.ndarray:
        """All lattice nodes as an (N, ndim) array, row-major in axis order."""
        grids = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([g.reshape(-1) for g in grids], axis=-1)

    def contains(self, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        lo = np.array(self.lower) - tol
        hi = np.array(self.upper) + tol
        return np.all((pts >= lo) & (pts <= hi), axis=-1)

    def clamp(self, points: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(points, dtype=float), self.lower, self.upper)

    def nearest_index(self, points: np.ndarray) -> np.ndarray:
        """Per-axis index of the nearest lattice node (points clamped first)."""
        pts = self.clamp(points)
        idx = np.rint((pts - np.array(self.lower)) / self.spacing).astype(int)
        return np.clip(idx, 0, np.array(self.counts) - 1)

    def coarsened(self) -> "Grid":
        """Every other node on each axis."""
        kept = [axis[::2] for axis in self.axes]
        return Grid(
            lower=tuple(a[0] for a in kept),
            upper=tuple(a[-1] for a in kept),
            counts=tuple(len(a) for a in kept),
        )

    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper), "counts": list(self.counts)}


@dataclass(frozen=True, eq=False)
class ScalarField:
    '''
    Domain model representing a sampled real function on a Grid.
    - **grid**: Grid, the lattice the samples live on
    - **values**: ndarray shaped like grid.counts
    - **interp**: Interpolation, how off-lattice values are produced
    - **source**: closed-form callable on (N, ndim) points, required for ANALYTIC
    - **valid**: optional boolean mask, False where a derived value is unreliable
    - **axis_names**: labels used for CSV headers

    Off-lattice evaluation clamps to the closed box. Every rule reproduces the
    lattice values exactly at lattice nodes.
    '''
    grid: Grid
    values: np.ndarray
    interp: Interpolation = Interpolation.MULTILINEAR
    source: Optional[Callable[[np.ndarray], np.ndarray]] = None
    valid: Optional[np.ndarray] = None
    axis_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.counts:
            raise DimensionMismatch(
                f"values shape {values.shape} does not match grid counts {self.grid.counts}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFinitePoint("field values must be finite")
        if self.interp is Interpolation.ANALYTIC and self.source is None:
            raise BadParams("an analytic field needs a source callable")
        object.__setattr__(self, "values", values)
        if self.valid is not None:
            object.__setattr__(self, "valid", np.asarray(self.valid, dtype=bool))

    @classmethod
    def from_function(
        cls,
        grid: Grid,
        fn: Callable[[np.ndarray], np.ndarray],
        interp: Interpolation = Interpolation.ANALYTIC,
        axis_names: tuple[str, ...] = (),
    ) -> "ScalarField":
        values = np.asarray(fn(grid.mesh()), dtype=float).reshape(grid.counts)
        source = fn if interp is Interpolation.ANALYTIC else None
        return cls(grid=grid, values=values, interp=interp, source=source, axis_names=axis_names)

    @property
    def valid_mask(self) -> np.ndarray:
        if self.valid is None:
            return np.ones(self.grid.counts, dtype=bool)
        return self.valid

    @cached_property
    def _interpolator(self) -> RegularGridInterpolator:
        method = "nearest" if self.interp is Interpolation.NEAREST else "linear"
        return RegularGridInterpolator(
            self.grid.axes, self.values, method=method, bounds_error=False, fill_value=None
        )

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.grid.ndim:
            raise DimensionMismatch(
                f"points have {pts.shape[-1]} coordinates, field has {self.grid.ndim} axes"
            )
        flat = self.grid.clamp(pts.reshape(-1, self.grid.ndim))
        if self.interp is Interpolation.ANALYTIC:
            out = np.asarray(self.source(flat), dtype=float)
            out = np.broadcast_to(out, (flat.shape[0],))
        else:
            out = self._interpolator(flat)
        return np.array(out).reshape(pts.shape[:-1])

    def coarsened(self) -> "ScalarField":
        slices = tuple(slice(None, None, 2) for _ in range(self.grid.ndim))
        valid = None if self.valid is None else self.valid[slices]
        return replace(self, grid=self.grid.coarsened(), values=self.values[slices], valid=valid)
