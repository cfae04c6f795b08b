from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class TestFunction:
    '''
    C^1 test function ζ on W: a separable product of quartic bumps.
    - **center**: ndarray, center of the support box
    - **radii**: ndarray, per-axis half widths of the support box

    Each factor is (1 - u²)² for |u| < 1 and 0 outside, with u = (x - center) / radius,
    so ζ and its first derivatives vanish on the boundary of the support.
    '''
    __test__ = False

    center: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "radii", np.asarray(self.radii, dtype=float))

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.radii

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.radii

    def _factors(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        u = (np.asarray(points, dtype=float) - self.center) / self.radii
        inside = np.abs(u) < 1.0
        one_minus = np.where(inside, 1.0 - u**2, 0.0)
        profile = one_minus**2
        slope = np.where(inside, -4.0 * u * one_minus, 0.0) / self.radii
        return profile, slope

    def value(self, points: np.ndarray) -> np.ndarray:
        profile, _ = self._factors(points)
        return np.prod(profile, axis=-1)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """Closed-form partial derivatives, shape (..., ndim)."""
        profile, slope = self._factors(points)
        grads = []
        for k in range(profile.shape[-1]):
            others = np.prod(np.delete(profile, k, axis=-1), axis=-1)
            grads.append(slope[..., k] * others)
        return np.stack(grads, axis=-1)

    def integral(self) -> float:
        """Exact ∫ζ: each factor integrates to (16/15)·radius."""
        return float(np.prod(16.0 / 15.0 * self.radii))
