from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..enums import CurveFlavor


@dataclass(frozen=True, eq=False)
class Characteristic:
    """
    A discretized integral curve of D^φ_j.

    Attributes:
        j:
            1-based horizontal derivative index (2 <= j <= m).
        xhat:
            Frozen horizontal coordinates x̂_j, i.e. x_2..x_m without x_j (length m-2).
        t_samples:
            Increasing sample times (the x_j coordinate along the curve).
        gamma:
            Vertical components, shape (len(t_samples), n).
        flavor:
            How the curve was selected when solutions are not unique.
        truncated:
            True when integration stopped (or clamped) at the domain boundary.
        gap:
            Cauchy gap of the ε sequence for extremal curves, None otherwise.
        t_bar:
            Time of the initial point; the glue point for min-forward/max-backward curves.
    """
    j: int
    xhat: np.ndarray
    t_samples: np.ndarray
    gamma: np.ndarray
    flavor: CurveFlavor = CurveFlavor.PLAIN
    truncated: bool = False
    gap: Optional[float] = None
    t_bar: Optional[float] = None

    def component(self, s: int) -> np.ndarray:
        """Samples of γ_{js} for a 1-based vertical index s."""
        return self.gamma[:, s - 1]

    def at(self, t: float) -> np.ndarray:
        """Linear interpolation of γ at time t."""
        return np.array(
            [np.interp(t, self.t_samples, self.gamma[:, s]) for s in range(self.gamma.shape[1])]
        )
