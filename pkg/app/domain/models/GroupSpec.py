from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class GroupSpec:
    '''
    Domain model representing a validated step-2 Carnot group.
    - **m**: int, rank (dimension of the horizontal layer)
    - **n**: int, dimension of the vertical layer
    - **B**: ndarray of shape (n, m, m), the skew-symmetric structure matrices B^(s)
    - **eps**: float in (0, 1], parameter of the homogeneous norm
    - **setting_ok**: bool, at most one vertical component couples to x_1 for every j

    Points are contiguous vectors of length m + n, horizontal coordinates first.
    Build instances through `validate_spec` or `make_builtin`; the constructor
    itself does not validate.
    '''
    m: int
    n: int
    B: np.ndarray
    eps: float
    setting_ok: bool

    @property
    def dim(self) -> int:
        return self.m + self.n

    @property
    def w_dim(self) -> int:
        """Dimension of the complementary subgroup W = {x_1 = 0}."""
        return self.m - 1 + self.n

    def coupling(self, j: int) -> np.ndarray:
        """
        Coefficients of φ ∂_{y_s} in D^φ_j for a 1-based horizontal index j:
        (b^(1)_{1j}, ..., b^(n)_{1j}), i.e. minus the b^(s)_{j1} of the bracket [X_j, X_1].
        """
        return self.B[:, 0, j - 1]

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "eps": self.eps,
            "setting_ok": self.setting_ok,
            "B": self.B.tolist(),
        }
