from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ScalarField import ScalarField


@dataclass(frozen=True, eq=False)
class LagrangianParam:
    """
    Full Lagrangian-type parameterization for one direction j.

    Attributes:
        j:
            1-based horizontal index of the derivative D^φ_j.
        t_samples:
            Sample times along x_j, shape (T,).
        xhat_nodes:
            Frozen horizontal coordinates x̂_j, shape (X, m-2); one row per lattice node.
        label_axes:
            One label axis per vertical component. The reference component is
            labelled by the offset order map, uncoupled components by their
            initial value at t_bar.
        chi:
            χ_{j1..jn} sampled on (t, x̂, labels), each of shape (T, X, *label_counts).
        reference:
            1-based index s* of the coupled component, None when every component is a line.
        wbar:
            Extracted datum w̄_j on the image lattice (set by extract_wbar).
        wbar_lagrangian:
            (1/b) D²_t χ_{js*} on the parameter lattice, i.e. w̄_j ∘ Υ_j.
        wbar_lagrangian_valid:
            False where the second difference is not Cauchy across step refinement.
        meta:
            Construction record: theta depth, ε sequence, steps, label bounds B_s,
            shrinkage, box bounds of the image, the seed pad past the box, the
            θ range of the kept curves and, after extraction, unhit cells.
    """
    j: int
    t_samples: np.ndarray
    xhat_nodes: np.ndarray
    label_axes: tuple[np.ndarray, ...]
    chi: tuple[np.ndarray, ...]
    reference: Optional[int]
    wbar: Optional[ScalarField] = None
    wbar_lagrangian: Optional[np.ndarray] = None
    wbar_lagrangian_valid: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    @property
    def step(self) -> float:
        return float(self.t_samples[1] - self.t_samples[0])

    @property
    def label_shape(self) -> tuple[int, ...]:
        return tuple(len(axis) for axis in self.label_axes)

    @property
    def lattice_shape(self) -> tuple[int, ...]:
        return (len(self.t_samples), len(self.xhat_nodes)) + self.label_shape

    def domain(self) -> dict:
        """Box Õ_j in (t, x̂, label) space."""
        return {
            "t": [float(self.t_samples[0]), float(self.t_samples[-1])],
            "xhat_nodes": len(self.xhat_nodes),
            "labels": [[float(a[0]), float(a[-1])] for a in self.label_axes],
        }
