from dataclasses import dataclass

import numpy as np

from .ScalarField import ScalarField


@dataclass(frozen=True, eq=False)
class Datum:
    '''
    Right-hand side w = (w_2, ..., w_m) of D^φφ = w.
    - **w**: tuple of m-1 ScalarFields, possibly rough (no continuity assumed)
    - **bound**: L^∞ bound, max |w_j| over all lattice points
    '''
    w: tuple[ScalarField, ...]
    bound: float

    @classmethod
    def from_fields(cls, fields: list[ScalarField]) -> "Datum":
        bound = max((float(np.max(np.abs(f.values))) for f in fields), default=0.0)
        return cls(w=tuple(fields), bound=bound)

    def component(self, j: int) -> ScalarField:
        """w_j for a 1-based horizontal index j >= 2."""
        return self.w[j - 2]
