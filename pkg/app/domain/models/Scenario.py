from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from ..enums import CheckName, DatumKind, FieldKind, GroupKind
from .ScalarField import Grid


@dataclass(frozen=True)
class Resolutions:
    '''
    Numeric resolution settings of a scenario run.
    - **step**: RK4 step for single characteristics
    - **build_step**: t-step of the Lagrangian family construction
    - **labels**: number of label lattice points per component
    - **seeds**: number of initial values of the ordered family
    - **eps_k_min**, **eps_k_max**: extremal-selection sequence ε = 2^-k
    - **theta_depth**: truncation depth L of the order map
    - **quadrature_nodes**: midpoint nodes per axis for the residual
    - **battery_size**, **battery_radius**: test-function battery
    - **pair_limit**: exhaustive pair enumeration limit of the estimators
    - **ls2_samples**: base points sampled by the LS2 check
    - **calibration_samples**: pairs drawn by eps calibration
    '''
    step: float = 1e-3
    build_step: float = 1e-2
    labels: int = 101
    seeds: int = 81
    eps_k_min: int = 3
    eps_k_max: int = 12
    theta_depth: int = 24
    quadrature_nodes: int = 256
    battery_size: int = 4
    battery_radius: float = 0.2
    pair_limit: int = 1_000_000
    ls2_samples: int = 16
    calibration_samples: int = 100_000

    def eps_seq(self) -> tuple[float, ...]:
        return tuple(2.0 ** -k for k in range(self.eps_k_min, self.eps_k_max + 1))


@dataclass(frozen=True)
class Tolerances:
    """
    Every threshold a scenario check compares against.

    All values are overridable from the scenario's [tolerances] table.
    """
    holder_growth: float = 0.1
    lipschitz_growth: float = 0.1
    degenerate: float = 1e-12
    residual: float = 1e-6
    characteristic_gap: float = 1e-4
    overshoot: float = 1e-6
    monotone: float = 1e-9
    l3_factor: float = 10.0
    ls1: float = 1e-3
    ls2: float = 1e-2
    ls2_stability: float = 1e-3
    ls3: float = 1e-3
    cauchy: float = 1e-2
    excluded_fraction: float = 0.02
    inversion_margin: float = 1e-12


@dataclass(frozen=True, eq=False)
class GroupSource:
    '''
    Where the group comes from.
    - **kind**: builtin family, None for explicit matrices
    - **params**: builtin parameters (k, m, B)
    - **matrices**: explicit B^(s) list when kind is None
    - **eps**: fixed norm parameter, None to calibrate
    '''
    kind: Optional[GroupKind] = None
    params: dict = field(default_factory=dict)
    matrices: Optional[list] = None
    eps: Optional[float] = None


@dataclass(frozen=True, eq=False)
class FieldSource:
    kind: FieldKind
    params: dict = field(default_factory=dict)
    path: Optional[Path] = None


@dataclass(frozen=True, eq=False)
class DatumSource:
    kind: DatumKind
    params: dict = field(default_factory=dict)
    paths: tuple[Path, ...] = ()


@dataclass(frozen=True, eq=False)
class Scenario:
    """
    A validated verification scenario, loaded from one TOML file.

    Attributes:
        name:
            Scenario name, defaults to the file stem.
        group, field_source, datum_source:
            Sources of the group, of φ and of w.
        domain:
            Sampling grid of φ over W (axes x2..xm, y1..yn).
        j_list:
            Horizontal directions checked, each in 2..m.
        checks:
            Checks to run. They execute in the fixed order gate, lipschitz,
            residual, lagrangian, mollification.
        mollify_eps:
            ε values of the mollification check.
        seed:
            Seed of every random sampler in the run.
    """
    name: str
    group: GroupSource
    field_source: FieldSource
    datum_source: DatumSource
    domain: Grid
    j_list: tuple[int, ...]
    checks: tuple[CheckName, ...]
    resolutions: Resolutions = field(default_factory=Resolutions)
    tolerances: Tolerances = field(default_factory=Tolerances)
    mollify_eps: tuple[float, ...] = (0.2, 0.1, 0.05)
    seed: int = 0
    source_path: Optional[Path] = None

    def to_dict(self) -> dict:
        """Canonical, JSON-ready description used for provenance hashing."""
        return jsonable({
            "name": self.name,
            "group": asdict(self.group),
            "field": asdict(self.field_source),
            "datum": asdict(self.datum_source),
            "domain": self.domain.to_dict(),
            "j_list": list(self.j_list),
            "checks": [c.value for c in self.checks],
            "resolutions": asdict(self.resolutions),
            "tolerances": asdict(self.tolerances),
            "mollify_eps": list(self.mollify_eps),
            "seed": self.seed,
        })


def jsonable(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return value.as_posix()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value
