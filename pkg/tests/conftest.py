# tests/conftest.py
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import pytest

from app.domain.enums import GroupKind
from app.domain.models.Datum import Datum
from app.domain.models.GroupSpec import GroupSpec
from app.domain.models.ScalarField import Grid, ScalarField, w_axis_names
from app.domain.rules.group_spec import make_builtin

# Run all unit tests with pytest:
#   python -m pytest tests/unit
# Run all unit tests with coverage:
#   python -m pytest --cov=app --cov-report=term-missing tests/unit

PROJECT_ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = PROJECT_ROOT / "scenarios"
GROUP_DIR = PROJECT_ROOT / "groups"


@pytest.fixture
def fixed_seed() -> int:
    """
    Shared sampler seed so random property runs are reproducible.
    """
    return 20250101


@pytest.fixture
def rng(fixed_seed: int) -> np.random.Generator:
    return np.random.default_rng(fixed_seed)


@pytest.fixture
def spec_factory() -> Callable[..., GroupSpec]:
    """
    Factory fixture for builtin groups with a fixed norm parameter.

    Example usage:
        spec = spec_factory(kind=GroupKind.FREE2, m=3)
    """
    def _create(
        *, # Enforce keyword arguments
        kind: GroupKind = GroupKind.HEISENBERG,
        eps: float = 0.5,
        **params,
    ) -> GroupSpec:
        return make_builtin(kind, {**params, "eps": eps})

    return _create


@pytest.fixture
def h1(spec_factory) -> GroupSpec:
    """First Heisenberg group, b_12 = 1, so D^φ_2 = ∂_2 + φ ∂_y."""
    return spec_factory(kind=GroupKind.HEISENBERG, k=1)


@pytest.fixture
def burgers_group(spec_factory) -> GroupSpec:
    """Corank-1 rank-2 group with b^(1)_{12} = +1, so γ' = φ along characteristics."""
    return spec_factory(kind=GroupKind.CORANK1, B=[[0.0, 1.0], [-1.0, 0.0]])


@pytest.fixture
def grid_factory() -> Callable[..., Grid]:
    """
    Factory fixture for lattices over W.

    Example usage:
        grid = grid_factory(lower=(0.0, -1.0), upper=(1.0, 1.0), counts=(21, 41))
    """
    def _create(
        *, # Enforce keyword arguments
        lower: Sequence[float] = (0.0, -1.0),
        upper: Sequence[float] = (1.0, 1.0),
        counts: Sequence[int] = (21, 41),
    ) -> Grid:
        return Grid(lower=tuple(lower), upper=tuple(upper), counts=tuple(counts))

    return _create


@pytest.fixture
def field_factory(grid_factory) -> Callable[..., ScalarField]:
    """
    Factory fixture for analytic fields on a W lattice.

    Example usage:
        phi = field_factory(fn=lambda a: a[:, 0])             # φ = x2
        phi = field_factory(fn=lambda a: np.abs(a[:, 1]) ** 0.25)
    """
    def _create(
        *, # Enforce keyword arguments
        fn: Callable[[np.ndarray], np.ndarray] = lambda a: a[:, 0],
        grid: Optional[Grid] = None,
        m: int = 2,
        n: int = 1,
    ) -> ScalarField:
        grid = grid or grid_factory()
        return ScalarField.from_function(grid, fn, axis_names=w_axis_names(m, n))

    return _create


@pytest.fixture
def datum_factory(field_factory) -> Callable[..., Datum]:
    """
    Factory fixture for constant data w = (w_2, ..., w_m).

    Example usage:
        datum = datum_factory(values=(1.0,))
    """
    def _create(
        *, # Enforce keyword arguments
        values: Sequence[float] = (1.0,),
        grid: Optional[Grid] = None,
        m: int = 2,
        n: int = 1,
    ) -> Datum:
        return Datum.from_fields([
            field_factory(fn=lambda a, v=v: np.full(len(a), v), grid=grid, m=m, n=n)
            for v in values
        ])

    return _create
