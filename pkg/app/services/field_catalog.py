"""Catalog of test fields φ and data w.

Every analytic entry has a closed form, so scenario results can be compared
against hand-derived values. Points handed to the catalog functions are W
points (x_2..x_m, y_1..y_n) unless noted otherwise.
"""

import logging
from typing import Callable, Optional

import numpy as np

from app.domain.enums import DatumKind, FieldKind, Interpolation
from app.domain.exceptions import BadParams, ConfigError, DimensionMismatch
from app.domain.models.Datum import Datum
from app.domain.models.GroupSpec import GroupSpec
from app.domain.models.ScalarField import Grid, ScalarField, w_axis_names
from app.domain.models.Scenario import DatumSource, FieldSource
from app.domain.rules.graph_geometry import graph_point
from app.domain.rules.intrinsic_ops import gradient_from_levelset, solve_levelset_graph
from app.repository.fields_repo import load_field

logger = logging.getLogger(__name__)

GroupFn = Callable[[np.ndarray], np.ndarray]


def levelset_function(spec: GroupSpec, name: str, params: Optional[dict] = None) -> tuple[GroupFn, GroupFn]:
    """
    (f, ∇f) for a named level-set function on G, points (x_1..x_m, y_1..y_n).

    Every entry has ∂_{x_1} f = 1, so the level set is an intrinsic graph over W.
    """
    params = params or {}
    c = float(params.get("c", 0.0))
    k = float(params.get("k", 1.0))
    dim = spec.dim
    m = spec.m

    def unit(index: int):
        def grad(p):
            out = np.zeros(np.shape(p))
            out[..., 0] = 1.0
            if index is not None:
                out[..., index] = -k
            return out
        return grad

    if name == "x1_minus_const":
        return (lambda p: p[..., 0] - c), unit(None)
    if name == "x1_minus_x2":
        return (lambda p: p[..., 0] - k * p[..., 1]), unit(1)
    if name == "x1_minus_y1":
        return (lambda p: p[..., 0] - k * p[..., m]), unit(m)
    if name == "x1_minus_half_x2_squared":
        def grad_half(p):
            out = np.zeros(np.shape(p))
            out[..., 0] = 1.0
            out[..., 1] = -p[..., 1]
            return out
        return (lambda p: p[..., 0] - 0.5 * p[..., 1] ** 2), grad_half
    if name == "x1_minus_sin_x2":
        def grad_sin(p):
            out = np.zeros(np.shape(p))
            out[..., 0] = 1.0
            out[..., 1] = -np.cos(p[..., 1])
            return out
        return (lambda p: p[..., 0] - np.sin(p[..., 1])), grad_sin
    raise BadParams(f"unknown level-set function {name!r} for a group of dimension {dim}")


def build_field(spec: GroupSpec, source: FieldSource, grid: Grid) -> ScalarField:
    """φ on the scenario grid."""
    if grid.ndim != spec.w_dim:
        raise ConfigError(f"domain has {grid.ndim} axes, W needs {spec.w_dim}")
    names = w_axis_names(spec.m, spec.n)
    params = source.params
    y1 = spec.m - 1

    if source.kind is FieldKind.CONSTANT:
        value = float(params.get("value", 0.0))
        return ScalarField.from_function(grid, lambda a: np.full(len(a), value), axis_names=names)
    if source.kind is FieldKind.LINEAR_X2:
        slope = float(params.get("slope", 1.0))
        offset = float(params.get("offset", 0.0))
        return ScalarField.from_function(grid, lambda a: slope * a[:, 0] + offset, axis_names=names)
    if source.kind is FieldKind.ABS_Y_POWER:
        power = float(params.get("power", 0.5))
        return ScalarField.from_function(grid, lambda a: np.abs(a[:, y1]) ** power, axis_names=names)
    if source.kind is FieldKind.SQRT_BURGERS:
        return ScalarField.from_function(
            grid, lambda a: 2.0 * np.sign(a[:, y1]) * np.sqrt(np.abs(a[:, y1])), axis_names=names
        )
    if source.kind is FieldKind.LEVELSET:
        f, _ = levelset_function(spec, params.get("f", "x1_minus_x2"), params)
        bracket = tuple(params.get("bracket", (-10.0, 10.0)))
        return solve_levelset_graph(spec, f, grid, bracket=bracket, axis_names=names)
    if source.kind is FieldKind.CSV:
        field = load_field(source.path)
        if field.grid.ndim != spec.w_dim:
            raise DimensionMismatch(f"{source.path} has {field.grid.ndim} axes, W needs {spec.w_dim}")
        return field
    raise ConfigError(f"unsupported field kind {source.kind}")


def build_datum(
    spec: GroupSpec,
    source: DatumSource,
    grid: Grid,
    field: ScalarField,
) -> Optional[Datum]:
    """
    w = (w_2, ..., w_m) on the scenario grid.

    EXTRACTED data are produced by the Lagrangian construction and are None here.
    """
    names = w_axis_names(spec.m, spec.n)
    params = source.params
    count = spec.m - 1

    if source.kind is DatumKind.EXTRACTED:
        return None
    if source.kind is DatumKind.CONSTANT:
        values = params.get("value", 0.0)
        values = list(values) if isinstance(values, (list, tuple)) else [values] * count
        if len(values) != count:
            raise ConfigError(f"constant datum needs {count} values, got {len(values)}")
        return Datum.from_fields([
            ScalarField.from_function(grid, lambda a, v=float(v): np.full(len(a), v), axis_names=names)
            for v in values
        ])
    if source.kind is DatumKind.LEVELSET_GRADIENT:
        f, grad_f = levelset_function(spec, params.get("f", "x1_minus_x2"), params)

        def component(j: int):
            def w_j(a: np.ndarray) -> np.ndarray:
                return gradient_from_levelset(spec, f, grad_f, graph_point(spec, field, a))[..., j - 2]
            return w_j

        return Datum.from_fields([
            ScalarField.from_function(grid, component(j), axis_names=names)
            for j in range(2, spec.m + 1)
        ])
    if source.kind is DatumKind.CSV:
        if len(source.paths) != count:
            raise ConfigError(f"csv datum needs {count} files, got {len(source.paths)}")
        return Datum.from_fields([load_field(p) for p in source.paths])
    raise ConfigError(f"unsupported datum kind {source.kind}")


def extracted_datum(spec: GroupSpec, wbars: dict[int, ScalarField]) -> Datum:
    """Datum assembled from extracted w̄_j; every direction 2..m needs one."""
    fields = []
    for j in range(2, spec.m + 1):
        wbar = wbars.get(j)
        if wbar is None:
            raise ConfigError(f"no extracted datum for direction {j}")
        fields.append(wbar)
    logger.debug("assembled extracted datum for %d directions", len(fields))
    return Datum.from_fields(fields)
