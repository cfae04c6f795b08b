"""Scenario files.

One TOML document per scenario:

    name = "h1_linear"
    j = [2]
    checks = ["holder_gate", "lipschitz", "residual", "lagrangian"]
    seed = 0

    [group]        kind + builtin params, or m / n / B
    [field]        kind + params, or kind = "csv" with path
    [datum]        kind + params, or kind = "csv" with paths
    [domain]       lower / upper / counts over W
    [resolutions]  optional overrides
    [tolerances]   optional overrides

Relative paths resolve against the scenario file's directory.
"""

from dataclasses import fields as dataclass_fields, replace
import logging
from pathlib import Path
from typing import Optional, Union

import tomlkit
from tomlkit.exceptions import TOMLKitError

from app.domain.enums import CheckName, DatumKind, FieldKind, GroupKind
from app.domain.exceptions import ConfigError, LabError
from app.domain.models.ScalarField import Grid
from app.domain.models.Scenario import (
    DatumSource,
    FieldSource,
    GroupSource,
    Resolutions,
    Scenario,
    Tolerances,
)
from .groups_repo import group_source_from_table

logger = logging.getLogger(__name__)

REQUIRED_TABLES = ("group", "field", "datum", "domain")


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"scenario file {path} does not exist")
    scenario = parse_scenario(path.read_text(encoding="utf-8"), base_dir=path.parent, default_name=path.stem)
    logger.info("loaded scenario %s from %s", scenario.name, path)
    return replace(scenario, source_path=path)


def parse_scenario(text: str, base_dir: Optional[Path] = None, default_name: str = "scenario") -> Scenario:
    """Validate a scenario document; every problem surfaces as ConfigError."""
    base_dir = Path(base_dir or ".")
    try:
        doc = tomlkit.parse(text).unwrap()
    except TOMLKitError as exc:
        raise ConfigError(f"malformed scenario: {exc}") from exc

    missing = [t for t in REQUIRED_TABLES if t not in doc]
    if missing:
        raise ConfigError(f"scenario is missing tables {missing}")

    try:
        group = group_source_from_table(doc["group"])
        field_source = _field_source(doc["field"], base_dir)
        datum_source = _datum_source(doc["datum"], base_dir)
        domain = Grid(
            lower=tuple(doc["domain"]["lower"]),
            upper=tuple(doc["domain"]["upper"]),
            counts=tuple(doc["domain"]["counts"]),
        )
        checks = tuple(CheckName(c) for c in doc.get("checks", [c.value for c in CheckName]))
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, LabError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc

    j_list = tuple(int(j) for j in doc.get("j", [2]))
    m = group_rank(group)
    if not j_list or any(not 2 <= j <= m for j in j_list):
        raise ConfigError(f"j values {list(j_list)} must lie in 2..{m}")
    if len(set(checks)) != len(checks):
        raise ConfigError("checks must not repeat")

    resolutions = _overrides(Resolutions, doc.get("resolutions", {}))
    tolerances = _overrides(Tolerances, doc.get("tolerances", {}))
    mollify_eps = tuple(float(e) for e in doc.get("mollify_eps", (0.2, 0.1, 0.05)))
    if any(e <= 0 for e in mollify_eps):
        raise ConfigError("mollify_eps values must be positive")

    return Scenario(
        name=str(doc.get("name", default_name)),
        group=group,
        field_source=field_source,
        datum_source=datum_source,
        domain=domain,
        j_list=j_list,
        checks=checks,
        resolutions=resolutions,
        tolerances=tolerances,
        mollify_eps=mollify_eps,
        seed=int(doc.get("seed", 0)),
    )


def group_rank(group: GroupSource) -> int:
    """Horizontal rank m of a group source, without building the group."""
    params = group.params
    if group.kind is None:
        return int(params["m"])
    if group.kind is GroupKind.HEISENBERG:
        return 2 * int(params.get("k", 1))
    if group.kind is GroupKind.CORANK1:
        if "B" not in params:
            raise ConfigError("corank1 group needs a matrix B")
        return len(params["B"])
    if group.kind is GroupKind.FREE2:
        return int(params.get("m", 2))
    return 4


def _field_source(table: dict, base_dir: Path) -> FieldSource:
    table = dict(table)
    kind = FieldKind(table.pop("kind"))
    path = None
    if kind is FieldKind.CSV:
        path = _existing(base_dir, table.pop("path", None))
    return FieldSource(kind=kind, params=table, path=path)


def _datum_source(table: dict, base_dir: Path) -> DatumSource:
    table = dict(table)
    kind = DatumKind(table.pop("kind"))
    paths = ()
    if kind is DatumKind.CSV:
        paths = tuple(_existing(base_dir, p) for p in table.pop("paths", []))
        if not paths:
            raise ConfigError("csv datum needs a paths list, one file per j")
    return DatumSource(kind=kind, params=table, paths=paths)


def _existing(base_dir: Path, value) -> Path:
    if value is None:
        raise ConfigError("csv source needs a path")
    path = Path(value)
    if not path.is_absolute():
        path = base_dir / path
    if not path.is_file():
        raise ConfigError(f"referenced file {path} does not exist")
    return path


def _overrides(cls, table: dict):
    unknown = set(table) - {f.name for f in dataclass_fields(cls)}
    if unknown:
        raise ConfigError(f"unknown {cls.__name__.lower()} keys {sorted(unknown)}")
    defaults = cls()
    values = {}
    for key, value in table.items():
        current = getattr(defaults, key)
        try:
            values[key] = type(current)(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key} must be a {type(current).__name__}") from exc
        if values[key] <= 0:
            raise ConfigError(f"{key} must be positive, got {value}")
    return cls(**values)
