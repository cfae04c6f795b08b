"""Group specification files.

A group file is TOML, either a builtin family

    kind = "heisenberg"
    k = 1

or explicit structure matrices

    m = 2
    n = 1
    B = [[[0.0, 1.0], [-1.0, 0.0]]]

with an optional `eps`.
"""

from pathlib import Path
from typing import Union

import tomlkit
from tomlkit.exceptions import TOMLKitError

from app.domain.enums import GroupKind
from app.domain.exceptions import ConfigError
from app.domain.models.GroupSpec import GroupSpec
from app.domain.models.Scenario import GroupSource


def group_source_from_table(table: dict) -> GroupSource:
    """Map a parsed [group] table (or a whole group file) to a GroupSource."""
    table = dict(table)
    eps = table.pop("eps", None)
    kind = table.pop("kind", None)
    if kind is not None:
        try:
            kind = GroupKind(kind)
        except ValueError as exc:
            raise ConfigError(f"unknown group kind {kind!r}") from exc
        return GroupSource(kind=kind, params=table, eps=eps)

    missing = {"m", "n", "B"} - set(table)
    if missing:
        raise ConfigError(f"group table needs either kind or {sorted(missing)}")
    return GroupSource(
        kind=None,
        params={"m": int(table["m"]), "n": int(table["n"])},
        matrices=table["B"],
        eps=eps,
    )


def load_group_file(path: Union[str, Path]) -> GroupSource:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"group file {path} does not exist")
    try:
        table = tomlkit.parse(path.read_text(encoding="utf-8")).unwrap()
    except TOMLKitError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return group_source_from_table(table)


def save_group_file(spec: GroupSpec, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = tomlkit.document()
    doc["m"] = spec.m
    doc["n"] = spec.n
    doc["eps"] = spec.eps
    doc["B"] = spec.B.tolist()
    path.write_text(tomlkit.dumps(doc), encoding="utf-8")
    return path
