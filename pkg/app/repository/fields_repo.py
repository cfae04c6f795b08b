"""Sampled fields on disk.

A field is a CSV file (one row per lattice node, row-major, columns = axis
names + value) next to a TOML sidecar with the same stem describing the grid.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import tomlkit
from tomlkit.exceptions import TOMLKitError

from app.domain.enums import Interpolation
from app.domain.exceptions import ConfigError, DimensionMismatch
from app.domain.models.ScalarField import Grid, ScalarField

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def sidecar_path(path: PathLike) -> Path:
    return Path(path).with_suffix(".toml")


def save_field(field: ScalarField, path: PathLike) -> Path:
    """Write values (and the valid mask, when present) plus the grid sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(field.axis_names) or [f"a{k}" for k in range(field.grid.ndim)]
    columns = [field.grid.mesh(), field.values.reshape(-1, 1)]
    header = names + ["value"]
    if field.valid is not None:
        columns.append(field.valid.reshape(-1, 1).astype(float))
        header.append("valid")
    np.savetxt(path, np.hstack(columns), delimiter=",", header=",".join(header), comments="")

    doc = tomlkit.document()
    doc["lower"] = list(field.grid.lower)
    doc["upper"] = list(field.grid.upper)
    doc["counts"] = list(field.grid.counts)
    doc["interp"] = field.interp.value if field.interp is not Interpolation.ANALYTIC else "multilinear"
    doc["axis_names"] = names
    sidecar_path(path).write_text(tomlkit.dumps(doc), encoding="utf-8")
    logger.debug("wrote field %s", path)
    return path


def load_field(path: PathLike) -> ScalarField:
    """Read a field written by save_field (or by hand in the same layout)."""
    path = Path(path)
    meta_path = sidecar_path(path)
    if not path.is_file() or not meta_path.is_file():
        raise ConfigError(f"field {path} or its sidecar {meta_path.name} is missing")
    try:
        meta = tomlkit.parse(meta_path.read_text(encoding="utf-8")).unwrap()
        grid = Grid(lower=tuple(meta["lower"]), upper=tuple(meta["upper"]), counts=tuple(meta["counts"]))
        interp = Interpolation(meta.get("interp", "multilinear"))
        with path.open(encoding="utf-8") as handle:
            header = handle.readline().strip().split(",")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (KeyError, ValueError, TOMLKitError) as exc:
        raise ConfigError(f"cannot read field {path}: {exc}") from exc

    if data.shape[0] != int(np.prod(grid.counts)):
        raise DimensionMismatch(f"{path} has {data.shape[0]} rows, grid needs {int(np.prod(grid.counts))}")
    value_col = header.index("value")
    valid = None
    if "valid" in header:
        valid = data[:, header.index("valid")].reshape(grid.counts) > 0.5
    return ScalarField(
        grid=grid,
        values=data[:, value_col].reshape(grid.counts),
        interp=interp,
        valid=valid,
        axis_names=tuple(meta.get("axis_names", header[:value_col])),
    )
