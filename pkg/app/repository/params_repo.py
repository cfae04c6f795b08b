"""Lagrangian parameterizations on disk.

Layout of a parameterization directory:
    chi_<s>.csv   one per vertical component: t, x̂ coordinates, labels, value
    wbar.csv      extracted datum on the image lattice (+ wbar.toml grid sidecar)
    meta.toml     j, reference, lattice axes and the construction record
"""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import tomlkit

from app.domain.exceptions import ConfigError, DimensionMismatch
from app.domain.models.LagrangianParam import LagrangianParam
from app.domain.models.Scenario import jsonable
from .fields_repo import load_field, save_field

logger = logging.getLogger(__name__)


def save_param(
    param: LagrangianParam,
    directory: Union[str, Path],
    scenario_path: Optional[Path] = None,
) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    n = len(param.chi)
    xhat_width = param.xhat_nodes.shape[1]

    axes = [param.t_samples, np.arange(len(param.xhat_nodes))] + list(param.label_axes)
    index = np.stack([g.reshape(-1) for g in np.meshgrid(*axes, indexing="ij")], axis=-1)
    xhat = param.xhat_nodes[index[:, 1].astype(int)]
    coords = np.column_stack([index[:, :1], xhat, index[:, 2:]])
    header = ["t"] + [f"xhat{k}" for k in range(1, xhat_width + 1)] + [f"label{s}" for s in range(1, n + 1)]
    for s, chi in enumerate(param.chi, start=1):
        np.savetxt(directory / f"chi_{s}.csv", np.column_stack([coords, chi.reshape(-1)]),
                   delimiter=",", header=",".join(header + ["value"]), comments="")

    if param.wbar is not None:
        save_field(param.wbar, directory / "wbar.csv")

    doc = tomlkit.document()
    doc["j"] = param.j
    if param.reference is not None:
        doc["reference"] = param.reference
    if scenario_path is not None:
        doc["scenario"] = Path(scenario_path).resolve().as_posix()
    doc["t"] = [float(param.t_samples[0]), float(param.t_samples[-1]), len(param.t_samples)]
    doc["xhat_nodes"] = param.xhat_nodes.tolist()
    doc["label_axes"] = [[float(a[0]), float(a[-1]), len(a)] for a in param.label_axes]
    doc["meta"] = jsonable(param.meta)
    (directory / "meta.toml").write_text(tomlkit.dumps(doc), encoding="utf-8")
    logger.info("wrote parameterization j=%d to %s", param.j, directory)
    return directory


def load_param(directory: Union[str, Path]) -> tuple[LagrangianParam, Optional[Path]]:
    """The parameterization and the scenario file it was built from, when recorded."""
    directory = Path(directory)
    meta_path = directory / "meta.toml"
    if not meta_path.is_file():
        raise ConfigError(f"{directory} is not a parameterization directory")
    doc = tomlkit.parse(meta_path.read_text(encoding="utf-8")).unwrap()

    t_lo, t_hi, t_count = doc["t"]
    t_samples = np.linspace(t_lo, t_hi, int(t_count))
    rows = doc["xhat_nodes"]
    xhat_nodes = np.array(rows, dtype=float).reshape(len(rows), len(rows[0]))
    label_axes = tuple(np.linspace(lo, hi, int(count)) for lo, hi, count in doc["label_axes"])
    shape = (len(t_samples), len(xhat_nodes)) + tuple(len(a) for a in label_axes)

    chi = []
    for s in range(1, len(label_axes) + 1):
        data = np.loadtxt(directory / f"chi_{s}.csv", delimiter=",", skiprows=1, ndmin=2)
        if data.shape[0] != int(np.prod(shape)):
            raise DimensionMismatch(f"chi_{s}.csv does not match the lattice {shape}")
        chi.append(data[:, -1].reshape(shape))

    wbar_path = directory / "wbar.csv"
    wbar = load_field(wbar_path) if wbar_path.is_file() else None
    scenario = doc.get("scenario")
    param = LagrangianParam(
        j=int(doc["j"]),
        t_samples=t_samples,
        xhat_nodes=xhat_nodes,
        label_axes=label_axes,
        chi=tuple(chi),
        reference=doc.get("reference"),
        wbar=wbar,
        meta=dict(doc.get("meta", {})),
    )
    return param, Path(scenario) if scenario else None
