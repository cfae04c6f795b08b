"""Characteristic curves as CSV (t, y1..yn) with a TOML sidecar."""

from pathlib import Path
from typing import Union

import numpy as np
import tomlkit

from app.domain.enums import CurveFlavor
from app.domain.exceptions import ConfigError
from app.domain.models.Characteristic import Characteristic


def save_characteristic(curve: Characteristic, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = curve.gamma.shape[1]
    header = ",".join(["t"] + [f"y{s}" for s in range(1, n + 1)])
    np.savetxt(path, np.column_stack([curve.t_samples, curve.gamma]), delimiter=",",
               header=header, comments="")

    doc = tomlkit.document()
    doc["j"] = curve.j
    doc["xhat"] = [float(v) for v in curve.xhat]
    doc["flavor"] = curve.flavor.value
    doc["truncated"] = curve.truncated
    if curve.gap is not None:
        doc["gap"] = float(curve.gap)
    if curve.t_bar is not None:
        doc["t_bar"] = float(curve.t_bar)
    path.with_suffix(".toml").write_text(tomlkit.dumps(doc), encoding="utf-8")
    return path


def load_characteristic(path: Union[str, Path]) -> Characteristic:
    path = Path(path)
    meta_path = path.with_suffix(".toml")
    if not path.is_file() or not meta_path.is_file():
        raise ConfigError(f"curve {path} or its sidecar is missing")
    meta = tomlkit.parse(meta_path.read_text(encoding="utf-8")).unwrap()
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Characteristic(
        j=int(meta["j"]),
        xhat=np.array(meta["xhat"], dtype=float),
        t_samples=data[:, 0],
        gamma=data[:, 1:],
        flavor=CurveFlavor(meta["flavor"]),
        truncated=bool(meta["truncated"]),
        gap=meta.get("gap"),
        t_bar=meta.get("t_bar"),
    )
