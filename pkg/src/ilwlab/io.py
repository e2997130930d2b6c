"""JSON persistence for field snapshots and trajectories.

Snapshot file::

    {"lambda": 1.0, "n_points": 8, "coeffs": [re, im, re, im, ...]}

with coefficients in ascending mode order -N/2..N/2-1 and every float
written with 17 significant digits (bit-exact round trip).  A trajectory is
a directory of snapshot files plus ``manifest.json``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ilwlab.evolution import EquationSpec, Trajectory, Variant
from ilwlab.fourier import SpectralField, TorusGrid

__all__ = [
    "field_to_json",
    "field_from_json",
    "save_field",
    "load_field",
    "save_trajectory",
    "load_trajectory",
]

MANIFEST = "manifest.json"


def _num(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    return format(float(x), ".17g")


def field_to_json(field: SpectralField) -> str:
    c = field.centered()
    flat = np.empty(2 * c.size)
    flat[0::2] = c.real
    flat[1::2] = c.imag
    return (
        '{"lambda": ' + _num(field.grid.lam)
        + ', "n_points": ' + str(field.grid.n_points)
        + ', "coeffs": [' + ", ".join(_num(v) for v in flat) + "]}"
    )


def field_from_json(text: str) -> SpectralField:
    doc = json.loads(text)
    missing = {"lambda", "n_points", "coeffs"} - set(doc)
    if missing:
        raise ValueError(f"snapshot is missing keys {sorted(missing)}")
    grid = TorusGrid(float(doc["lambda"]), int(doc["n_points"]))
    flat = np.asarray(doc["coeffs"], dtype=float)
    if flat.shape != (2 * grid.n_points,):
        raise ValueError("coefficient list length does not match n_points")
    c = np.fft.ifftshift(flat[0::2] + 1j * flat[1::2])
    mirrored = np.conj(np.roll(c[::-1], 1))
    mirrored[grid.n_points // 2] = c[grid.n_points // 2]
    real = bool(np.array_equal(c, mirrored))
    return SpectralField(grid, c, real)


def save_field(path, field: SpectralField) -> None:
    Path(path).write_text(field_to_json(field))


def load_field(path) -> SpectralField:
    return field_from_json(Path(path).read_text())


def _delta_json(delta: float):
    return "inf" if np.isinf(delta) else delta


def save_trajectory(directory, traj: Trajectory) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    names = []
    for k, f in enumerate(traj.fields):
        name = f"snapshot_{k:05d}.json"
        save_field(d / name, f)
        names.append(name)
    manifest = {
        "eq": traj.eq.variant.value,
        "delta": _delta_json(traj.eq.delta),
        "lambda": traj.grid.lam,
        "n_points": traj.grid.n_points,
        "dt": traj.dt,
        "times": [float(t) for t in traj.times],
        "snapshots": names,
    }
    (d / MANIFEST).write_text(json.dumps(manifest, indent=1))
    return d


def load_trajectory(directory) -> Trajectory:
    d = Path(directory)
    m = json.loads((d / MANIFEST).read_text())
    delta = float(m["delta"]) if m["delta"] != "inf" else np.inf
    variant = Variant(m["eq"])
    eq = EquationSpec(variant) if variant is Variant.BO else EquationSpec(variant, delta)
    fields = [load_field(d / name) for name in m["snapshots"]]
    grid = TorusGrid(float(m["lambda"]), int(m["n_points"]))
    return Trajectory(eq, grid, m["times"], fields)
