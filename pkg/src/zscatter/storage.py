"""On-disk formats: field snapshot files and trajectory directories.

Snapshot file: a 64-byte, space-padded text header

    ZSC1 dim=<d> N=<N> L=<float> t=<float> kind=<c|r>\\n

followed by N^dim complex samples as little-endian float64 (re, im) pairs in
x-fastest ordering.  Real fields are stored with im = 0.

Trajectory directory: ``meta.json`` (grid, stepper config, time list, field
file map) plus one snapshot file per stored time per field.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .grids import Grid

HEADER_BYTES = 64
MAGIC = "ZSC1"


def write_field_snapshot(path: str | os.PathLike, values: np.ndarray, grid: Grid, t: float, kind: str | None = None) -> None:
    if kind is None:
        kind = "r" if not np.iscomplexobj(values) else "c"
    if kind not in ("c", "r"):
        raise ValueError(f"kind must be 'c' or 'r', got {kind!r}")
    header = (
        f"{MAGIC} dim={grid.dim} N={grid.points_per_axis} "
        f"L={grid.box_half_width:.17g} t={t:.17g} kind={kind}"
    )
    if len(header) > HEADER_BYTES - 1:
        raise ValueError("snapshot header does not fit in 64 bytes")
    header = header.ljust(HEADER_BYTES - 1) + "\n"
    payload = np.ascontiguousarray(values, dtype=np.complex128).astype("<c16")
    if kind == "r":
        payload = payload.real.astype("<c16")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload.tobytes())


def read_field_snapshot(path: str | os.PathLike) -> tuple[np.ndarray, Grid, float, str]:
    with open(path, "rb") as fh:
        raw = fh.read(HEADER_BYTES)
        if len(raw) != HEADER_BYTES:
            raise ValueError(f"{path}: truncated header")
        header = raw.decode("ascii").strip()
        tokens = header.split()
        if not tokens or tokens[0] != MAGIC:
            raise ValueError(f"{path}: bad magic {tokens[:1]}")
        kv = dict(tok.split("=", 1) for tok in tokens[1:])
        dim = int(kv["dim"])
        n = int(kv["N"])
        box = float(kv["L"])
        t = float(kv["t"])
        kind = kv["kind"]
        count = n ** dim
        data = np.frombuffer(fh.read(count * 16), dtype="<c16")
    if data.size != count:
        raise ValueError(f"{path}: expected {count} samples, got {data.size}")
    grid = Grid(dim, n, box)
    values = data.reshape(grid.shape).astype(np.complex128)
    if kind == "r":
        values = np.ascontiguousarray(values.real)
    return values, grid, t, kind


def save_trajectory(traj, directory: str | os.PathLike, extra: dict | None = None) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    files: dict[str, list[str]] = {}
    for name, arrays in traj.fields.items():
        files[name] = []
        for i, (t, arr) in enumerate(zip(traj.times, arrays)):
            fname = f"{name}_{i:06d}.zsc"
            write_field_snapshot(d / fname, arr, traj.grid, float(t))
            files[name].append(fname)
    meta = {
        "format": "ZSCTRAJ1",
        "kind": traj.kind,
        "grid": {
            "dim": traj.grid.dim,
            "N": traj.grid.points_per_axis,
            "L": traj.grid.box_half_width,
        },
        "cfg": traj.cfg_meta,
        "times": [float(t) for t in traj.times],
        "fields": files,
    }
    if extra:
        meta["extra"] = extra
    with open(d / "meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


def load_trajectory(directory: str | os.PathLike):
    from .dynamics import Trajectory

    d = Path(directory)
    with open(d / "meta.json") as fh:
        meta = json.load(fh)
    if meta.get("format") != "ZSCTRAJ1":
        raise ValueError(f"{directory}: not a trajectory directory")
    gm = meta["grid"]
    grid = Grid(gm["dim"], gm["N"], gm["L"])
    times = [float(t) for t in meta["times"]]
    fields: dict[str, list[np.ndarray]] = {}
    for name, fnames in meta["fields"].items():
        arrays = []
        for fname in fnames:
            values, fgrid, _, _ = read_field_snapshot(d / fname)
            if fgrid != grid:
                raise ValueError(f"{fname}: grid mismatch inside trajectory")
            arrays.append(values)
        fields[name] = arrays
    traj = Trajectory(grid=grid, kind=meta["kind"], cfg_meta=meta.get("cfg", {}))
    for t, row in zip(times, zip(*[fields[k] for k in sorted(fields)])):
        traj.append(t, dict(zip(sorted(fields), row)))
    traj.finalize()
    return traj
