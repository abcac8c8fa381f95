"""Binary snapshot format and trajectory persistence.

Snapshot layout: header ``magic "SSNS", version u32, n u32, L f64,
t f64, ncomp u32`` followed by ncomp * n^3 little-endian float64 in
x-fastest row-major order, physical representation. Round-trips are
byte-exact; storage precision deliberately matches compute precision
because diagnostics subtract nearly equal fields.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .config import RunConfig, config_hash, normalized_text, parse_config
from .solver import SolverConfig, Trajectory
from .spectral import PHYSICAL, Grid, VelocityField

MAGIC = b"SSNS"
VERSION = 1
_HEADER = struct.Struct("<4sIIddI")


class SnapshotFormatError(RuntimeError):
    pass


def write_snapshot(path, field: VelocityField):
    field_p = field
    if field.rep != PHYSICAL:
        from .spectral import to_physical

        field_p = to_physical(field)
    n = field_p.grid.n
    header = _HEADER.pack(MAGIC, VERSION, n, field_p.grid.length, field_p.t, 3)
    with open(path, "wb") as fh:
        fh.write(header)
        for c in range(3):
            comp = np.ascontiguousarray(field_p.data[c].transpose(2, 1, 0), dtype="<f8")
            fh.write(comp.tobytes())


def read_snapshot(path) -> VelocityField:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise SnapshotFormatError(f"{path}: truncated header")
        magic, version, n, length, t, ncomp = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise SnapshotFormatError(f"{path}: unsupported version {version}")
        if ncomp != 3:
            raise SnapshotFormatError(f"{path}: expected 3 components, got {ncomp}")
        payload = fh.read()
    expected = 3 * n**3 * 8
    if len(payload) != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {len(payload)} bytes, header implies {expected}"
        )
    flat = np.frombuffer(payload, dtype="<f8")
    data = np.empty((3, n, n, n))
    per = n**3
    for c in range(3):
        data[c] = flat[c * per : (c + 1) * per].reshape(n, n, n).transpose(2, 1, 0)
    grid = Grid(n, length)
    return VelocityField(grid, data, PHYSICAL, t, divergence_free=True)


def write_csv(path, columns, rows, provenance: dict | None = None):
    """CSV with '#'-prefixed provenance comments, ',' separator, '.' decimals."""
    with open(path, "w") as fh:
        for key, val in (provenance or {}).items():
            fh.write(f"# {key}={val}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def read_csv(path):
    """Returns (comments dict, column names, rows of floats-where-possible)."""
    comments = {}
    columns = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, val = body.split("=", 1)
                    comments[key.strip()] = val.strip()
                continue
            cells = line.split(",")
            if columns is None:
                columns = cells
                continue
            parsed = []
            for c in cells:
                try:
                    parsed.append(float(c))
                except ValueError:
                    parsed.append(c)
            rows.append(parsed)
    if columns is None:
        raise SnapshotFormatError(f"{path}: empty CSV")
    return comments, columns, rows


def save_trajectory(traj: Trajectory, outdir, run_cfg: RunConfig):
    """Persist snapshots, the per-step energy series and the normalized config."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    text = normalized_text(run_cfg)
    (out / "config.ini").write_text(text)
    for i, f in enumerate(traj.fields):
        write_snapshot(out / f"snapshot_{i:04d}.ssns", f)
    prov = {"config_hash": config_hash(text), "schema": "energy"}
    rows = list(
        zip(traj.series.t, traj.series.energy, traj.series.grad_sq, traj.series.div_sup)
    )
    write_csv(out / "energy.csv", ["t", "energy", "grad_sq", "div_sup"], rows, prov)


def load_trajectory(dirpath) -> tuple[Trajectory, RunConfig, str]:
    """Load a trajectory directory, re-validating provenance consistency."""
    d = Path(dirpath)
    cfg_path = d / "config.ini"
    if not cfg_path.exists():
        raise SnapshotFormatError(f"{d}: missing config.ini provenance")
    text = cfg_path.read_text()
    run_cfg = parse_config(text)
    snaps = sorted(d.glob("snapshot_*.ssns"))
    if not snaps:
        raise SnapshotFormatError(f"{d}: no snapshot files")
    fields = [read_snapshot(p) for p in snaps]
    grid = fields[0].grid
    if grid.n != run_cfg.n or abs(grid.length - run_cfg.length) > 1e-12 * run_cfg.length:
        raise SnapshotFormatError(f"{d}: snapshot grid disagrees with config provenance")
    times = [f.t for f in fields]
    dt = run_cfg.dt if run_cfg.dt is not None else times[0]
    solver_cfg = SolverConfig(
        eps=run_cfg.epsilon,
        dt=dt,
        t_end=run_cfg.t_end,
        snapshot_times=tuple(times),
        nonlinear_on=run_cfg.nonlinear,
    )
    traj = Trajectory(grid, times, fields, solver_cfg, run_cfg.data_spec())
    energy_path = d / "energy.csv"
    if energy_path.exists():
        _, cols, rows = read_csv(energy_path)
        if cols[:4] == ["t", "energy", "grad_sq", "div_sup"]:
            for row in rows:
                traj.series.t.append(row[0])
                traj.series.energy.append(row[1])
                traj.series.grad_sq.append(row[2])
                traj.series.div_sup.append(row[3])
    return traj, run_cfg, config_hash(text)
