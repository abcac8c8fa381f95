"""Command-line driver: runs, diagnostic sweeps and validation checks.

Exit codes: 0 success, 1 validation failure (bad config, arguments or
incompatible trajectory), 2 runtime error (CFL abort, NaN, corrupt or
missing files).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, config_hash, normalized_text, parse_config, resolve_dt
from .diagnostics import (
    DiagnosticsError,
    DyadicLadder,
    ParabolicCylinder,
    commutation_check,
    commutation_pair,
    decay_law,
    l2loc_convergence,
    profile_collapse,
    scaling_residual,
    serrin_norm,
)
from .initial_data import InitialDataError, sample_u0_alpha
from .snapshot_io import SnapshotFormatError, load_trajectory, save_trajectory, write_csv
from .solver import CFL_FACTOR, SolverError, run as solver_run
from .spectral import SpectralError, sup_norm


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


_VALIDATION_ERRORS = (ConfigError, DiagnosticsError, InitialDataError, SpectralError, ValueError)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ssns", description=__doc__)
    p.add_argument("--version", action="version", version=f"ssns {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="integrate a configured run (or sweep)")
    runp.add_argument("config", type=Path)

    diag = sub.add_parser("diagnose", help="diagnostics over a trajectory directory")
    dsub = diag.add_subparsers(dest="diagnostic", required=True)

    d = dsub.add_parser("scaling", help="dyadic scaling residuals S(lambda, t)")
    d.add_argument("traj", type=Path)
    d.add_argument("--lambda-max-exp", type=int, default=3)
    d.add_argument("--ball", type=float, default=None, help="core ball radius (default L/8)")

    d = dsub.add_parser("decay", help="sup-norm decay law")
    d.add_argument("traj", type=Path)
    d.add_argument("--window", type=str, default=None, help="t1,t2 fit window")

    d = dsub.add_parser("profile", help="similarity profiles and collapse matrix")
    d.add_argument("traj", type=Path)
    d.add_argument("--times", type=str, required=True, help="comma-separated snapshot times")
    d.add_argument("--half-width", type=float, default=None, help="similarity lattice half width")
    d.add_argument("--points", type=int, default=33)

    d = dsub.add_parser("serrin", help="L^p_x L^q_t norm on a parabolic cylinder")
    d.add_argument("traj", type=Path)
    d.add_argument("--center", type=str, required=True, help="x,y,z,t")
    d.add_argument("--r", type=float, required=True)
    d.add_argument("--p", type=str, required=True)
    d.add_argument("--q", type=str, required=True)

    d = dsub.add_parser("data-convergence", help="L^2 distance to the data on an annulus")
    d.add_argument("traj", type=Path)
    d.add_argument("--annulus", type=str, required=True, help="r1,r2")

    chk = sub.add_parser("check", help="paired-run identity checks")
    csub = chk.add_subparsers(dest="check", required=True)
    d = csub.add_parser("commutation", help="mollifier/scaling commutation experiment")
    d.add_argument("config", type=Path)
    d.add_argument("--lambda", dest="lam", type=float, default=0.5)
    d.add_argument("--core", type=float, default=None, help="core radius on the wide box")

    val = sub.add_parser("validate", help="built-in validation oracles")
    val.add_argument("target", choices=["taylor-green", "heat", "projector"])
    val.add_argument("--n", type=int, default=None)
    val.add_argument("--dt", type=float, default=None)
    val.add_argument("--t-end", type=float, default=None)
    return p


def _floats(raw: str, count: int | None = None):
    vals = tuple(float(v) for v in raw.split(","))
    if count is not None and len(vals) != count:
        raise ConfigError(f"expected {count} comma-separated values, got {len(vals)}")
    return vals


def _exponent(raw: str) -> float:
    if raw.lower() in ("inf", "infinity"):
        return math.inf
    return float(raw)


def _provenance(cfg_hash: str, command: str) -> dict:
    return {"config_hash": cfg_hash, "generator": f"ssns {__version__}", "command": command}


def _run_single(run_cfg: RunConfig, outdir: Path):
    u0 = sample_u0_alpha(run_cfg.data_spec())
    dt = resolve_dt(run_cfg, sup_norm(u0))
    traj = solver_run(u0, run_cfg.solver_config(dt), run_cfg.data_spec())
    from dataclasses import replace

    save_trajectory(traj, outdir, replace(run_cfg, dt=dt, directory=str(outdir)))
    print(f"wrote {len(traj.fields)} snapshots to {outdir} (dt={dt:.6g})")


def cmd_run(args) -> int:
    text = args.config.read_text()
    run_cfg = parse_config(text)
    base = Path(run_cfg.directory)
    if run_cfg.has_sweep():
        for label, sub_cfg in run_cfg.expand_sweep():
            _run_single(sub_cfg, base / label)
    else:
        _run_single(run_cfg, base)
    return 0


def cmd_scaling(args) -> int:
    traj, run_cfg, chash = load_trajectory(args.traj)
    if len(traj.fields) < 2:
        raise DiagnosticsError("scaling diagnostics need at least 2 snapshots")
    ball = args.ball if args.ball is not None else run_cfg.length / 8
    rep = scaling_residual(traj, DyadicLadder(args.lambda_max_exp), ball)
    rows = [(lam, t, s) for (lam, t, s) in rep.rows]
    prov = _provenance(chash, "diagnose scaling")
    prov["ball_radius"] = repr(ball)
    write_csv(Path(args.traj) / "scaling.csv", ["lambda", "t", "residual"], rows, prov)
    print(f"scaling.csv: {len(rows)} rows, ball radius {ball:.6g}")
    return 0


def cmd_decay(args) -> int:
    traj, run_cfg, chash = load_trajectory(args.traj)
    window = _floats(args.window, 2) if args.window else None
    rep = decay_law(traj, window)
    rows = [
        (t, s, sts, rep.slope)
        for t, s, sts in zip(rep.t, rep.sup, rep.sqrt_t_sup)
    ]
    prov = _provenance(chash, "diagnose decay")
    prov["fit_window"] = f"{rep.window[0]!r}:{rep.window[1]!r}"
    write_csv(
        Path(args.traj) / "decay.csv",
        ["t", "sup_norm", "sqrt_t_times_sup", "fitted_slope"],
        rows,
        prov,
    )
    print(f"decay.csv: fitted slope {rep.slope:.4f}, variation {rep.variation:.4f}")
    return 0


def cmd_profile(args) -> int:
    traj, run_cfg, chash = load_trajectory(args.traj)
    times = _floats(args.times)
    if len(times) < 1:
        raise DiagnosticsError("need at least one profile time")
    half_width = args.half_width
    if half_width is None:
        # widest lattice that stays in the core at the latest requested time
        half_width = (run_cfg.length / 4) / math.sqrt(max(times))
    profs, dist = profile_collapse(traj, times, half_width, args.points)
    prov = _provenance(chash, "diagnose profile")
    prov["half_width"] = repr(half_width)
    rows = [
        (times[i], times[j], dist[i, j])
        for i in range(len(times))
        for j in range(len(times))
        if i < j
    ]
    write_csv(Path(args.traj) / "profile_collapse.csv", ["t_i", "t_j", "distance"], rows, prov)
    for i, prof in enumerate(profs):
        p = dict(prov)
        p["t"] = repr(prof.t)
        p["spacing"] = repr(prof.spacing)
        field_rows = []
        m = len(prof.y)
        for a in range(m):
            for b in range(m):
                for c in range(m):
                    field_rows.append(
                        (
                            prof.y[a],
                            prof.y[b],
                            prof.y[c],
                            prof.values[0, a, b, c],
                            prof.values[1, a, b, c],
                            prof.values[2, a, b, c],
                        )
                    )
        write_csv(
            Path(args.traj) / f"profile_{i:02d}.csv",
            ["y1", "y2", "y3", "u1", "u2", "u3"],
            field_rows,
            p,
        )
    off = dist[~np.eye(len(times), dtype=bool)] if len(times) > 1 else np.zeros(0)
    print(
        f"profiles: {len(profs)}, max pairwise distance "
        f"{float(off.max()) if off.size else 0.0:.4e}"
    )
    return 0


def cmd_serrin(args) -> int:
    traj, run_cfg, chash = load_trajectory(args.traj)
    cx, cy, cz, ct = _floats(args.center, 4)
    cyl = ParabolicCylinder((cx, cy, cz), ct, args.r)
    norm = serrin_norm(traj, cyl, _exponent(args.p), _exponent(args.q))
    rows = [(cx, cy, cz, ct, args.r, norm.p, norm.q, norm.value, norm.admissible)]
    write_csv(
        Path(args.traj) / "serrin.csv",
        ["center_x", "center_y", "center_z", "center_t", "r", "p", "q", "value", "admissible"],
        rows,
        _provenance(chash, "diagnose serrin"),
    )
    print(f"serrin norm {norm.value:.6e} (admissible={norm.admissible})")
    return 0


def cmd_data_convergence(args) -> int:
    traj, run_cfg, chash = load_trajectory(args.traj)
    r1, r2 = _floats(args.annulus, 2)
    u0 = sample_u0_alpha(run_cfg.data_spec())
    times, vals, ref = l2loc_convergence(traj, u0, r1, r2)
    rows = [(t, v, v / ref if ref > 0 else 0.0) for t, v in zip(times, vals)]
    prov = _provenance(chash, "diagnose data-convergence")
    prov["annulus"] = f"{r1!r}:{r2!r}"
    prov["ref_integral"] = repr(ref)
    write_csv(Path(args.traj) / "l2loc.csv", ["t", "l2loc_sq", "l2loc_sq_rel"], rows, prov)
    print(f"l2loc.csv: earliest value {vals[0]:.4e} ({vals[0] / ref:.3e} of data)")
    return 0


def cmd_commutation(args) -> int:
    text = args.config.read_text()
    run_cfg = parse_config(text)
    if not 0 < args.lam <= 1:
        raise ConfigError("--lambda must lie in (0, 1]")
    data_spec = run_cfg.data_spec()
    base_cfg = run_cfg.solver_config(dt=1.0)
    spec_b, cfg_b = commutation_pair(data_spec, base_cfg, args.lam)
    bound_a = CFL_FACTOR * (run_cfg.length / run_cfg.n) / sup_norm(sample_u0_alpha(data_spec))
    bound_b = CFL_FACTOR * (spec_b.grid.h) / sup_norm(sample_u0_alpha(spec_b))
    dt = run_cfg.dt if run_cfg.dt is not None else 0.8 * min(bound_a, args.lam**2 * bound_b)
    rep = commutation_check(data_spec, run_cfg.solver_config(dt=dt), args.lam, args.core)
    outdir = Path(run_cfg.directory)
    outdir.mkdir(parents=True, exist_ok=True)
    prov = _provenance(config_hash(normalized_text(run_cfg)), "check commutation")
    prov["lambda"] = repr(args.lam)
    rows = list(zip(rep.times, rep.discrepancy))
    write_csv(outdir / "commutation.csv", ["t", "discrepancy"], rows, prov)
    print(f"commutation sup discrepancy {rep.sup:.4e} (lambda={args.lam})")
    return 0


def cmd_validate(args) -> int:
    from .validation import validate_heat, validate_projector, validate_taylor_green

    if args.target == "projector":
        r = validate_projector(n=args.n or 32)
        ok = r["idempotence"] <= 1e-12 and r["annihilation"] <= 1e-12
        print(f"idempotence residual   {r['idempotence']:.3e}")
        print(f"annihilation residual  {r['annihilation']:.3e}")
        print(f"orthogonality residual {r['orthogonality']:.3e}")
    elif args.target == "heat":
        r = validate_heat(n=args.n or 32)
        ok = r["semigroup"] <= 1e-13 and r["run_vs_semigroup"] <= 1e-12
        print(f"semigroup residual     {r['semigroup']:.3e}")
        print(f"run vs semigroup error {r['run_vs_semigroup']:.3e}")
    else:
        r = validate_taylor_green(
            n=args.n or 64, dt=args.dt or 2e-3, t_end=args.t_end or 0.5
        )
        ok = r["rel_l2_error"] <= 1e-6 and r["energy_balance"] <= 1e-6
        print(f"relative L2 error      {r['rel_l2_error']:.3e}")
        print(f"energy balance residual {r['energy_balance']:.3e}")
        print(f"max divergence          {r['max_div_sup']:.3e}")
        print(f"runtime                 {r['runtime_s']:.1f}s")
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "diagnose":
            return {
                "scaling": cmd_scaling,
                "decay": cmd_decay,
                "profile": cmd_profile,
                "serrin": cmd_serrin,
                "data-convergence": cmd_data_convergence,
            }[args.diagnostic](args)
        if args.command == "check":
            return cmd_commutation(args)
        if args.command == "validate":
            return cmd_validate(args)
        raise ConfigError(f"unknown command {args.command}")
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, SnapshotFormatError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
