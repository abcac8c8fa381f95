"""Closed-form benchmark flows and solver validation routines.

The embedded 2D Taylor-Green vortex is an exact Navier-Stokes solution
on the periodic box (its advection term is a perfect gradient), which
makes it the independent oracle for the time integrator, the pressure
solve and the energy balance.
"""

from __future__ import annotations

import time

import numpy as np

from .spectral import (
    PHYSICAL,
    Grid,
    ScalarField,
    VelocityField,
    divergence_sup,
    inner_product,
    l2_norm,
    leray_project,
    random_divergence_free,
    to_physical,
    to_spectral,
)
from .solver import SolverConfig, energy_balance_residual, run


def taylor_green_field(grid: Grid, t: float = 0.0, amplitude: float = 1.0) -> VelocityField:
    """Embedded 2D Taylor-Green vortex at the lowest box wavenumber."""
    kappa = 2 * np.pi / grid.length
    x = grid.x
    cx, sx = np.cos(kappa * x).reshape(-1, 1, 1), np.sin(kappa * x).reshape(-1, 1, 1)
    cy, sy = np.cos(kappa * x).reshape(1, -1, 1), np.sin(kappa * x).reshape(1, -1, 1)
    decay = amplitude * np.exp(-2 * kappa**2 * t)
    ones_z = np.ones((1, 1, grid.n))
    data = np.zeros(grid.physical_shape(3))
    data[0] = decay * cx * sy * ones_z
    data[1] = -decay * sx * cy * ones_z
    return VelocityField(grid, data, PHYSICAL, t, divergence_free=True)


def taylor_green_pressure(grid: Grid, t: float = 0.0, amplitude: float = 1.0) -> ScalarField:
    """Exact zero-mean pressure of the Taylor-Green vortex."""
    kappa = 2 * np.pi / grid.length
    x = grid.x
    c2x = np.cos(2 * kappa * x).reshape(-1, 1, 1)
    c2y = np.cos(2 * kappa * x).reshape(1, -1, 1)
    vals = -0.25 * amplitude**2 * np.exp(-4 * kappa**2 * t) * (c2x + c2y)
    return ScalarField(grid, vals * np.ones((1, 1, grid.n)), PHYSICAL, t)


def two_scale_field(grid: Grid, amplitude: float = 1.0) -> VelocityField:
    """Two superposed Taylor-Green vortices at wavenumbers k and 2k.

    Unlike a single vortex, the cross-scale advection is not a pure
    gradient, so the time integrator sees a genuinely active
    nonlinearity; used for temporal-order measurement.
    """
    kappa = 2 * np.pi / grid.length
    x = grid.x
    data = np.zeros(grid.physical_shape(3))
    for m, amp in ((1, amplitude), (2, 0.5 * amplitude)):
        cx = np.cos(m * kappa * x).reshape(-1, 1, 1)
        sx = np.sin(m * kappa * x).reshape(-1, 1, 1)
        cy = np.cos(m * kappa * x).reshape(1, -1, 1)
        sy = np.sin(m * kappa * x).reshape(1, -1, 1)
        data[0] += amp * cx * sy
        data[1] += -amp * sx * cy
    return VelocityField(grid, data * np.ones((1, 1, grid.n)), PHYSICAL, 0.0, divergence_free=True)


def relative_l2_error(u: VelocityField, ref: VelocityField) -> float:
    diff = u.data - ref.data
    return float(np.sqrt(np.sum(diff**2) / np.sum(ref.data**2)))


def validate_taylor_green(n: int = 64, dt: float = 2e-3, t_end: float = 0.5) -> dict:
    """Integrate the vortex and compare against the closed form."""
    grid = Grid(n, 2 * np.pi)
    cfg = SolverConfig(eps=0.0, dt=dt, t_end=t_end, snapshot_times=(t_end,), nonlinear_on=True)
    start = time.perf_counter()
    traj = run(taylor_green_field(grid), cfg)
    elapsed = time.perf_counter() - start
    err = relative_l2_error(traj.fields[-1], taylor_green_field(grid, t_end))
    return {
        "rel_l2_error": err,
        "energy_balance": energy_balance_residual(traj),
        "max_div_sup": float(np.max(traj.series.div_sup)),
        "runtime_s": elapsed,
        "trajectory": traj,
    }


def validate_projector(n: int = 32, seed: int = 7) -> dict:
    """Idempotence, gradient annihilation and orthogonality of the projector."""
    grid = Grid(n, 2 * np.pi)
    rng = np.random.default_rng(seed)
    f = to_spectral(
        VelocityField(grid, rng.standard_normal(grid.physical_shape(3)), PHYSICAL)
    )
    pf = leray_project(f)
    ppf = leray_project(pf)
    scale = float(np.max(np.abs(pf.data)))
    idem = float(np.max(np.abs(ppf.data - pf.data))) / scale
    annihilation = divergence_sup(pf)
    residual = VelocityField(grid, f.data - pf.data, pf.rep)
    ortho = abs(inner_product(to_physical(pf), to_physical(residual)))
    ortho /= l2_norm(pf) * max(l2_norm(residual), 1e-300)
    return {"idempotence": idem, "annihilation": annihilation, "orthogonality": ortho}


def validate_heat(n: int = 32, seed: int = 11) -> dict:
    """Semigroup property and run-vs-semigroup agreement of the heat flow."""
    from .solver import linear_heat_solve

    grid = Grid(n, 2 * np.pi)
    rng = np.random.default_rng(seed)
    u0 = random_divergence_free(grid, 8, rng)
    u0h = to_spectral(u0)
    t1, t2 = 0.013, 0.029
    chained = linear_heat_solve(linear_heat_solve(u0h, t1), t2)
    direct = linear_heat_solve(u0h, t1 + t2)
    semigroup = float(np.max(np.abs(chained.data - direct.data)))
    semigroup /= max(float(np.max(np.abs(direct.data))), 1e-300)
    cfg = SolverConfig(
        eps=0.0, dt=0.005, t_end=0.05, snapshot_times=(0.01, 0.05), nonlinear_on=False
    )
    traj = run(u0, cfg)
    errs = []
    for t, f in zip(traj.times, traj.fields):
        ref = to_physical(linear_heat_solve(u0h, t))
        errs.append(relative_l2_error(f, ref))
    return {"semigroup": semigroup, "run_vs_semigroup": float(max(errs))}


def temporal_convergence_order(
    n: int = 32,
    dts: tuple = (1e-2, 5e-3, 2.5e-3),
    t_end: float = 0.1,
    amplitude: float = 2.0,
) -> dict:
    """Self-convergence order of the stepper on a two-scale vortex run.

    Errors are measured against a reference integration at
    min(dts)/8; a clean 4th-order stepper gives successive error
    ratios of 16 per dt halving.
    """
    grid = Grid(n, 2 * np.pi)
    u0 = two_scale_field(grid, amplitude)

    def final_state(dt):
        cfg = SolverConfig(eps=0.0, dt=dt, t_end=t_end, snapshot_times=(t_end,), nonlinear_on=True)
        return run(u0, cfg).fields[-1]

    ref = final_state(min(dts) / 8)
    errors = [relative_l2_error(final_state(dt), ref) for dt in dts]
    orders = [
        float(np.log(errors[i] / errors[i + 1]) / np.log(dts[i] / dts[i + 1]))
        for i in range(len(dts) - 1)
    ]
    return {"dts": list(dts), "errors": errors, "orders": orders, "order": float(np.mean(orders))}
