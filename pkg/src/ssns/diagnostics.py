"""Diagnostics for the scaling identities of the flow.

Everything here is read-only over trajectories: dyadic scaling
residuals, the mollifier commutation experiment, similarity-profile
extraction and collapse, the sup-norm decay law, data convergence on
annuli, and the parabolic-cylinder / Serrin-norm regularity
functionals. Interpolation is trigonometric (exact on band-limited
fields); the dyadic snapshot ladder removes any need for temporal
interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .initial_data import InitialDataSpec, Window, sample_u0_alpha
from .solver import SolverConfig, Trajectory, run
from .spectral import (
    Grid,
    VelocityField,
    as_physical,
    as_spectral,
)


class DiagnosticsError(ValueError):
    pass


def trig_interpolate(field, xs, ys, zs) -> np.ndarray:
    """Evaluate a spectral field on the tensor lattice xs x ys x zs.

    Separable contraction against complex exponentials per axis, with
    Hermitian doubling on the halved axis. Exact (to round-off) for
    fields with no Nyquist content.
    """
    f = as_spectral(field)
    grid = f.grid
    ex = np.exp(1j * np.outer(np.asarray(xs, float), grid.k_axis))
    ey = np.exp(1j * np.outer(np.asarray(ys, float), grid.k_axis))
    w = np.full(grid.nh, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    ez = np.exp(1j * np.outer(np.asarray(zs, float), grid.k_half)) * w
    a = np.einsum("ax,...xyz->...ayz", ex, f.data)
    b = np.einsum("by,...ayz->...abz", ey, a)
    c = np.einsum("cz,...abz->...abc", ez, b)
    return c.real / grid.n**3


@dataclass(frozen=True)
class BallBlock:
    """Cubic index block around the box center with an inscribed-ball mask."""

    idx: np.ndarray
    coords: np.ndarray  # centered coordinates of idx
    mask: np.ndarray
    radius: float


def ball_block(grid: Grid, radius: float) -> BallBlock:
    if not 0 < radius < grid.length / 2:
        raise DiagnosticsError(f"ball radius must lie in (0, L/2), got {radius}")
    m = int(math.floor(radius / grid.h))
    idx = np.arange(grid.n // 2 - m, grid.n // 2 + m + 1)
    coords = grid.xc[idx]
    r2 = (
        (coords**2).reshape(-1, 1, 1)
        + (coords**2).reshape(1, -1, 1)
        + (coords**2).reshape(1, 1, -1)
    )
    return BallBlock(idx, coords, r2 <= radius**2, radius)


def _restrict(data: np.ndarray, idx: np.ndarray) -> np.ndarray:
    if data.ndim == 4:
        return data[np.ix_(np.arange(data.shape[0]), idx, idx, idx)]
    return data[np.ix_(idx, idx, idx)]


@dataclass(frozen=True)
class FieldBlock:
    """Vector field values on a BallBlock lattice."""

    coords: np.ndarray
    values: np.ndarray
    mask: np.ndarray


def rescale_field(u: VelocityField, lam: float, radius: float) -> FieldBlock:
    """x -> lam * u(lam x) about the box center, on the grid points |x| <= radius.

    lam = 1 reduces to plain restriction (no interpolation), making the
    degenerate scaling residual exactly zero.
    """
    if not 0 < lam <= 1:
        raise DiagnosticsError(f"lambda must lie in (0, 1], got {lam}")
    grid = u.grid
    blk = ball_block(grid, radius)
    if lam == 1.0:
        vals = _restrict(as_physical(u).data, blk.idx)
        return FieldBlock(blk.coords, vals, blk.mask)
    pts = grid.center + lam * blk.coords
    vals = lam * trig_interpolate(u, pts, pts, pts)
    return FieldBlock(blk.coords, vals, blk.mask)


@dataclass(frozen=True)
class DyadicLadder:
    """Scaling factors 2^-m, m = 0..max_exp."""

    max_exp: int = 3

    def __post_init__(self):
        if self.max_exp < 0:
            raise DiagnosticsError("max_exp must be >= 0")

    @property
    def lambdas(self) -> tuple:
        return tuple(2.0**-m for m in range(self.max_exp + 1))


@dataclass
class ScalingResidualReport:
    """Relative residuals of u(x,t) = lam u(lam x, lam^2 t) over (lam, t)."""

    ball_radius: float
    rows: list  # (lam, t, residual)

    def residuals_for(self, lam: float) -> list:
        return [(t, s) for (l, t, s) in self.rows if l == lam]


def _masked_l2(values: np.ndarray, mask: np.ndarray) -> float:
    mag2 = np.sum(values**2, axis=0) if values.ndim == 4 else values**2
    return float(np.sqrt(np.sum(mag2[mask])))


def scaling_residual(
    traj: Trajectory, ladder: DyadicLadder, ball_radius: float, pair_rtol: float = 1e-6
) -> ScalingResidualReport:
    """Residual table S(lam, t) over every snapshot pair (t, lam^2 t) in the ladder."""
    grid = traj.grid
    blk = ball_block(grid, ball_radius)
    rows = []
    for lam in ladder.lambdas:
        found = False
        for i, t in enumerate(traj.times):
            j = traj.index_at(lam**2 * t, pair_rtol)
            if j is None:
                continue
            found = True
            base = _restrict(as_physical(traj.fields[i]).data, blk.idx)
            if lam == 1.0:
                rows.append((lam, t, 0.0))
                continue
            resc = rescale_field(traj.fields[j], lam, ball_radius)
            num = _masked_l2(base - resc.values, blk.mask)
            den = _masked_l2(base, blk.mask)
            rows.append((lam, t, num / den if den > 0 else 0.0))
        if not found:
            raise DiagnosticsError(f"no snapshot pair (t, lam^2 t) for lambda={lam}")
    return ScalingResidualReport(ball_radius, rows)


@dataclass(frozen=True)
class ProfileField:
    """Similarity profile U(y) = sqrt(t) u(sqrt(t) y, t) on a fixed y-lattice."""

    y: np.ndarray
    values: np.ndarray  # (3, m, m, m)
    t: float

    @property
    def spacing(self) -> float:
        return float(self.y[1] - self.y[0])

    @property
    def ball_mask(self) -> np.ndarray:
        r2 = (
            (self.y**2).reshape(-1, 1, 1)
            + (self.y**2).reshape(1, -1, 1)
            + (self.y**2).reshape(1, 1, -1)
        )
        return r2 <= float(self.y[-1]) ** 2


def extract_profile(
    u: VelocityField,
    half_width: float,
    npts: int = 33,
    core_radius: float | None = None,
) -> ProfileField:
    """Interpolate sqrt(t) u(sqrt(t) y, t) on the lattice |y_i| <= half_width."""
    if u.t <= 0:
        raise DiagnosticsError("profile extraction requires a snapshot at t > 0")
    grid = u.grid
    if core_radius is None:
        core_radius = grid.length / 4
    root_t = math.sqrt(u.t)
    if root_t * half_width > core_radius:
        raise DiagnosticsError(
            f"similarity lattice (radius {root_t * half_width:.3g}) escapes the core "
            f"(radius {core_radius:.3g}) at t={u.t:.3g}"
        )
    y = np.linspace(-half_width, half_width, npts)
    pts = grid.center + root_t * y
    vals = root_t * trig_interpolate(u, pts, pts, pts)
    return ProfileField(y, vals, u.t)


def profile_distance(a: ProfileField, b: ProfileField) -> float:
    """Relative L^2 distance over the lattice ball, symmetric normalization."""
    mask = a.ball_mask
    na = _masked_l2(a.values, mask)
    nb = _masked_l2(b.values, mask)
    d = _masked_l2(a.values - b.values, mask)
    denom = max(na, nb)
    return d / denom if denom > 0 else 0.0


def profile_collapse(
    traj: Trajectory,
    times,
    half_width: float,
    npts: int = 33,
    core_radius: float | None = None,
):
    """Pairwise relative distances between profiles at the given snapshot times."""
    profs = [
        extract_profile(traj.snapshot_at(t), half_width, npts, core_radius) for t in times
    ]
    k = len(profs)
    dist = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            dist[i, j] = dist[j, i] = profile_distance(profs[i], profs[j])
    return profs, dist


@dataclass
class DecayReport:
    """Series sqrt(t) ||u(t)||_inf and its fitted log-log decay slope."""

    t: np.ndarray
    sup: np.ndarray
    sqrt_t_sup: np.ndarray
    slope: float
    variation: float  # (max-min)/mean of sqrt_t_sup over the window
    window: tuple


def decay_law(traj: Trajectory, window: tuple | None = None) -> DecayReport:
    from .spectral import sup_norm

    t = np.asarray(traj.times)
    sup = np.asarray([sup_norm(f) for f in traj.fields])
    if window is None:
        window = (float(t[0]), float(t[-1]))
    sel = (t >= window[0] * (1 - 1e-12)) & (t <= window[1] * (1 + 1e-12))
    if int(np.sum(sel)) < 3:
        raise DiagnosticsError("decay window must contain at least 3 snapshots")
    ts, ss = t[sel], sup[sel]
    slope = float(np.polyfit(np.log(ts), np.log(ss), 1)[0])
    series = np.sqrt(ts) * ss
    variation = float((series.max() - series.min()) / series.mean())
    return DecayReport(t, sup, np.sqrt(t) * sup, slope, variation, window)


def annulus_mask(grid: Grid, r1: float, r2: float) -> np.ndarray:
    if not 0 < r1 < r2 < grid.length / 2:
        raise DiagnosticsError("annulus must satisfy 0 < r1 < r2 < L/2")
    xc = grid.xc
    rr = np.sqrt(
        (xc**2).reshape(-1, 1, 1)
        + (xc**2).reshape(1, -1, 1)
        + (xc**2).reshape(1, 1, -1)
    )
    return (rr >= r1) & (rr <= r2)


def l2loc_convergence(traj: Trajectory, u0: VelocityField, r1: float, r2: float):
    """Series int_K |u(t) - u0|^2 over the annulus K, plus int_K |u0|^2."""
    grid = traj.grid
    mask = annulus_mask(grid, r1, r2)
    h3 = grid.h**3
    u0p = as_physical(u0).data
    ref = float(np.sum(np.sum(u0p**2, axis=0)[mask])) * h3
    vals = []
    for f in traj.fields:
        d = as_physical(f).data - u0p
        vals.append(float(np.sum(np.sum(d**2, axis=0)[mask])) * h3)
    return np.asarray(traj.times), np.asarray(vals), ref


@dataclass(frozen=True)
class ParabolicCylinder:
    """Space-time set |tau - t| < r^2/2, |y - x| < r."""

    center: tuple  # (x1, x2, x3)
    t: float
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise DiagnosticsError("cylinder radius must be positive")

    @property
    def t_lo(self) -> float:
        return self.t - 0.5 * self.r**2

    @property
    def t_hi(self) -> float:
        return self.t + 0.5 * self.r**2


def serrin_admissible(p: float, q: float) -> bool:
    """Exact evaluation of the regularity condition 3/p + 2/q < 1."""
    inf = math.inf
    if p == inf and q == inf:
        return True
    if p == inf:
        return q > 2
    if q == inf:
        return p > 3
    return 2 * p + 3 * q < p * q


@dataclass(frozen=True)
class SerrinNorm:
    p: float
    q: float
    value: float
    admissible: bool
    cylinder: ParabolicCylinder


def _cylinder_mask(grid: Grid, center, r: float) -> np.ndarray:
    d2 = None
    for axis, c in enumerate(center):
        d = np.mod(grid.x - c + grid.length / 2, grid.length) - grid.length / 2
        shape = [1, 1, 1]
        shape[axis] = -1
        term = (d**2).reshape(shape)
        d2 = term if d2 is None else d2 + term
    return d2 < r**2


def serrin_norm(traj: Trajectory, cyl: ParabolicCylinder, p: float, q: float) -> SerrinNorm:
    """Composite norm || ||u||_{L^p(ball)} ||_{L^q(time)} over the cylinder.

    Space-inner norms are h^3 sums per snapshot slice; the outer time
    norm is a trapezoid over the snapshot slices inside the cylinder
    (max scan for the infinite exponents).
    """
    if not (1 <= p and 1 <= q):
        raise DiagnosticsError("exponents must be >= 1")
    grid = traj.grid
    if cyl.r >= grid.length / 2:
        raise DiagnosticsError("cylinder does not fit in the box")
    times = np.asarray(traj.times)
    tol = 1e-12 * max(abs(cyl.t_hi), 1.0)
    sel = np.nonzero((times >= cyl.t_lo - tol) & (times <= cyl.t_hi + tol))[0]
    if cyl.t_lo < times[0] - tol or cyl.t_hi > times[-1] + tol:
        raise DiagnosticsError("cylinder escapes the trajectory time range")
    if len(sel) < (1 if q == math.inf else 2):
        raise DiagnosticsError("cylinder contains too few snapshot slices")
    mask = _cylinder_mask(grid, cyl.center, cyl.r)
    h3 = grid.h**3
    slice_norms = []
    for i in sel:
        mag = np.sqrt(np.sum(as_physical(traj.fields[i]).data ** 2, axis=0))
        vals = mag[mask]
        if p == math.inf:
            slice_norms.append(float(vals.max()) if vals.size else 0.0)
        else:
            slice_norms.append(float(np.sum(vals**p) * h3) ** (1.0 / p))
    g = np.asarray(slice_norms)
    if q == math.inf:
        value = float(g.max())
    else:
        value = float(np.trapezoid(g**q, times[sel]) ** (1.0 / q))
    return SerrinNorm(p, q, value, serrin_admissible(p, q), cyl)


def singular_candidate_scan(
    traj: Trajectory, r_list, threshold: float, space_stride: int = 4
):
    """Centers whose parabolic cylinders stay above ``threshold`` for every r.

    Boundedness cannot certify a singularity; the scan is the numerical
    proxy: a candidate persists across all probing radii. Smooth runs
    return an empty list.
    """
    from scipy.ndimage import maximum_filter

    if not np.all(np.isfinite(r_list)) or not math.isfinite(threshold):
        raise DiagnosticsError("radii and threshold must be finite")
    grid = traj.grid
    times = np.asarray(traj.times)
    mags = [np.sqrt(np.sum(as_physical(f).data ** 2, axis=0)) for f in traj.fields]
    ball_max = {}
    for r in r_list:
        m = max(1, int(math.floor(r / grid.h)))
        off = np.arange(-m, m + 1)
        foot = (
            (off**2).reshape(-1, 1, 1)
            + (off**2).reshape(1, -1, 1)
            + (off**2).reshape(1, 1, -1)
        ) < (r / grid.h) ** 2
        foot[m, m, m] = True
        ball_max[r] = [maximum_filter(mag, footprint=foot, mode="wrap") for mag in mags]
    candidates = []
    sub = slice(0, grid.n, space_stride)
    for k, tk in enumerate(times):
        ok_all_r = None
        for r in r_list:
            lo, hi = tk - 0.5 * r**2, tk + 0.5 * r**2
            if lo < times[0] - 1e-12 or hi > times[-1] + 1e-12:
                ok_all_r = None
                break
            in_win = np.nonzero((times >= lo) & (times <= hi))[0]
            sup_r = np.maximum.reduce([ball_max[r][i] for i in in_win])
            ok = sup_r[sub, sub, sub] > threshold
            ok_all_r = ok if ok_all_r is None else (ok_all_r & ok)
        if ok_all_r is None or not np.any(ok_all_r):
            continue
        for i, j, l in zip(*np.nonzero(ok_all_r)):
            candidates.append(
                (
                    float(grid.x[i * space_stride]),
                    float(grid.x[j * space_stride]),
                    float(grid.x[l * space_stride]),
                    float(tk),
                )
            )
    return candidates


@dataclass
class CommutationReport:
    """Discrepancy of lam u_eps(lam x, lam^2 t) against u_{eps/lam} per snapshot."""

    lam: float
    times: np.ndarray  # times of the wide-box run
    discrepancy: np.ndarray
    sup: float


def commutation_pair(
    data_spec: InitialDataSpec, cfg: SolverConfig, lam: float, covariant_delta: bool = False
) -> tuple[InitialDataSpec, SolverConfig]:
    """The rescaled companion problem: box L/lam, mollifier eps/lam, same continuum data.

    The window is kept at the same box fraction (it maps exactly under
    the rescaling, contributing nothing to the discrepancy). By default
    delta is kept in absolute units, so the measured discrepancy is
    precisely the homogeneity breaking of the regularized core; with
    ``covariant_delta`` the companion regularizes at delta/lam, the
    data then maps exactly, and the whole discrete pair is related by
    an exact rescaling (a strict covariance check of the solver).
    """
    grid = data_spec.grid
    grid_b = Grid(grid.n, grid.length / lam)
    spec_b = InitialDataSpec(
        grid_b,
        data_spec.alpha,
        data_spec.delta / lam if covariant_delta else data_spec.delta,
        Window(data_spec.window.radius / lam, data_spec.window.width / lam),
    )
    cfg_b = SolverConfig(
        eps=cfg.eps / lam if cfg.eps > 0 else 0.0,
        dt=cfg.dt / lam**2,
        t_end=cfg.t_end / lam**2,
        snapshot_times=tuple(t / lam**2 for t in cfg.snapshot_times),
        nonlinear_on=cfg.nonlinear_on,
    )
    return spec_b, cfg_b


def commutation_check(
    data_spec: InitialDataSpec,
    cfg: SolverConfig,
    lam: float = 0.5,
    core_radius: float | None = None,
    covariant_delta: bool = False,
) -> CommutationReport:
    """Run the pair of scaled problems and compare on the shared core lattice.

    With N_B = N_A and L_B = L_A/lam the grids are index-aligned under
    the scaling map (lam x_i^B = x_i^A exactly), so the comparison needs
    no interpolation.
    """
    if not 0 < lam <= 1:
        raise DiagnosticsError(f"lambda must lie in (0, 1], got {lam}")
    spec_b, cfg_b = commutation_pair(data_spec, cfg, lam, covariant_delta)
    traj_a = run(sample_u0_alpha(data_spec), cfg, data_spec)
    traj_b = run(sample_u0_alpha(spec_b), cfg_b, spec_b)
    if core_radius is None:
        core_radius = spec_b.grid.length / 8
    blk = ball_block(spec_b.grid, core_radius)
    disc = []
    for fa, fb in zip(traj_a.fields, traj_b.fields):
        a = _restrict(as_physical(fa).data, blk.idx)
        b = _restrict(as_physical(fb).data, blk.idx)
        num = _masked_l2(b - lam * a, blk.mask)
        den = _masked_l2(b, blk.mask)
        disc.append(num / den if den > 0 else 0.0)
    disc = np.asarray(disc)
    return CommutationReport(lam, np.asarray(traj_b.times), disc, float(disc.max()))
