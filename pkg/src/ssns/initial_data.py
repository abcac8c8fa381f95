"""Homogeneous degree -1 initial data on the periodic box.

The explicit family is alpha * (x2-x3, x3-x1, x1-x2) / |x|^2, regularized
by |x|^2 -> |x|^2 + delta^2 (which keeps the formula exactly
divergence-free and odd) and localized by a smooth radial window before
re-projection. The singularity sits at the box center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    PHYSICAL,
    Grid,
    VelocityField,
    as_physical,
    leray_project,
    to_spectral,
)


class InitialDataError(ValueError):
    """Invalid initial-data specification or singular sample."""


def _bump_ramp(s: np.ndarray) -> np.ndarray:
    """C-infinity partition ramp: 0 at s<=0, 1 at s>=1, strictly increasing between."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.maximum(s, 1e-300)), 0.0)
        b = np.where(1 - s > 0, np.exp(-1.0 / np.maximum(1 - s, 1e-300)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class Window:
    """Radial cutoff: identically 1 for r <= radius - width, 0 for r >= radius."""

    radius: float
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise InitialDataError(f"window width must be positive, got {self.width}")
        if not self.radius > self.width:
            raise InitialDataError("window radius must exceed its transition width")

    def profile(self, r: np.ndarray) -> np.ndarray:
        return _bump_ramp((self.radius - np.asarray(r, dtype=float)) / self.width)


@dataclass(frozen=True)
class ContinuumEvaluator:
    """Exact evaluation of the regularized family at arbitrary points."""

    alpha: float
    delta: float

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at points of shape (..., 3); undefined only at 0 when delta=0."""
        x = np.asarray(points, dtype=float)
        v = np.stack(
            [x[..., 1] - x[..., 2], x[..., 2] - x[..., 0], x[..., 0] - x[..., 1]],
            axis=-1,
        )
        denom = np.sum(x**2, axis=-1) + self.delta**2
        return self.alpha * v / denom[..., None]


@dataclass(frozen=True)
class InitialDataSpec:
    """Amplitude, core regularization and localization window for one data set."""

    grid: Grid
    alpha: float
    delta: float
    window: Window

    def __post_init__(self):
        if self.delta < 0:
            raise InitialDataError(f"delta must be >= 0, got {self.delta}")
        if not self.delta < self.window.radius:
            raise InitialDataError("delta must be smaller than the window radius")
        if not self.window.radius < self.grid.length / 2:
            raise InitialDataError("window radius must be smaller than half the box")

    @property
    def evaluator(self) -> ContinuumEvaluator:
        return ContinuumEvaluator(self.alpha, self.delta)


def default_spec(grid: Grid, alpha: float = 1.0, delta: float | None = None) -> InitialDataSpec:
    """Spec with the stock window (radius 0.4 L, width 0.08 L) and delta = L/64."""
    if delta is None:
        delta = grid.length / 64
    return InitialDataSpec(
        grid, alpha, delta, Window(0.4 * grid.length, 0.08 * grid.length)
    )


def sample_u0_alpha(spec: InitialDataSpec) -> VelocityField:
    """Sample the windowed data on the grid and re-project to solenoidal.

    The formula is evaluated with x measured from the box center. With
    delta = 0 the center grid point is a genuine singularity and the
    sample is rejected.
    """
    if spec.delta == 0:
        raise InitialDataError("delta=0 puts a singular sample at the box center")
    grid = spec.grid
    xc = grid.xc
    x1 = xc.reshape(-1, 1, 1)
    x2 = xc.reshape(1, -1, 1)
    x3 = xc.reshape(1, 1, -1)
    denom = x1**2 + x2**2 + x3**2 + spec.delta**2
    r = np.sqrt(x1**2 + x2**2 + x3**2)
    chi = spec.window.profile(r)
    data = np.empty(grid.physical_shape(3))
    data[0] = spec.alpha * (x2 - x3) / denom * chi
    data[1] = spec.alpha * (x3 - x1) / denom * chi
    data[2] = spec.alpha * (x1 - x2) / denom * chi
    u = VelocityField(grid, data, PHYSICAL, 0.0)
    return as_physical(leray_project(to_spectral(u)))


def localize(u: VelocityField, window: Window) -> VelocityField:
    """Multiply by the radial cutoff about the box center and re-project."""
    grid = u.grid
    up = as_physical(u)
    xc = grid.xc
    r = np.sqrt(
        (xc**2).reshape(-1, 1, 1)
        + (xc**2).reshape(1, -1, 1)
        + (xc**2).reshape(1, 1, -1)
    )
    chi = window.profile(r)
    cut = VelocityField(grid, up.data * chi, PHYSICAL, up.t)
    return as_physical(leray_project(to_spectral(cut)))


def verify_homogeneity(
    ev: ContinuumEvaluator, lam: float, points: np.ndarray
) -> float:
    """Max over points of |lam*u0(lam x) - u0(x)| / |u0(x)|.

    Zero (to round-off) for the exact delta=0 family; for delta>0 it
    reports the scale at which the regularization breaks homogeneity.
    """
    pts = np.asarray(points, dtype=float)
    base = ev(pts)
    scaled = lam * ev(lam * pts)
    num = np.linalg.norm(scaled - base, axis=-1)
    den = np.linalg.norm(base, axis=-1)
    if np.any(den == 0):
        raise InitialDataError("homogeneity check at a zero of the data")
    return float(np.max(num / den))


def l2_loc_unif_norm(u: VelocityField, radius: float, stride: int = 4) -> float:
    """Sup over grid ball centers of the L^2 norm on the radius-``radius`` ball.

    Ball sums over all centers come from one circular convolution with
    the ball indicator; the sup is then taken on a stride-subsampled
    lattice of centers.
    """
    grid = u.grid
    if not radius <= grid.length / 4:
        raise InitialDataError("ball radius must be at most L/4")
    up = as_physical(u)
    mag2 = np.sum(up.data**2, axis=0) if up.data.ndim == 4 else up.data**2
    d = np.minimum(grid.x, grid.length - grid.x)
    r2 = (
        (d**2).reshape(-1, 1, 1)
        + (d**2).reshape(1, -1, 1)
        + (d**2).reshape(1, 1, -1)
    )
    ball = (r2 <= radius**2).astype(float)
    import scipy.fft as _f

    conv = _f.irfftn(
        _f.rfftn(mag2) * _f.rfftn(ball), s=mag2.shape
    )
    sub = conv[::stride, ::stride, ::stride]
    return float(np.sqrt(max(float(np.max(sub)), 0.0) * grid.h**3))
