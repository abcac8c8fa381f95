"""Periodic-box spectral representation and operators.

Fields live on an N^3 grid over a cube of edge length L. Spectral
coefficients use the real-to-complex layout of ``scipy.fft.rfftn``
(unnormalized forward transform, last axis halved), so Hermitian
symmetry of real fields is structural. All differential operators,
the Leray projector, mollification and the dealiased advection
product are per-mode operations in this layout.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import scipy.fft as _fft

_WORKERS = os.cpu_count() or 1

PHYSICAL = "physical"
SPECTRAL = "spectral"


class SpectralError(ValueError):
    """Invalid field state or operator precondition."""


def _rfftn(a):
    return _fft.rfftn(a, axes=(-3, -2, -1), workers=_WORKERS)


def _irfftn(a, n):
    return _fft.irfftn(a, s=(n, n, n), axes=(-3, -2, -1), workers=_WORKERS)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid: ``n`` points per axis on a cube of edge ``length``."""

    n: int
    length: float

    def __post_init__(self):
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError(f"grid n must be even and >= 8, got {self.n}")
        if not self.length > 0:
            raise ValueError(f"grid length must be positive, got {self.length}")

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def nh(self) -> int:
        return self.n // 2 + 1

    @cached_property
    def x(self) -> np.ndarray:
        """Axis coordinates i*h, i = 0..n-1."""
        return np.arange(self.n) * self.h

    @property
    def center(self) -> float:
        return self.length / 2.0

    @cached_property
    def xc(self) -> np.ndarray:
        """Axis coordinates measured from the box center."""
        return self.x - self.center

    @cached_property
    def k_axis(self) -> np.ndarray:
        """Full wavenumber axis 2*pi/L * (0..n/2-1, -n/2..-1)."""
        return 2.0 * np.pi / self.length * np.fft.fftfreq(self.n, 1.0 / self.n)

    @cached_property
    def k_half(self) -> np.ndarray:
        """Halved (rfft) wavenumber axis 2*pi/L * (0..n/2)."""
        return 2.0 * np.pi / self.length * np.arange(self.nh)

    @cached_property
    def kvec(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable derivative wavenumbers (kx, ky, kz) in rfft layout.

        The Nyquist entry of each axis is zeroed (the usual spectral
        differentiation convention for even n); this keeps every
        first-order operator Hermitian-consistent on the half-spectrum,
        so projections of arbitrary real fields stay real-field valid.
        """
        kx_ax = self.k_axis.copy()
        kx_ax[self.n // 2] = 0.0
        kz_ax = self.k_half.copy()
        kz_ax[-1] = 0.0
        kx = kx_ax.reshape(-1, 1, 1)
        ky = kx_ax.reshape(1, -1, 1)
        kz = kz_ax.reshape(1, 1, -1)
        return kx, ky, kz

    @cached_property
    def k_sq(self) -> np.ndarray:
        """True squared wavenumber magnitude (Nyquist included); used by the heat semigroup."""
        kx = (self.k_axis**2).reshape(-1, 1, 1)
        ky = (self.k_axis**2).reshape(1, -1, 1)
        kz = (self.k_half**2).reshape(1, 1, -1)
        return kx + ky + kz

    @cached_property
    def k_sq_deriv(self) -> np.ndarray:
        """Squared magnitude of the derivative wavenumbers (Nyquist zeroed)."""
        kx, ky, kz = self.kvec
        return kx**2 + ky**2 + kz**2

    @cached_property
    def k_sq_safe(self) -> np.ndarray:
        """k_sq_deriv with zeros (the mean mode and pure-Nyquist rows) set to 1."""
        k2 = self.k_sq_deriv.copy()
        k2[k2 == 0.0] = 1.0
        return k2

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: keep modes with every integer component <= floor(n/3)."""
        cut = self.n // 3
        m = np.rint(np.fft.fftfreq(self.n, 1.0 / self.n)).astype(int)
        mz = np.arange(self.nh)
        keep_x = (np.abs(m) <= cut).reshape(-1, 1, 1)
        keep_y = (np.abs(m) <= cut).reshape(1, -1, 1)
        keep_z = (mz <= cut).reshape(1, 1, -1)
        return keep_x & keep_y & keep_z

    @cached_property
    def parseval_weights(self) -> np.ndarray:
        """Mode multiplicities for sums over the rfft half-spectrum."""
        w = np.full(self.nh, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return w.reshape(1, 1, -1)

    def spectral_shape(self, ncomp: int | None = None):
        s = (self.n, self.n, self.nh)
        return s if ncomp is None else (ncomp,) + s

    def physical_shape(self, ncomp: int | None = None):
        s = (self.n, self.n, self.n)
        return s if ncomp is None else (ncomp,) + s


@dataclass(frozen=True)
class VelocityField:
    """3-component vector field; ``data`` shape (3,n,n,n) real or (3,n,n,n/2+1) complex."""

    grid: Grid
    data: np.ndarray
    rep: str
    t: float = 0.0
    divergence_free: bool = False

    def __post_init__(self):
        expect = (
            self.grid.physical_shape(3) if self.rep == PHYSICAL else self.grid.spectral_shape(3)
        )
        if self.data.shape != expect:
            raise SpectralError(f"data shape {self.data.shape} != expected {expect} for {self.rep}")

    @property
    def is_spectral(self) -> bool:
        return self.rep == SPECTRAL


@dataclass(frozen=True)
class ScalarField:
    """Single scalar field with the same dual representation as VelocityField."""

    grid: Grid
    data: np.ndarray
    rep: str
    t: float = 0.0

    def __post_init__(self):
        expect = self.grid.physical_shape() if self.rep == PHYSICAL else self.grid.spectral_shape()
        if self.data.shape != expect:
            raise SpectralError(f"data shape {self.data.shape} != expected {expect} for {self.rep}")

    @property
    def is_spectral(self) -> bool:
        return self.rep == SPECTRAL


@dataclass(frozen=True)
class Mollifier:
    """Smoothing kernel of width ``eps``: real, even spectral multiplier with value 1 at k=0."""

    grid: Grid
    eps: float
    multiplier: np.ndarray  # real, shape grid.spectral_shape()


def to_spectral(f):
    """Forward transform a physical-representation field."""
    if f.rep != PHYSICAL:
        raise SpectralError(f"to_spectral requires physical representation, got {f.rep}")
    return replace(f, data=_rfftn(f.data), rep=SPECTRAL)


def to_physical(f):
    """Inverse transform a spectral-representation field."""
    if f.rep != SPECTRAL:
        raise SpectralError(f"to_physical requires spectral representation, got {f.rep}")
    return replace(f, data=_irfftn(f.data, f.grid.n), rep=PHYSICAL)


def as_spectral(f):
    return f if f.is_spectral else to_spectral(f)


def as_physical(f):
    return f if f.rep == PHYSICAL else to_physical(f)


def _project_data(grid: Grid, fh: np.ndarray) -> np.ndarray:
    """Per-mode I - k k^T/|k|^2 on stacked spectral data; k=0 passes through."""
    kx, ky, kz = grid.kvec
    kdotf = kx * fh[0] + ky * fh[1] + kz * fh[2]
    kdotf /= grid.k_sq_safe
    out = np.empty_like(fh)
    out[0] = fh[0] - kx * kdotf
    out[1] = fh[1] - ky * kdotf
    out[2] = fh[2] - kz * kdotf
    # modes with zero derivative wavenumber (the mean and pure-Nyquist
    # rows) have kdotf = 0 and pass through unchanged.
    return out


def leray_project(f: VelocityField) -> VelocityField:
    """Project onto divergence-free fields: F - k (k.F)/|k|^2 per mode."""
    f = as_spectral(f)
    return replace(f, data=_project_data(f.grid, f.data), divergence_free=True)


def divergence(u: VelocityField) -> ScalarField:
    """Spectral divergence i k . u_hat."""
    u = as_spectral(u)
    kx, ky, kz = u.grid.kvec
    d = 1j * (kx * u.data[0] + ky * u.data[1] + kz * u.data[2])
    return ScalarField(u.grid, d, SPECTRAL, u.t)


def gradient(s: ScalarField) -> VelocityField:
    """Spectral gradient (i k s_hat) as a vector field."""
    s = as_spectral(s)
    kx, ky, kz = s.grid.kvec
    g = np.stack([1j * kx * s.data, 1j * ky * s.data, 1j * kz * s.data])
    return VelocityField(s.grid, g, SPECTRAL, s.t)


def dealias(f):
    """Zero every mode with any integer wavenumber component above floor(n/3)."""
    f = as_spectral(f)
    return replace(f, data=f.data * f.grid.dealias_mask)


def build_mollifier(grid: Grid, eps: float) -> Mollifier:
    """Sample the compact-support bump exp(-1/(1-|x/eps|^2)) and normalize its multiplier.

    The kernel is sampled at periodic minimum-image distances from the
    lattice origin so the multiplier is real and even; dividing by the
    k=0 value makes mollification preserve the spatial mean exactly.
    """
    if not 0 < eps < grid.length / 4:
        raise SpectralError(f"mollifier width must satisfy 0 < eps < L/4, got eps={eps}")
    d = np.minimum(grid.x, grid.length - grid.x)
    r2 = (
        (d**2).reshape(-1, 1, 1)
        + (d**2).reshape(1, -1, 1)
        + (d**2).reshape(1, 1, -1)
    )
    s2 = r2 / eps**2
    kernel = np.zeros_like(r2)
    inside = s2 < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        kernel[inside] = np.exp(-1.0 / (1.0 - s2[inside]))
    mult = _rfftn(kernel).real
    mult /= mult[0, 0, 0]
    np.clip(mult, -1.0, 1.0, out=mult)
    return Mollifier(grid, eps, mult)


def mollify(u, m: Mollifier):
    """Per-mode multiplication by the mollifier's spectral multiplier."""
    u = as_spectral(u)
    if u.grid != m.grid:
        raise SpectralError("mollify: field and mollifier grids differ")
    return replace(u, data=u.data * m.multiplier)


def _dealiased_physical(u: VelocityField) -> np.ndarray:
    return _irfftn(as_spectral(u).data * u.grid.dealias_mask, u.grid.n)


def advection_tensor_divergence(u: VelocityField, w: VelocityField) -> np.ndarray:
    """Spectral div(w x u): i k_j (w_j u_i)^ with 2/3-dealiased products.

    Returns stacked spectral data (not yet projected). ``w`` is the
    advecting field; order matters because w != u under mollification.
    """
    if u.grid != w.grid:
        raise SpectralError("advection: field grids differ")
    grid = u.grid
    up = _dealiased_physical(u)
    wp = _dealiased_physical(w)
    kx, ky, kz = grid.kvec
    out = np.empty(grid.spectral_shape(3), dtype=complex)
    for i in range(3):
        t0 = _rfftn(wp[0] * up[i])
        t1 = _rfftn(wp[1] * up[i])
        t2 = _rfftn(wp[2] * up[i])
        out[i] = 1j * (kx * t0 + ky * t1 + kz * t2)
    out *= grid.dealias_mask
    return out


def nonlinear_term(u: VelocityField, w: VelocityField) -> VelocityField:
    """Projected advection term P div(w x u) of the mollified system."""
    fh = advection_tensor_divergence(u, w)
    return VelocityField(u.grid, _project_data(u.grid, fh), SPECTRAL, u.t, divergence_free=True)


def pressure_from_velocity(u: VelocityField, w: VelocityField | None = None) -> ScalarField:
    """Zero-mean pressure solving -|k|^2 p_hat = k_i k_j (w_j u_i)^.

    With this p, div(w x u) + grad p equals P div(w x u) per mode.
    ``w`` defaults to ``u`` (the unmollified equations).
    """
    if w is None:
        w = u
    grid = u.grid
    up = _dealiased_physical(u)
    wp = _dealiased_physical(w)
    kx, ky, kz = grid.kvec
    k = (kx, ky, kz)
    acc = np.zeros(grid.spectral_shape(), dtype=complex)
    for i in range(3):
        for j in range(3):
            acc += k[i] * k[j] * _rfftn(wp[j] * up[i])
    ph = -acc / grid.k_sq_safe
    ph[0, 0, 0] = 0.0
    ph *= grid.dealias_mask
    return ScalarField(grid, ph, SPECTRAL, u.t)


def l2_norm_sq(f) -> float:
    """Squared L^2 norm over the box, by h^3 sum (physical) or Parseval (spectral)."""
    grid = f.grid
    if f.rep == PHYSICAL:
        return float(np.sum(f.data**2)) * grid.h**3
    w = grid.parseval_weights
    total = float(np.sum(w * (f.data.real**2 + f.data.imag**2)))
    return total * grid.length**3 / grid.n**6


def l2_norm(f) -> float:
    return float(np.sqrt(l2_norm_sq(f)))


def grad_norm_sq(u) -> float:
    """Squared L^2 norm of the full velocity gradient, evaluated spectrally."""
    u = as_spectral(u)
    grid = u.grid
    w = grid.parseval_weights * grid.k_sq
    total = float(np.sum(w * (u.data.real**2 + u.data.imag**2)))
    return total * grid.length**3 / grid.n**6


def sup_norm(u) -> float:
    """Maximum pointwise Euclidean magnitude on the grid."""
    up = as_physical(u)
    if up.data.ndim == 4:
        return float(np.sqrt(np.max(np.sum(up.data**2, axis=0))))
    return float(np.max(np.abs(up.data)))


def divergence_sup(u: VelocityField) -> float:
    """Spectral sup of |k . u_hat| normalized by max(1, sup |u_hat|)."""
    u = as_spectral(u)
    kx, ky, kz = u.grid.kvec
    d = np.abs(kx * u.data[0] + ky * u.data[1] + kz * u.data[2])
    scale = max(1.0, float(np.max(np.abs(u.data))))
    return float(np.max(d)) / scale


def hermitian_defect(f) -> float:
    """Deviation from Hermitian symmetry on the kz=0 plane of the rfft layout."""
    f = as_spectral(f)
    plane = f.data[..., 0]
    mirrored = np.conj(plane[..., ::-1, ::-1])
    mirrored = np.roll(mirrored, (1, 1), axis=(-2, -1))
    scale = max(1.0, float(np.max(np.abs(plane))))
    return float(np.max(np.abs(plane - mirrored))) / scale


def inner_product(f, g) -> float:
    """L^2 inner product over the box (physical representations)."""
    fp, gp = as_physical(f), as_physical(g)
    return float(np.sum(fp.data * gp.data)) * f.grid.h**3


def random_divergence_free(
    grid: Grid, max_mode: int, rng: np.random.Generator, amplitude: float = 1.0
) -> VelocityField:
    """Deterministic random solenoidal field band-limited to |k_i| <= max_mode."""
    noise = rng.standard_normal(grid.physical_shape(3))
    fh = _rfftn(noise)
    m = np.rint(np.fft.fftfreq(grid.n, 1.0 / grid.n)).astype(int)
    mz = np.arange(grid.nh)
    keep = (
        (np.abs(m) <= max_mode).reshape(-1, 1, 1)
        & (np.abs(m) <= max_mode).reshape(1, -1, 1)
        & (mz <= max_mode).reshape(1, 1, -1)
    )
    fh *= keep
    fh = _project_data(grid, fh)
    u = VelocityField(grid, fh, SPECTRAL, 0.0, divergence_free=True)
    up = to_physical(u)
    peak = sup_norm(up)
    if peak > 0:
        up = replace(up, data=up.data * (amplitude / peak), divergence_free=True)
    return up
