"""Spectral core: transforms, projector, mollifier, advection product, pressure."""

import numpy as np
import pytest
import scipy.fft as sfft

from ssns.spectral import (
    PHYSICAL,
    SPECTRAL,
    Grid,
    ScalarField,
    SpectralError,
    VelocityField,
    build_mollifier,
    dealias,
    divergence,
    divergence_sup,
    gradient,
    hermitian_defect,
    inner_product,
    l2_norm,
    l2_norm_sq,
    leray_project,
    mollify,
    nonlinear_term,
    pressure_from_velocity,
    random_divergence_free,
    to_physical,
    to_spectral,
)
from ssns.validation import taylor_green_field, taylor_green_pressure

L = 2 * np.pi


def vec(grid, data, rep=PHYSICAL):
    return VelocityField(grid, data, rep)


@pytest.fixture(scope="module")
def grid():
    return Grid(32, L)


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(1234)


class TestGrid:
    def test_rejects_small_or_odd_n(self):
        with pytest.raises(ValueError):
            Grid(6, L)
        with pytest.raises(ValueError):
            Grid(33, L)
        with pytest.raises(ValueError):
            Grid(32, 0.0)

    def test_wavenumbers_symmetric(self, grid):
        k = grid.k_axis
        # negatives are mirrored magnitudes of the positives
        assert np.allclose(np.abs(k[1 : grid.n // 2]), np.abs(k[-1 : grid.n // 2 : -1]))


class TestTransforms:
    def test_constant_field_single_coefficient(self, grid):
        c = 2.5
        f = ScalarField(grid, np.full(grid.physical_shape(), c), PHYSICAL)
        fh = to_spectral(f)
        assert fh.data[0, 0, 0] == pytest.approx(c * grid.n**3, rel=1e-14)
        off = fh.data.copy()
        off[0, 0, 0] = 0
        assert np.max(np.abs(off)) < 1e-9 * abs(c) * grid.n**3

    def test_single_mode_two_coefficients(self, grid):
        x = grid.x
        f = ScalarField(grid, np.sin(2 * np.pi * x / L).reshape(-1, 1, 1) * np.ones(grid.physical_shape()), PHYSICAL)
        fh = to_spectral(f).data
        mags = np.abs(fh)
        big = mags > 1e-8 * mags.max()
        # rfft layout keeps the +k and -k x-axis entries at kz=0
        assert big.sum() == 2
        assert big[1, 0, 0] and big[grid.n - 1, 0, 0]

    def test_round_trip(self, grid, rng):
        data = rng.standard_normal(grid.physical_shape(3))
        u = vec(grid, data)
        back = to_physical(to_spectral(u))
        assert np.max(np.abs(back.data - data)) <= 1e-13 * np.max(np.abs(data))

    def test_wrong_representation_rejected(self, grid, rng):
        u = vec(grid, rng.standard_normal(grid.physical_shape(3)))
        with pytest.raises(SpectralError):
            to_physical(u)
        with pytest.raises(SpectralError):
            to_spectral(to_spectral(u))

    def test_hermitian_symmetry_of_real_fields(self, grid, rng):
        u = to_spectral(vec(grid, rng.standard_normal(grid.physical_shape(3))))
        assert hermitian_defect(u) < 1e-13


class TestLerayProjector:
    def test_annihilates_gradients(self, grid, rng):
        phi = ScalarField(grid, rng.standard_normal(grid.physical_shape()), PHYSICAL)
        g = gradient(dealias(to_spectral(phi)))
        pg = leray_project(g)
        assert np.max(np.abs(pg.data)) <= 1e-12 * np.max(np.abs(g.data))

    def test_idempotent(self, grid, rng):
        f = to_spectral(vec(grid, rng.standard_normal(grid.physical_shape(3))))
        p1 = leray_project(f)
        p2 = leray_project(p1)
        assert np.max(np.abs(p2.data - p1.data)) <= 1e-14 * np.max(np.abs(p1.data))

    def test_longitudinal_mode_removed(self, grid):
        fh = np.zeros(grid.spectral_shape(3), dtype=complex)
        fh[0, 1, 0, 0] = 1.0  # F = (1,0,0) at k = (2*pi/L)(1,0,0)
        out = leray_project(VelocityField(grid, fh, SPECTRAL))
        assert np.max(np.abs(out.data[:, 1, 0, 0])) < 1e-15

    def test_divergence_free_output(self, grid, rng):
        f = to_spectral(vec(grid, rng.standard_normal(grid.physical_shape(3))))
        assert divergence_sup(leray_project(f)) <= 1e-12

    def test_mean_mode_passes_through(self, grid):
        fh = np.zeros(grid.spectral_shape(3), dtype=complex)
        fh[:, 0, 0, 0] = [1.0, 2.0, 3.0]
        out = leray_project(VelocityField(grid, fh, SPECTRAL))
        assert np.allclose(out.data[:, 0, 0, 0], [1, 2, 3])

    def test_orthogonality(self, grid, rng):
        f = to_spectral(vec(grid, rng.standard_normal(grid.physical_shape(3))))
        pf = leray_project(f)
        resid = VelocityField(grid, f.data - pf.data, SPECTRAL)
        ip = inner_product(to_physical(pf), to_physical(resid))
        assert abs(ip) <= 1e-10 * l2_norm(pf) * l2_norm(resid)

    def test_already_solenoidal_unchanged(self, grid, rng):
        u = to_spectral(random_divergence_free(grid, 8, rng))
        pu = leray_project(u)
        assert np.max(np.abs(pu.data - u.data)) <= 1e-14 * np.max(np.abs(u.data))


class TestDivergence:
    def test_divergence_of_projection_vanishes(self, grid, rng):
        f = to_spectral(vec(grid, rng.standard_normal(grid.physical_shape(3))))
        d = divergence(leray_project(f))
        assert np.max(np.abs(d.data)) <= 1e-12 * max(1.0, np.max(np.abs(f.data)))

    def test_gradient_divergence_is_laplacian(self, grid, rng):
        phi = dealias(to_spectral(ScalarField(grid, rng.standard_normal(grid.physical_shape()), PHYSICAL)))
        d = divergence(gradient(phi))
        kx, ky, kz = grid.kvec
        expected = -(kx**2 + ky**2 + kz**2) * phi.data
        assert np.max(np.abs(d.data - expected)) <= 1e-12 * np.max(np.abs(expected))

    def test_matches_finite_differences_at_order_two(self, rng):
        # independent oracle: 2nd-order central differences on two grids;
        # the divergence error of the FD oracle itself must shrink ~4x
        def fd_div(data, h):
            out = np.zeros_like(data[0])
            for axis in range(3):
                out += (np.roll(data[axis], -1, axis) - np.roll(data[axis], 1, axis)) / (2 * h)
            return out

        errs = []
        for n in (32, 64):
            grid = Grid(n, L)
            x = grid.x
            u = np.zeros(grid.physical_shape(3))
            u[0] = np.sin(x).reshape(-1, 1, 1) * np.cos(2 * x).reshape(1, -1, 1)
            u[1] = np.cos(3 * x).reshape(1, -1, 1) * np.ones((n, 1, n))
            u[2] = np.sin(2 * x).reshape(1, 1, -1) * np.cos(x).reshape(-1, 1, 1)
            spectral_div = to_physical(divergence(to_spectral(vec(grid, u)))).data
            errs.append(np.max(np.abs(spectral_div - fd_div(u, grid.h))))
        order = np.log2(errs[0] / errs[1])
        assert order > 1.9


class TestMollifier:
    def test_unit_mean(self, grid):
        for eps in (0.2, 0.5, 1.0):
            m = build_mollifier(grid, eps)
            assert m.multiplier[0, 0, 0] == 1.0

    def test_multiplier_bounded_real_even(self, grid):
        m = build_mollifier(grid, 0.7)
        assert np.all(np.abs(m.multiplier) <= 1.0)
        # even in k: mirroring the full axes leaves the multiplier unchanged
        plane = m.multiplier[:, :, 0]
        mirrored = np.roll(plane[::-1, ::-1], (1, 1), axis=(0, 1))
        assert np.max(np.abs(plane - mirrored)) < 1e-13

    def test_small_eps_taylor_decay(self):
        # oracle: for a nonnegative kernel, 0 <= 1 - rho_hat(k) <= |k|^2 m2 / 2
        # with m2 the discrete second moment; m2 scales like eps^2
        grid = Grid(64, L)
        d = np.minimum(grid.x, L - grid.x)
        d2 = (d**2).reshape(-1, 1, 1) + (d**2).reshape(1, -1, 1) + (d**2).reshape(1, 1, -1)
        prev = None
        for eps in (0.6, 0.45, 0.3):
            m = build_mollifier(grid, eps)
            s2 = d2 / eps**2
            kernel = np.zeros_like(d2)
            kernel[s2 < 1] = np.exp(-1.0 / (1.0 - s2[s2 < 1]))
            m2 = float(np.sum(kernel * d2) / np.sum(kernel))
            assert m2 <= 0.4 * eps**2  # second moment carries the eps^2 rate
            devs = []
            for mode in ((1, 0, 0), (1, 1, 0), (2, 1, 1)):
                k2 = sum((2 * np.pi / L * c) ** 2 for c in mode)
                val = m.multiplier[mode[0], mode[1], mode[2]]
                assert -1e-12 <= 1.0 - val <= 0.5 * m2 * k2 * (1 + 1e-12)
                devs.append(1.0 - val)
            if prev is not None:
                assert all(a < b for a, b in zip(devs, prev))  # multiplier -> 1 as eps -> 0
            prev = devs

    def test_eps_range_enforced(self, grid):
        with pytest.raises(SpectralError):
            build_mollifier(grid, 0.0)
        with pytest.raises(SpectralError):
            build_mollifier(grid, L / 4)

    def test_constant_field_unchanged(self, grid):
        m = build_mollifier(grid, 0.5)
        c = np.full(grid.physical_shape(3), 1.7)
        out = to_physical(mollify(to_spectral(vec(grid, c)), m))
        assert np.max(np.abs(out.data - 1.7)) < 1e-12

    def test_preserves_divergence_free_and_mean(self, grid, rng):
        u = to_spectral(random_divergence_free(grid, 8, rng))
        m = build_mollifier(grid, 0.5)
        um = mollify(u, m)
        assert divergence_sup(um) <= 1e-12
        assert np.allclose(um.data[:, 0, 0, 0], u.data[:, 0, 0, 0])

    def test_l2_contraction(self, grid, rng):
        u = to_spectral(random_divergence_free(grid, 10, rng))
        m = build_mollifier(grid, 0.8)
        assert l2_norm(mollify(u, m)) <= l2_norm(u) * (1 + 1e-14)

    def test_matches_direct_convolution(self, rng):
        # oracle: explicit circular convolution with the sampled kernel
        grid = Grid(32, L)
        eps = 0.6
        m = build_mollifier(grid, eps)
        blob = np.zeros(grid.physical_shape(3))
        x = grid.xc
        r2 = (x**2).reshape(-1, 1, 1) + (x**2).reshape(1, -1, 1) + (x**2).reshape(1, 1, -1)
        blob[0] = np.exp(-r2 / 0.5)
        blob[1] = np.exp(-r2 / 0.8) * 0.5
        u = vec(grid, blob)
        fast = to_physical(mollify(to_spectral(u), m)).data

        d = np.minimum(grid.x, L - grid.x)
        rr2 = (d**2).reshape(-1, 1, 1) + (d**2).reshape(1, -1, 1) + (d**2).reshape(1, 1, -1)
        s2 = rr2 / eps**2
        kernel = np.zeros_like(rr2)
        inside = s2 < 1
        kernel[inside] = np.exp(-1.0 / (1.0 - s2[inside]))
        kernel /= kernel.sum()
        direct = np.zeros_like(blob)
        nz = np.argwhere(kernel > 0)
        for i, j, k in nz:
            w = kernel[i, j, k]
            direct += w * np.roll(blob, (i, j, k), axis=(1, 2, 3))
        assert np.max(np.abs(fast - direct)) <= 1e-10 * np.max(np.abs(direct))

    def test_grid_mismatch_rejected(self, grid, rng):
        other = Grid(16, L)
        m = build_mollifier(other, 0.5)
        u = to_spectral(random_divergence_free(grid, 4, rng))
        with pytest.raises(SpectralError):
            mollify(u, m)


class TestDealias:
    def test_low_modes_unchanged(self, grid, rng):
        fh = rng.standard_normal(grid.spectral_shape(3)) + 1j * rng.standard_normal(
            grid.spectral_shape(3)
        )
        fh *= grid.dealias_mask
        u = VelocityField(grid, fh, SPECTRAL)
        assert np.array_equal(dealias(u).data, fh)

    def test_top_mode_zeroed(self, grid):
        fh = np.zeros(grid.spectral_shape(), dtype=complex)
        hi = grid.n // 3 + 1
        fh[hi, 0, 0] = 1.0
        out = dealias(ScalarField(grid, fh, SPECTRAL))
        assert np.max(np.abs(out.data)) == 0.0

    def test_product_matches_padded_convolution(self, rng):
        # oracle: exact product on a double-resolution grid, truncated back
        n = 32
        grid = Grid(n, L)
        fine = Grid(2 * n, L)
        cut = n // 3

        def band_limited(seed):
            r = np.random.default_rng(seed)
            fh = sfft.rfftn(r.standard_normal(grid.physical_shape()))
            modes = np.rint(np.fft.fftfreq(n, 1 / n)).astype(int)
            keep = (
                (np.abs(modes) <= cut).reshape(-1, 1, 1)
                & (np.abs(modes) <= cut).reshape(1, -1, 1)
                & (np.arange(grid.nh) <= cut).reshape(1, 1, -1)
            )
            return fh * keep

        ah, bh = band_limited(5), band_limited(6)
        a = sfft.irfftn(ah, s=grid.physical_shape())
        b = sfft.irfftn(bh, s=grid.physical_shape())
        prod = dealias(to_spectral(ScalarField(grid, a * b, PHYSICAL)))

        def upsample(fh_coarse):
            out = np.zeros(fine.spectral_shape(), dtype=complex)
            half = n // 2
            out[:half, :half, : grid.nh] = fh_coarse[:half, :half]
            out[:half, -half:, : grid.nh] = fh_coarse[:half, half:]
            out[-half:, :half, : grid.nh] = fh_coarse[half:, :half]
            out[-half:, -half:, : grid.nh] = fh_coarse[half:, half:]
            return out * 8  # value-preserving zero padding (2x per axis)

        af = sfft.irfftn(upsample(ah), s=fine.physical_shape())
        bf = sfft.irfftn(upsample(bh), s=fine.physical_shape())
        exact_h = sfft.rfftn(af * bf)
        # read exact coefficients back on the coarse layout, rescaled
        half = n // 2
        exact = np.zeros(grid.spectral_shape(), dtype=complex)
        exact[:half, :half] = exact_h[:half, :half, : grid.nh]
        exact[:half, half:] = exact_h[:half, -half:, : grid.nh]
        exact[half:, :half] = exact_h[-half:, :half, : grid.nh]
        exact[half:, half:] = exact_h[-half:, -half:, : grid.nh]
        exact /= 8
        exact *= grid.dealias_mask
        scale = np.max(np.abs(exact))
        assert np.max(np.abs(prod.data - exact)) <= 1e-12 * scale


class TestNonlinearTerm:
    def test_constant_fields_give_zero(self, grid):
        c = vec(grid, np.ones(grid.physical_shape(3)))
        out = nonlinear_term(to_spectral(c), to_spectral(c))
        assert np.max(np.abs(out.data)) < 1e-12

    def test_single_shear_self_advection_vanishes(self, grid):
        data = np.zeros(grid.physical_shape(3))
        data[0] = np.sin(grid.x).reshape(1, -1, 1) * np.ones((grid.n, 1, grid.n))
        u = to_spectral(vec(grid, data))
        out = nonlinear_term(u, u)
        assert np.max(np.abs(out.data)) < 1e-12

    def test_matches_convective_form(self, grid, rng):
        # oracle: (w . grad) u assembled in physical space, then projected;
        # identical to the divergence form because div w = 0
        u = to_spectral(random_divergence_free(grid, 6, rng))
        m = build_mollifier(grid, 0.5)
        w = mollify(u, m)
        div_form = nonlinear_term(u, w)

        kx, ky, kz = grid.kvec
        uh = u.data * grid.dealias_mask
        wp = sfft.irfftn(w.data * grid.dealias_mask, s=grid.physical_shape(), axes=(-3, -2, -1))
        conv = np.zeros(grid.physical_shape(3))
        for i in range(3):
            gi = sfft.irfftn(
                np.stack([1j * kx * uh[i], 1j * ky * uh[i], 1j * kz * uh[i]]),
                s=grid.physical_shape(),
                axes=(-3, -2, -1),
            )
            conv[i] = np.sum(wp * gi, axis=0)
        conv_h = sfft.rfftn(conv, axes=(-3, -2, -1)) * grid.dealias_mask
        conv_form = leray_project(VelocityField(grid, conv_h, SPECTRAL))
        scale = np.max(np.abs(conv_form.data))
        assert np.max(np.abs(div_form.data - conv_form.data)) <= 1e-10 * scale

    def test_output_divergence_free(self, grid, rng):
        u = to_spectral(random_divergence_free(grid, 6, rng))
        out = nonlinear_term(u, u)
        assert divergence_sup(out) <= 1e-12


class TestPressure:
    def test_zero_velocity_zero_pressure(self, grid):
        u = to_spectral(vec(grid, np.zeros(grid.physical_shape(3))))
        p = pressure_from_velocity(u)
        assert np.max(np.abs(p.data)) == 0.0

    def test_taylor_green_closed_form(self):
        grid = Grid(64, L)
        p = to_physical(pressure_from_velocity(to_spectral(taylor_green_field(grid))))
        ref = taylor_green_pressure(grid)
        assert np.max(np.abs(p.data - ref.data)) <= 1e-10 * np.max(np.abs(ref.data))

    def test_projection_identity(self, grid, rng):
        # residual oracle: div(u x u) + grad p must equal P div(u x u)
        from ssns.spectral import advection_tensor_divergence, _project_data

        u = to_spectral(random_divergence_free(grid, 6, rng))
        fh = advection_tensor_divergence(u, u)
        p = pressure_from_velocity(u)
        kx, ky, kz = grid.kvec
        lhs = fh + np.stack([1j * kx * p.data, 1j * ky * p.data, 1j * kz * p.data])
        rhs = _project_data(grid, fh)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(rhs))

    def test_pressure_zero_mean(self, grid, rng):
        u = to_spectral(random_divergence_free(grid, 6, rng))
        p = pressure_from_velocity(u)
        assert p.data[0, 0, 0] == 0.0


class TestNorms:
    def test_parseval_matches_physical(self, grid, rng):
        u = random_divergence_free(grid, 9, rng)
        assert l2_norm_sq(u) == pytest.approx(l2_norm_sq(to_spectral(u)), rel=1e-12)
