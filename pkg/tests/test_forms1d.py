"""
Tests for the one-dimensional subspace energies
"""

import numpy as np
import pytest

from labs.errors import PreconditionError, UnsupportedProfileError
from labs.forms1d import (
    SWEEP_COLUMNS,
    BumpProfile,
    ClampedProfile,
    CoreFunction,
    HatProfile,
    ScaledProfile,
    dirichlet_energy,
    energy_bilinear,
    energy_Es,
    energy_sweep,
    fd_step,
    l2_norm_squared,
    profile_from_descriptor,
    verify_subspace_identity,
    weak_generator_residual,
)
from labs.scale import build_fat_cantor, build_inverse_cantor


class TestProfiles:

    def test_hat_slope_and_support(self):
        hat = HatProfile(0.0, 1.0)
        assert hat.slope == 2.0
        assert hat(0.5) == 1.0
        assert hat(np.array([-0.1, 1.1])).tolist() == [0.0, 0.0]

    def test_bump_derivative_vanishes_at_the_ends(self, bump):
        np.testing.assert_allclose(bump.derivative(np.array([0.05, 0.45])), 0.0, atol=1e-12)
        assert bump(0.25) == pytest.approx(1.0)

    def test_descriptor_round_trip(self, bump):
        profile = ClampedProfile(ScaledProfile(bump, 2.0), 0.0, 1.0)
        rebuilt = profile_from_descriptor(profile.describe())
        y = np.linspace(0.0, 0.5, 101)
        np.testing.assert_array_equal(rebuilt(y), profile(y))

    def test_clamp_finds_level_crossings(self, bump):
        clamped = ClampedProfile(ScaledProfile(bump, 2.0), 0.0, 1.0)
        crossings = clamped.breakpoints()
        inner = crossings[(crossings > 0.05) & (crossings < 0.45)]
        assert inner.size == 2
        np.testing.assert_allclose(2.0 * bump(inner), 1.0, atol=1e-10)

    def test_clamp_rejects_positive_lower_level(self, bump):
        with pytest.raises(PreconditionError):
            ClampedProfile(bump, 0.5, 1.0)

    def test_second_derivative_capability(self, bump):
        assert bump.has_second_derivative
        assert ScaledProfile(bump, -2.0).has_second_derivative
        assert not HatProfile(0.0, 1.0).has_second_derivative
        assert not ClampedProfile(bump, 0.0, 0.5).has_second_derivative
        assert not ScaledProfile(HatProfile(0.0, 1.0), 2.0).has_second_derivative
        with pytest.raises(UnsupportedProfileError):
            HatProfile(0.0, 1.0).second_derivative(np.array([0.25]))

    def test_unknown_kind(self):
        with pytest.raises(PreconditionError):
            profile_from_descriptor({"kind": "spline"})


class TestCoreFunction:

    def test_support_must_lie_in_the_image(self, identity_scale):
        with pytest.raises(PreconditionError):
            CoreFunction(HatProfile(0.5, 1.5), identity_scale)

    def test_constant_on_flat_pieces(self, fat_cantor, bump):
        u = CoreFunction(bump, fat_cantor)
        left, right, _ = fat_cantor.gaps((0.2, 0.8))[0]
        values = u.value(np.linspace(left, right, 17)[:-1])
        assert np.ptp(values) <= 1e-12

    def test_window_starts_after_a_flat_piece_at_the_lower_level(self):
        s = build_fat_cantor(0.5, 4)
        left, right = float(s.gap_left[0]), float(s.gap_right[0])
        u = CoreFunction(HatProfile(float(s.eval(left)), float(s.eval(0.99))), s)
        assert np.max(np.abs(u.value(np.linspace(left, right, 9)))) <= 1e-12
        assert u.x_window[0] == pytest.approx(right, abs=1e-12)
        assert u.x_window[1] == pytest.approx(0.99, abs=1e-12)

    def test_window_ends_before_a_flat_piece_at_the_upper_level(self):
        s = build_fat_cantor(0.5, 4)
        left = float(s.gap_left[-1])
        u = CoreFunction(HatProfile(0.1, float(s.eval(left))), s)
        assert u.x_window[1] == pytest.approx(left, abs=1e-12)


class TestEnergies:

    def test_hat_on_identity(self, unit_hat_on_identity):
        assert energy_Es(unit_hat_on_identity) == pytest.approx(2.0, rel=1e-12)
        assert dirichlet_energy(unit_hat_on_identity, 4096) == pytest.approx(2.0, rel=1e-9)
        assert l2_norm_squared(unit_hat_on_identity) == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_bilinear_is_symmetric(self, fat_cantor):
        u = CoreFunction(BumpProfile(0.05, 0.35), fat_cantor)
        v = CoreFunction(BumpProfile(0.15, 0.45), fat_cantor)
        assert energy_bilinear(u, v) == pytest.approx(energy_bilinear(v, u), rel=1e-14)
        assert energy_bilinear(u, u) == pytest.approx(energy_Es(u), rel=1e-10)

    def test_cauchy_schwarz(self, fat_cantor):
        profiles = [BumpProfile(0.05, 0.35), BumpProfile(0.15, 0.45), HatProfile(0.1, 0.3),
                    ScaledProfile(HatProfile(0.2, 0.5), -3.0)]
        functions = [CoreFunction(profile, fat_cantor) for profile in profiles]
        for u in functions:
            for v in functions:
                cross = energy_bilinear(u, v)
                assert cross ** 2 <= energy_bilinear(u, u) * energy_bilinear(v, v) * (1.0 + 1e-12) + 1e-15

    def test_unit_contraction_does_not_raise_the_energy(self, fat_cantor, bump):
        raw = ScaledProfile(bump, 2.0)
        clamped = CoreFunction(ClampedProfile(raw, 0.0, 1.0), fat_cantor)
        unclamped = CoreFunction(raw, fat_cantor)
        assert energy_Es(clamped) <= energy_Es(unclamped)
        assert dirichlet_energy(clamped, 1 << 14) <= dirichlet_energy(unclamped, 1 << 14)

    def test_dirichlet_energy_is_the_midpoint_central_difference(self, fat_cantor, bump):
        u = CoreFunction(bump, fat_cantor)
        h = fd_step(u, 4096)
        lo, hi = u.x_window
        midpoints = lo + h * (np.arange(int(np.ceil((hi - lo) / h))) + 0.5)
        central = (u.value(midpoints + 0.5 * h) - u.value(midpoints - 0.5 * h)) / h
        assert dirichlet_energy(u, 4096) == pytest.approx(0.5 * h * np.sum(central ** 2), rel=1e-9)

    def test_quadrature_cell_floor(self, unit_hat_on_identity):
        with pytest.raises(PreconditionError):
            energy_Es(unit_hat_on_identity, quad_n=8)

    def test_energy_does_not_depend_on_depth(self, fat_cantor, bump):
        u = CoreFunction(bump, fat_cantor)
        assert energy_Es(u) == pytest.approx(energy_Es(u.at_depth(9)), rel=1e-12)


class TestSubspaceIdentity:

    def test_fat_cantor_sweep_converges(self, fat_cantor, bump):
        report = verify_subspace_identity(CoreFunction(bump, fat_cantor), depths=[6, 8, 10], grid_n=1 << 16)
        assert report.depths == [6, 8, 10]
        assert report.monotone
        assert report.residual <= 1e-3
        assert report.converged

    def test_inverse_cantor_sweep(self, bump):
        u = CoreFunction(bump, build_inverse_cantor(5))
        report = verify_subspace_identity(u, depths=[5, 7], grid_n=1 << 16)
        assert report.family == "inverse_cantor"
        assert max(report.residuals) <= 1e-2
        assert report.ratio == pytest.approx(1.0, abs=1e-2)

    def test_affine_counterexample_doubles_the_energy(self, affine_half, bump):
        report = verify_subspace_identity(CoreFunction(bump, affine_half), grid_n=1 << 16)
        assert report.ratio == pytest.approx(2.0, abs=1e-6)
        assert not report.converged

    def test_grid_sizes_per_depth(self, fat_cantor, bump):
        u = CoreFunction(bump, fat_cantor)
        report = verify_subspace_identity(u, depths=[4, 5], grid_n=[1024, 2048])
        assert report.grid_sizes == [1024, 2048]
        with pytest.raises(PreconditionError):
            verify_subspace_identity(u, depths=[4, 5], grid_n=[1024])

    def test_energy_sweep_frame(self, fat_cantor, bump):
        frame = energy_sweep(bump, fat_cantor, [4, 5], grid_n=2048)
        assert list(frame.columns) == SWEEP_COLUMNS
        assert frame["depth"].tolist() == [4, 5]
        assert (frame["family"] == "fat_cantor").all()


class TestWeakGenerator:

    def test_identity_holds_on_fat_cantor(self, fat_cantor, bump):
        u = CoreFunction(bump, fat_cantor)
        v = CoreFunction(BumpProfile(0.1, 0.4), fat_cantor)
        assert weak_generator_residual(u, v) <= 1e-9

    def test_hat_has_no_second_derivative(self, unit_hat_on_identity):
        with pytest.raises(UnsupportedProfileError):
            weak_generator_residual(unit_hat_on_identity, unit_hat_on_identity)

    def test_clamped_profile_has_no_second_derivative(self, fat_cantor, bump):
        u = CoreFunction(ClampedProfile(ScaledProfile(bump, 2.0), 0.0, 1.0), fat_cantor)
        with pytest.raises(UnsupportedProfileError):
            weak_generator_residual(u, CoreFunction(bump, fat_cantor))

    def test_needs_zero_one_slope(self, affine_half, bump):
        u = CoreFunction(bump, affine_half)
        with pytest.raises(PreconditionError):
            weak_generator_residual(u, u)
