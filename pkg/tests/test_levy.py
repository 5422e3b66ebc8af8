"""
Tests for translation-invariant Lévy forms on grids
"""

import numpy as np
import pytest

from labs.errors import AliasingError, PreconditionError
from labs.levy import (
    GridFunction,
    LevySymbol,
    diagonalize,
    energy_direct,
    energy_fourier,
    local_positivity_certificate,
    pairing_identity_residual,
    symbol_eval,
)

SIGMA = 0.5


@pytest.fixture
def gaussian_1d():
    return GridFunction.gaussian([0.0], SIGMA, -4.0, 4.0, 256)


@pytest.fixture
def brownian_1d():
    return LevySymbol(np.eye(1), np.empty((0, 1)), np.empty(0))


@pytest.fixture
def jumps_1d():
    return LevySymbol(np.zeros((1, 1)), np.array([[0.5], [-0.5]]), np.array([1.0, 1.0]))


class TestSymbol:

    def test_eval(self, jumps_1d):
        assert symbol_eval(jumps_1d, 0.0) == 0.0
        assert symbol_eval(jumps_1d, np.pi) == pytest.approx(2.0 * (1.0 - np.cos(0.5 * np.pi)))
        values = symbol_eval(jumps_1d, np.array([[1.0], [2.0]]))
        assert values.shape == (2,)

    def test_atoms_must_be_symmetric(self):
        with pytest.raises(PreconditionError):
            LevySymbol(np.zeros((1, 1)), np.array([[0.5]]), np.array([1.0]))

    def test_S_must_be_positive_semidefinite(self):
        with pytest.raises(PreconditionError):
            LevySymbol(np.diag([1.0, -1.0]), np.empty((0, 2)), np.empty(0))

    def test_json_round_trip(self):
        sym = LevySymbol(np.eye(2), np.array([[0.5, 0.0], [-0.5, 0.0]]), np.array([0.25, 0.25]))
        rebuilt = LevySymbol.from_json(sym.to_json())
        np.testing.assert_array_equal(rebuilt.S, sym.S)
        np.testing.assert_array_equal(rebuilt.atoms, sym.atoms)

    def test_rotation_invariance_of_the_symbol(self):
        sym = LevySymbol(np.array([[2.0, 1.0], [1.0, 2.0]]), np.array([[0.5, 0.25], [-0.5, -0.25]]),
                         np.array([1.0, 1.0]))
        angle = 0.3
        P = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
        xi = np.array([0.7, -1.3])
        assert symbol_eval(sym.rotated(P), xi) == pytest.approx(symbol_eval(sym, P @ xi), rel=1e-12)

    def test_symbol_is_nonnegative_and_even(self, rng):
        sym = LevySymbol(np.array([[2.0, 1.0], [1.0, 2.0]]), np.array([[0.5, 0.25], [-0.5, -0.25], [1.0, -0.5],
                                                                       [-1.0, 0.5]]), np.array([1.0, 1.0, 0.3, 0.3]))
        xi = 20.0 * rng.standard_normal((500, 2))
        values = symbol_eval(sym, xi)
        assert np.all(values >= 0.0)
        np.testing.assert_allclose(symbol_eval(sym, -xi), values, rtol=1e-12, atol=1e-12)


class TestDiagonalize:

    def test_full_rank(self):
        diag = diagonalize(LevySymbol(np.array([[2.0, 1.0], [1.0, 2.0]]), np.empty((0, 2)), np.empty(0)))
        np.testing.assert_allclose(diag.eigenvalues, [3.0, 1.0], atol=1e-12)
        assert diag.rank == 2
        assert diag.reconstruction_error <= 1e-12

    def test_degenerate(self):
        diag = diagonalize(LevySymbol(np.ones((2, 2)), np.empty((0, 2)), np.empty(0)))
        assert diag.rank == 1
        np.testing.assert_allclose(np.abs(diag.positive_directions[:, 0]), [2 ** -0.5, 2 ** -0.5], atol=1e-12)


class TestEnergies:

    def test_brownian_gaussian_closed_form(self, brownian_1d, gaussian_1d):
        expected = np.sqrt(np.pi) / (4.0 * SIGMA)
        assert energy_fourier(brownian_1d, gaussian_1d) == pytest.approx(expected, rel=1e-8)
        direct = energy_direct(brownian_1d, gaussian_1d)
        assert direct.jump == 0.0
        assert direct.local == pytest.approx(expected, rel=1e-3)

    def test_pure_jump_closed_form(self, jumps_1d, gaussian_1d):
        expected = 2.0 * SIGMA * np.sqrt(np.pi) * (1.0 - np.exp(-0.25 / (4.0 * SIGMA ** 2)))
        direct = energy_direct(jumps_1d, gaussian_1d)
        assert not direct.interpolated
        assert direct.local == 0.0
        assert direct.total == pytest.approx(expected, rel=1e-8)
        assert energy_fourier(jumps_1d, gaussian_1d) == pytest.approx(expected, rel=1e-8)

    def test_fourier_matches_direct_in_two_dimensions(self):
        sym = LevySymbol(np.eye(2), np.array([[0.5, 0.0], [-0.5, 0.0], [0.0, 0.5], [0.0, -0.5]]),
                         np.ones(4))
        u = GridFunction.gaussian([0.0, 0.0], SIGMA, -4.0, 4.0, 128)
        direct = energy_direct(sym, u).total
        assert energy_fourier(sym, u) == pytest.approx(direct, rel=1e-3)

    def test_off_grid_atom_is_interpolated(self, gaussian_1d):
        sym = LevySymbol(np.zeros((1, 1)), np.array([[0.51], [-0.51]]), np.array([1.0, 1.0]))
        direct = energy_direct(sym, gaussian_1d)
        assert direct.interpolated_atoms == (0, 1)
        assert direct.total == pytest.approx(energy_fourier(sym, gaussian_1d), rel=1e-3)

    def test_parallelogram_law(self, jumps_1d):
        sym = LevySymbol(np.eye(1), jumps_1d.atoms, jumps_1d.weights)
        u = GridFunction.gaussian([-0.1], SIGMA, -4.0, 4.0, 256)
        v = GridFunction.smooth_bump([-0.4], 1.0, -4.0, 4.0, 256, amplitude=2.0)
        left = energy_fourier(sym, u + v) + energy_fourier(sym, u - v)
        right = 2.0 * energy_fourier(sym, u) + 2.0 * energy_fourier(sym, v)
        assert left == pytest.approx(right, rel=1e-10)

    def test_energies_follow_the_rotated_symbol(self):
        sym = LevySymbol(np.array([[2.0, 1.0], [1.0, 3.0]]), np.array([[0.5, 0.25], [-0.5, -0.25]]),
                         np.array([1.0, 1.0]))
        u = GridFunction.gaussian([0.125, -0.25], 0.4, -4.0, 4.0, 64) \
            + 0.5 * GridFunction.gaussian([-0.25, 0.125], 0.4, -4.0, 4.0, 64)
        # swapping the axes is orthogonal and maps the grid onto itself
        P = np.array([[0.0, 1.0], [1.0, 0.0]])
        swapped = u.with_values(u.values.T)
        rotated = sym.rotated(P)
        assert energy_fourier(rotated, u) == pytest.approx(energy_fourier(sym, swapped), rel=1e-10)
        assert energy_direct(rotated, u).total == pytest.approx(energy_direct(sym, swapped).total, rel=1e-10)

    def test_atom_beyond_half_box_is_rejected(self, gaussian_1d):
        sym = LevySymbol(np.zeros((1, 1)), np.array([[5.0], [-5.0]]), np.array([1.0, 1.0]))
        with pytest.raises(AliasingError):
            energy_fourier(sym, gaussian_1d)

    def test_atom_at_half_box_is_accepted(self, gaussian_1d):
        sym = LevySymbol(np.zeros((1, 1)), np.array([[4.0], [-4.0]]), np.array([1.0, 1.0]))
        assert energy_fourier(sym, gaussian_1d) >= 0.0

    def test_grid_function_must_vanish_on_the_boundary(self):
        with pytest.raises(PreconditionError):
            GridFunction.gaussian([0.0], 2.0, -4.0, 4.0, 64)


class TestPairing:

    def test_disjoint_supports(self, jumps_1d):
        u = GridFunction.smooth_bump([-0.25], 0.2, -4.0, 4.0, 256)
        v = GridFunction.smooth_bump([0.25], 0.2, -4.0, 4.0, 256)
        assert pairing_identity_residual(jumps_1d, u, v) <= 1e-12

    def test_overlapping_supports_are_rejected(self, jumps_1d, gaussian_1d):
        with pytest.raises(PreconditionError):
            pairing_identity_residual(jumps_1d, gaussian_1d, gaussian_1d)


class TestLocalPositivity:

    def test_holds_for_fixtures_varying_along_S(self):
        sym = LevySymbol(np.diag([1.0, 0.0]), np.empty((0, 2)), np.empty(0))
        fixture = GridFunction.gaussian([0.0, 0.0], SIGMA, -4.0, 4.0, 64)
        certificate = local_positivity_certificate(sym, [fixture])
        assert certificate.holds
        assert certificate.rank == 1
        assert certificate.eligible == [0]
        assert certificate.local_energies[0] > 0

    def test_fixture_constant_along_S_is_excluded(self):
        sym = LevySymbol(np.diag([1.0, 0.0]), np.empty((0, 2)), np.empty(0))
        fixture = GridFunction.from_function(
            lambda x, y: np.exp(-y ** 2 / (2.0 * SIGMA ** 2)), [-4.0, -4.0], [4.0, 4.0], 64, periodic=True)
        certificate = local_positivity_certificate(sym, [fixture])
        assert certificate.excluded == [0]
        assert certificate.note == "no eligible fixture"

    def test_pure_jump_symbol_has_no_local_part(self, jumps_1d, gaussian_1d):
        certificate = local_positivity_certificate(jumps_1d, [gaussian_1d])
        assert certificate.holds
        assert certificate.rank == 0
        assert certificate.note == "no local part"
