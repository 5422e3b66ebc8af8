"""
Tests for independent couplings of one-dimensional subspace forms
"""

import pytest

from labs.coupling import (
    ProductForm,
    TensorFunction,
    direct_dirichlet_energy,
    product_energy,
    properness_certificate,
    rectangle_part_core,
)
from labs.errors import PreconditionError
from labs.forms1d import BumpProfile, CoreFunction, HatProfile, ScaledProfile
from labs.scale import build_fat_cantor, build_identity


@pytest.fixture
def identity_pair():
    s = build_identity((0.0, 1.0))
    t = build_identity((0.0, 1.0))
    return ProductForm(((s, (0.0, 1.0)), (t, (0.0, 1.0))))


def hats(P, first=(0.0, 1.0), second=(0.0, 1.0)):
    return TensorFunction((CoreFunction(HatProfile(*first), P.scales[0]),
                           CoreFunction(HatProfile(*second), P.scales[1])))


class TestProductEnergy:

    def test_tensor_of_hats(self, identity_pair):
        # each factor has energy 2 and squared norm 1/3
        assert product_energy(identity_pair, hats(identity_pair)) == pytest.approx(4.0 / 3.0, rel=1e-12)

    def test_matches_two_dimensional_finite_differences(self, identity_pair):
        u = hats(identity_pair, (0.1, 0.7), (0.2, 0.9))
        tensor = product_energy(identity_pair, u)
        assert direct_dirichlet_energy(identity_pair, u) == pytest.approx(tensor, rel=1e-3)

    def test_fat_cantor_component(self):
        s = build_fat_cantor(0.5, 6)
        P = ProductForm(((build_identity(), (0.0, 1.0)), (s, (0.0, 1.0))))
        u = TensorFunction((CoreFunction(BumpProfile(0.2, 0.8), P.scales[0]),
                            CoreFunction(BumpProfile(0.05, 0.45), s)))
        tensor = product_energy(P, u)
        assert direct_dirichlet_energy(P, u, grid_n=1024) == pytest.approx(tensor, rel=1e-3)

    def test_permuting_components(self, identity_pair):
        u = hats(identity_pair, (0.1, 0.7), (0.2, 0.9))
        swapped = product_energy(identity_pair.permuted([1, 0]), u.permuted([1, 0]))
        assert swapped == pytest.approx(product_energy(identity_pair, u), rel=1e-12)

    @pytest.mark.parametrize("c", [-2.0, 0.5, 3.0])
    def test_energy_is_quadratic_in_scaling(self, c):
        s = build_fat_cantor(0.5, 6)
        P = ProductForm(((build_identity(), (0.0, 1.0)), (s, (0.0, 1.0))))
        first = CoreFunction(BumpProfile(0.2, 0.8), P.scales[0])
        second = CoreFunction(BumpProfile(0.05, 0.45), s)
        scaled = TensorFunction((CoreFunction(ScaledProfile(first.profile, c), P.scales[0]), second))
        base = product_energy(P, TensorFunction((first, second)))
        assert product_energy(P, scaled) == pytest.approx(c ** 2 * base, rel=1e-12)

    def test_factor_count_must_match(self, identity_pair):
        single = TensorFunction((CoreFunction(HatProfile(0.0, 1.0), identity_pair.scales[0]),))
        with pytest.raises(PreconditionError):
            product_energy(identity_pair, single)


class TestProperness:

    @pytest.mark.parametrize("depth", [2, 6, 10])
    def test_fat_cantor_flat_mass_is_exact(self, depth):
        P = ProductForm(((build_identity(), (0.0, 1.0)), (build_fat_cantor(0.5, depth), (0.0, 1.0))))
        certificate = properness_certificate(P)
        assert certificate.flat_masses == [0.0, 0.5 * (1.0 - 2.0 ** -depth)]
        assert certificate.proper

    def test_brownian_coupling_is_not_proper(self, identity_pair):
        assert not properness_certificate(identity_pair).proper


class TestRectangleCore:

    def test_membership(self, identity_pair):
        admits = rectangle_part_core(identity_pair, [(0.1, 0.9), (0.0, 1.0)])
        assert admits(hats(identity_pair, (0.2, 0.8), (0.0, 1.0)))
        assert not admits(hats(identity_pair, (0.0, 1.0), (0.0, 1.0)))
        assert not admits(hats(identity_pair, (0.1, 0.8), (0.0, 1.0)))

    def test_side_starting_inside_a_flat_piece(self):
        s = build_fat_cantor(0.5, 4)
        P = ProductForm(((s, (0.0, 1.0)), (build_identity(), (0.0, 1.0))))
        left, right = float(s.gap_left[0]), float(s.gap_right[0])
        u = TensorFunction((CoreFunction(HatProfile(float(s.eval(left)), float(s.eval(0.99))), s),
                            CoreFunction(HatProfile(0.0, 1.0), P.scales[1])))
        assert rectangle_part_core(P, [(0.5 * (left + right), 1.0), (0.0, 1.0)])(u)
        assert not rectangle_part_core(P, [(right + 1e-3, 1.0), (0.0, 1.0)])(u)

    def test_side_outside_the_component(self, identity_pair):
        with pytest.raises(PreconditionError):
            rectangle_part_core(identity_pair, [(-0.5, 0.5), (0.0, 1.0)])

    def test_json_round_trip(self, identity_pair):
        rebuilt = ProductForm.from_json(identity_pair.to_json())
        assert rebuilt.intervals == identity_pair.intervals
        assert rebuilt.to_json() == identity_pair.to_json()
