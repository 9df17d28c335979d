import cmath
import math

import numpy as np
import pytest

from orbit_bergman.errors import BoundaryPointError
from orbit_bergman.moebius import (
    DISC,
    HALF_PLANE,
    IDENTITY,
    S,
    T,
    GroupElement,
    Point,
    apply_moebius,
    automorphy,
    branch_log,
    cocycle_defect,
    disc_point,
    half_plane_point,
    imag_factor,
    to_disc,
    to_half_plane,
)


def random_elements(rng, count, max_len=8):
    """Random words in S, T, T^-1 reduced to matrices."""
    gens = [S, T, T.inverse()]
    out = []
    for _ in range(count):
        g = IDENTITY
        for _ in range(rng.integers(0, max_len + 1)):
            g = g * gens[rng.integers(0, 3)]
        out.append(g)
    return out


def random_points(rng, count, box=2.0):
    xs = rng.uniform(-box, box, count)
    ys = rng.uniform(0.1, box, count)
    return [half_plane_point(complex(x, y)) for x, y in zip(xs, ys)]


class TestGroupElement:
    def test_determinant_enforced(self):
        with pytest.raises(ValueError):
            GroupElement(1, 0, 0, 2)

    def test_canonical_sign(self):
        g = GroupElement(0, 1, -1, 0)
        assert g.matrix == (0, -1, 1, 0)
        h = GroupElement(-1, 0, 0, -1)
        assert h.matrix == (1, 0, 0, 1)

    def test_word_ignored_by_equality(self):
        assert GroupElement(1, 1, 0, 1, word=("T",)) == GroupElement(1, 1, 0, 1)

    def test_inverse_and_product(self):
        rng = np.random.default_rng(7)
        for g in random_elements(rng, 50):
            assert (g * g.inverse()).is_identity
            assert (g.inverse() * g).is_identity

    def test_word_multiplies_out(self):
        rng = np.random.default_rng(3)
        lookup = {"S": S, "T": T, "T^-1": T.inverse()}
        for g in random_elements(rng, 50):
            prod = IDENTITY
            for tok in g.word:
                prod = prod * lookup[tok]
            assert prod == g  # equality is modulo sign already


class TestPoints:
    def test_boundary_rejected(self):
        with pytest.raises(BoundaryPointError):
            half_plane_point(1.0)
        with pytest.raises(BoundaryPointError):
            half_plane_point(2 - 1e-15j)
        with pytest.raises(BoundaryPointError):
            disc_point(1.0)
        with pytest.raises(BoundaryPointError):
            disc_point(cmath.exp(0.3j))


class TestApplyMoebius:
    def test_fixed_point_of_s(self):
        assert apply_moebius(S, half_plane_point(1j)).value == pytest.approx(1j)

    def test_translation(self):
        assert apply_moebius(T, half_plane_point(1j)).value == pytest.approx(1 + 1j)

    def test_lower_triangular(self):
        g = GroupElement(1, 0, 1, 1)
        got = apply_moebius(g, half_plane_point(1j)).value
        assert got == pytest.approx((1 + 1j) / 2)

    def test_group_law(self):
        rng = np.random.default_rng(11)
        els = random_elements(rng, 12)
        pts = random_points(rng, 6)
        for g in els[:6]:
            for h in els[6:]:
                gh = g * h
                for z in pts:
                    lhs = apply_moebius(g, apply_moebius(h, z)).value
                    rhs = apply_moebius(gh, z).value
                    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))

    def test_disc_model_matches_conjugation(self):
        rng = np.random.default_rng(5)
        for g in random_elements(rng, 20):
            w = disc_point(0.3 + 0.4j)
            direct = apply_moebius(g, w).value
            via_half = to_disc(apply_moebius(g, to_half_plane(w))).value
            assert abs(direct - via_half) < 1e-12


class TestImagFactor:
    def test_s_at_i(self):
        assert imag_factor(S, half_plane_point(1j)) == pytest.approx(1.0)

    def test_translation_preserves_im(self):
        assert imag_factor(T, half_plane_point(2j)) == pytest.approx(2.0)

    def test_lower_triangular(self):
        g = GroupElement(1, 0, 1, 1)
        assert imag_factor(g, half_plane_point(1j)) == pytest.approx(0.5)

    def test_matches_apply(self):
        rng = np.random.default_rng(23)
        for g in random_elements(rng, 30):
            for z in random_points(rng, 3):
                im = apply_moebius(g, z).value.imag
                assert imag_factor(g, z) == pytest.approx(im, rel=1e-12)


class TestCayley:
    def test_center(self):
        assert to_disc(half_plane_point(1j)).value == pytest.approx(0)
        assert to_half_plane(disc_point(0)).value == pytest.approx(1j)

    def test_formula(self):
        assert to_disc(half_plane_point(2j)).value == pytest.approx(1 / 3)

    def test_mutually_inverse(self):
        rng = np.random.default_rng(2)
        for z in random_points(rng, 40):
            w = to_disc(z)
            back = to_half_plane(w).value
            assert abs(back - z.value) < 1e-12 * max(1.0, abs(z.value))


class TestBranchLog:
    def test_translation_gives_zero(self):
        assert branch_log(T, half_plane_point(0.7 + 3j)).log_value == 0

    def test_s_at_i(self):
        assert branch_log(S, half_plane_point(1j)).log_value == pytest.approx(1j * math.pi / 2)

    def test_exp_recovers_factor(self):
        rng = np.random.default_rng(17)
        for g in random_elements(rng, 50):
            for z in random_points(rng, 2):
                val = cmath.exp(branch_log(g, z).log_value)
                expect = g.c * z.value + g.d
                assert abs(val - expect) < 1e-12 * max(1.0, abs(expect))

    def test_continuity_along_path(self):
        # no 2*pi*i jumps between adjacent samples at spacing 1e-3
        rng = np.random.default_rng(29)
        for g in random_elements(rng, 10):
            ts = np.arange(0, 1.0, 1e-3)
            zs = (-2 + 4 * ts) + 1j * (0.2 + 1.5 * np.sin(np.pi * ts) ** 2)
            vals = np.array(
                [branch_log(g, half_plane_point(z)).log_value for z in zs]
            )
            assert np.all(np.abs(np.diff(vals)) < 0.5)


class TestAutomorphy:
    def test_translation(self):
        assert automorphy(T, half_plane_point(1j), 13) == pytest.approx(1.0)

    def test_s_weight_two(self):
        assert automorphy(S, half_plane_point(1j), 2) == pytest.approx(-1.0)

    def test_modulus_identity(self):
        rng = np.random.default_rng(31)
        for g in random_elements(rng, 25):
            for z in random_points(rng, 2):
                for s in (1.5, 2.5, 13.0):
                    got = abs(automorphy(g, z, s))
                    expect = abs(g.c * z.value + g.d) ** s
                    assert got == pytest.approx(expect, rel=1e-12)


class TestCocycleDefect:
    def test_identity_pair(self):
        assert cocycle_defect(IDENTITY, IDENTITY, half_plane_point(2j), 1.7) == pytest.approx(1.0)

    def test_even_integer_weight_trivial(self):
        rng = np.random.default_rng(13)
        els = random_elements(rng, 10)
        z = half_plane_point(0.3 + 1.1j)
        for g in els[:5]:
            for h in els[5:]:
                assert abs(cocycle_defect(g, h, z, 2.0) - 1.0) < 1e-10

    def test_unit_modulus(self):
        rng = np.random.default_rng(37)
        els = random_elements(rng, 10)
        z = half_plane_point(-0.4 + 0.9j)
        for g in els[:5]:
            for h in els[5:]:
                assert abs(abs(cocycle_defect(g, h, z, 1.5)) - 1.0) < 1e-10

    def test_independent_of_z(self):
        rng = np.random.default_rng(41)
        els = random_elements(rng, 6)
        grid = [complex(x, y) for x in (-1.2, -0.3, 0.5, 1.4) for y in (0.2, 0.8, 2.5)]
        for g in els[:3]:
            for h in els[3:]:
                vals = [cocycle_defect(g, h, half_plane_point(z), 1.5) for z in grid]
                assert max(abs(v - vals[0]) for v in vals) < 1e-10

    def test_s_s_regression_value(self):
        # S*S = id in PSL(2,Z); j(S, S(i))^s j(S, i)^s = exp(1.5*i*pi) = -i,
        # so the defect at s = 1.5 is 1/(-i) = i.
        got = cocycle_defect(S, S, half_plane_point(1j), 1.5)
        assert got == pytest.approx(1j)
        assert abs(abs(got) - 1.0) < 1e-12
