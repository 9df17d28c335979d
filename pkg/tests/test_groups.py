import cmath
import math

import numpy as np
import pytest

from orbit_bergman.errors import BudgetError
from orbit_bergman.groups import (
    GAMMA2,
    PSL2Z,
    Budget,
    enumerate_group,
    gamma2_decompose,
    get_preset,
    orbit_sample,
    reduce_to_fundamental_domain,
    stabilizer_order,
    word_to_element,
)
from orbit_bergman.moebius import (
    GAMMA2_A,
    IDENTITY,
    S,
    T,
    GroupElement,
    apply_moebius,
    disc_point,
    half_plane_point,
    to_disc,
)
from orbit_bergman.ordering import FreeWord


def brute_force_ball(preset, length):
    """Independent BFS oracle over the generator set."""
    level = {IDENTITY.matrix}
    seen = {IDENTITY.matrix}
    for _ in range(length):
        nxt = set()
        for key in level:
            g = GroupElement(*key)
            for gen in preset.bfs_generators:
                h = g * gen
                if h.matrix not in seen:
                    seen.add(h.matrix)
                    nxt.add(h.matrix)
        level = nxt
    return seen


class TestPresets:
    def test_covolume_index_relation(self):
        assert GAMMA2.covolume_over_pi == 6 * PSL2Z.covolume_over_pi

    def test_lookup(self):
        assert get_preset("pslz") is PSL2Z
        assert get_preset("Gamma2") is GAMMA2
        with pytest.raises(ValueError):
            get_preset("nope")

    def test_elliptic_data(self):
        assert PSL2Z.elliptic[0] == (1j, 2)
        assert abs(PSL2Z.elliptic[1][0] - cmath.exp(1j * math.pi / 3)) < 1e-15
        assert GAMMA2.elliptic == ()


class TestEnumerate:
    def test_word_length_one(self):
        got = enumerate_group(PSL2Z, max_word_len=1)
        mats = {g.matrix for g in got}
        assert mats == {(1, 0, 0, 1), (0, -1, 1, 0), (1, 1, 0, 1), (1, -1, 0, 1)}
        assert len(got) == 4

    def test_word_length_zero(self):
        assert [g.matrix for g in enumerate_group(PSL2Z, max_word_len=0)] == [(1, 0, 0, 1)]

    def test_bfs_matches_oracle(self):
        for length in (2, 3, 5):
            got = {g.matrix for g in enumerate_group(PSL2Z, max_word_len=length)}
            assert got == brute_force_ball(PSL2Z, length)

    def test_gamma2_congruence(self):
        for g in enumerate_group(GAMMA2, max_word_len=4):
            assert g.in_gamma2()

    def test_entry_ball_complete(self):
        # oracle: BFS deep enough to exhaust the sup-norm-5 ball, then filter
        deep = {
            m for m in brute_force_ball(PSL2Z, 14)
            if max(abs(v) for v in m) <= 5
        }
        ball = {g.matrix for g in enumerate_group(PSL2Z, max_entry=5)}
        assert deep <= ball
        for m in ball:
            assert max(abs(v) for v in m) <= 5
            a, b, c, d = m
            assert a * d - b * c == 1
            assert c > 0 or (c == 0 and d > 0)
        assert deep == ball  # BFS depth 14 does exhaust this small ball

    def test_entry_ball_gamma2(self):
        ball = {g.matrix for g in enumerate_group(GAMMA2, max_entry=6)}
        psl_ball = enumerate_group(PSL2Z, max_entry=6)
        expect = {g.matrix for g in psl_ball if g.in_gamma2()}
        assert ball == expect

    def test_inverse_closed(self):
        for kwargs in ({"max_word_len": 4}, {"max_entry": 7}):
            got = {g.matrix for g in enumerate_group(PSL2Z, **kwargs)}
            for m in got:
                assert GroupElement(*m).inverse().matrix in got

    def test_budget_overflow_refused(self):
        with pytest.raises(BudgetError):
            enumerate_group(PSL2Z, max_entry=50, max_count=100)

    def test_combined_budgets(self):
        both = enumerate_group(PSL2Z, max_word_len=3, max_entry=2)
        word_only = {g.matrix for g in enumerate_group(PSL2Z, max_word_len=3)}
        for g in both:
            assert g.sup_norm <= 2
            assert g.matrix in word_only
            assert len(g.word) <= 3

    def test_index_six_density_trend(self):
        # share of Gamma2 among PSL2Z entries <= N approaches 1/6 as N grows
        ratios = []
        for n in (8, 16, 32):
            psl = enumerate_group(PSL2Z, max_entry=n)
            g2 = sum(1 for g in psl if g.in_gamma2())
            ratios.append(6 * g2 / len(psl))
        assert abs(ratios[-1] - 1.0) <= abs(ratios[0] - 1.0) + 0.05
        assert 0.5 < ratios[-1] < 1.5


class TestReduction:
    def test_already_reduced(self):
        z0, g = reduce_to_fundamental_domain(half_plane_point(1j))
        assert g.is_identity
        assert z0.value == pytest.approx(1j)

    def test_spec_example(self):
        z0, g = reduce_to_fundamental_domain(half_plane_point(0.3 + 0.4j))
        assert z0.value == pytest.approx(-0.2 + 1.6j, abs=1e-12)
        assert g == T * S

    def test_translation(self):
        z0, g = reduce_to_fundamental_domain(half_plane_point(5 + 2j))
        assert z0.value == pytest.approx(2j)
        assert g == T ** -5

    def test_random_points_land_in_domain(self):
        rng = np.random.default_rng(19)
        for _ in range(200):
            z = half_plane_point(complex(rng.uniform(-8, 8), rng.uniform(0.01, 5)))
            z0, g = reduce_to_fundamental_domain(z)
            assert abs(z0.value.real) <= 0.5 + 1e-12
            assert abs(z0.value) >= 1.0 - 1e-12
            assert abs(apply_moebius(g, z).value - z0.value) < 1e-12


class TestStabilizer:
    def test_elliptic_orders(self):
        assert stabilizer_order(PSL2Z, half_plane_point(1j)) == 2
        rho = cmath.exp(1j * math.pi / 3)
        assert stabilizer_order(PSL2Z, half_plane_point(rho)) == 3
        assert stabilizer_order(PSL2Z, half_plane_point(2j)) == 1

    def test_orbit_translates(self):
        rho = cmath.exp(1j * math.pi / 3)
        for g in (T, S, T * S * T.inverse()):
            assert stabilizer_order(PSL2Z, apply_moebius(g, half_plane_point(1j))) == 2
            assert stabilizer_order(PSL2Z, apply_moebius(g, half_plane_point(rho))) == 3

    def test_gamma2_trivial(self):
        assert stabilizer_order(GAMMA2, half_plane_point(1j)) == 1


class TestOrbitSample:
    def test_trivial_budget(self):
        sample = orbit_sample(PSL2Z, half_plane_point(2j), max_word_len=0)
        assert len(sample.entries) == 1
        assert sample.entries[0].element.is_identity

    def test_free_point_count(self):
        n_elems = len(enumerate_group(PSL2Z, max_entry=6))
        sample = orbit_sample(PSL2Z, half_plane_point(2j), max_entry=6)
        assert len(sample.entries) == n_elems
        assert sample.stabilizer_order == 1

    def test_elliptic_point_collapse(self):
        n_elems = len(enumerate_group(PSL2Z, max_entry=6))
        sample = orbit_sample(PSL2Z, half_plane_point(1j), max_entry=6)
        assert sample.stabilizer_order == 2
        # cosets at the budget edge may be cut, so allow a tiny excess
        assert n_elems / 2 <= len(sample.entries) <= n_elems / 2 + 10

    def test_images_pairwise_distinct(self):
        sample = orbit_sample(PSL2Z, half_plane_point(1j), max_entry=5)
        vals = sample.images()
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                assert abs(vals[i] - vals[j]) > 1e-10

    def test_disc_model(self):
        w = to_disc(half_plane_point(2j))
        sample = orbit_sample(PSL2Z, w, max_entry=4)
        assert all(e.image.model == "disc" for e in sample.entries)
        assert all(abs(v) < 1 for v in sample.images())


class TestGamma2Decompose:
    def test_generator(self):
        assert gamma2_decompose(GAMMA2_A) == FreeWord((1,))

    def test_t_squared(self):
        assert gamma2_decompose(T * T) == FreeWord((1,))

    def test_conjugate(self):
        g = word_to_element(FreeWord.from_str("A B A^-1"))
        assert gamma2_decompose(g) == FreeWord.from_str("A B A^-1")

    def test_rejects_non_member(self):
        with pytest.raises(ValueError):
            gamma2_decompose(T)

    def test_round_trip_random(self):
        rng = np.random.default_rng(101)
        letters = (1, -1, 2, -2)
        for _ in range(1000):
            length = rng.integers(0, 13)
            word = FreeWord(tuple(letters[i] for i in rng.integers(0, 4, length)))
            g = word_to_element(word)
            assert gamma2_decompose(g) == word

    def test_budget_zero(self):
        assert gamma2_decompose(IDENTITY) == FreeWord()
