import math

import numpy as np
import pytest

from orbit_bergman.bergman import BergmanElement, kernel_eval
from orbit_bergman.errors import BudgetError
from orbit_bergman.groups import PSL2Z
from orbit_bergman.moebius import (
    GAMMA2_A,
    GAMMA2_B,
    S,
    T,
    apply_moebius,
    cayley,
    disc_point,
    half_plane_point,
)
from orbit_bergman.zerolab import (
    extremal_profile,
    extremal_value,
    ordered_orbit_points,
    transported_rw_element,
    wandering_truncated,
)


def disc_translate(g, w):
    return apply_moebius(g, disc_point(w)).value


class TestExtremalValue:
    def test_no_constraints(self):
        s = 3.0
        z = 0.3 + 0.2j
        expect = (s - 1) / (4 * math.pi) * (1 - abs(z) ** 2) ** (-s)
        assert extremal_value(s, z, []) == pytest.approx(expect)
        assert extremal_value(s, z, []) == pytest.approx(kernel_eval(s, z, z).real)

    def test_interpolated_point(self):
        z = 0.1 + 0.4j
        assert extremal_value(2.5, z, [0.3, z, -0.2j]) == 0.0

    def test_nonincreasing_in_points(self):
        rng = np.random.default_rng(31)
        z_star = 0.15 - 0.2j
        pts = [
            0.55 * rng.uniform(0.3, 1) * np.exp(2j * math.pi * rng.uniform())
            for _ in range(12)
        ]
        vals = [extremal_value(3.5, z_star, pts[:m]) for m in range(len(pts) + 1)]
        for a, b in zip(vals, vals[1:]):
            assert b <= a + 1e-12
        assert all(v >= 0 for v in vals)

    def test_moebius_invariance(self):
        # moving z* and the points by a common group element rescales the
        # kernel vector by the weight transport factor, so the normalized
        # ratio lambda / K(z*, z*) is the invariant quantity (unitarity)
        s = 4.0
        z_star = 0.2 + 0.1j
        pts = [0.4, -0.3 + 0.2j, 0.1 - 0.45j, 0.25 + 0.33j]
        base = extremal_value(s, z_star, pts) / kernel_eval(s, z_star, z_star).real
        for g in (S, T, T * S):
            zg = disc_translate(g, z_star)
            moved = extremal_value(
                s, zg, [disc_translate(g, p) for p in pts]
            ) / kernel_eval(s, zg, zg).real
            assert moved == pytest.approx(base, rel=1e-8)


class TestExtremalProfile:
    def test_ordered_points(self):
        pts = ordered_orbit_points(PSL2Z, half_plane_point(2j), max_entry=8)
        mods = [abs(p) for p in pts]
        assert mods == sorted(mods)

    def test_dichotomy_direction(self):
        profiles = extremal_profile(
            PSL2Z, half_plane_point(2j), cayley(0.2 + 0.8j),
            [12.0, 14.0], max_entry=12, m_max=64,
        )
        low, high = profiles
        assert low.s == 12.0 and high.s == 14.0
        for p in profiles:
            diffs = np.diff(p.lambdas)
            assert np.all(diffs <= 1e-12)
        # above the critical weight the value stays well above the
        # below-critical one
        assert high.lambdas[-1] > 5 * low.lambdas[-1]

    def test_csv_shape(self):
        (profile,) = extremal_profile(
            PSL2Z, half_plane_point(2j), 0.1 + 0.1j, [13.5], max_entry=6, m_max=10
        )
        rows = profile.csv_rows()
        assert rows[0] == [0, pytest.approx(profile.lambdas[0])]
        assert len(rows) == len(profile.lambdas)


@pytest.fixture(scope="module")
def rw24():
    # coarse grid keeps the fixture fast; trends at acceptance use the
    # production grid
    return transported_rw_element(2000.0, 8.0, 24.0, 120, x_max=12.0, nx=10, ny=14)


class TestTransportedRW:
    def test_membership_guard(self):
        with pytest.raises(ValueError):
            transported_rw_element(2000.0, 8.0, 16.9, 20)

    def test_invariant_residual_vanishes_on_orbit(self, rw24):
        resid = rw24.invariant_residual()
        z0 = rw24.base_point
        pts = [apply_moebius(g, half_plane_point(z0)).value
               for g in (GAMMA2_A, GAMMA2_B, GAMMA2_A.inverse() * GAMMA2_B)]
        assert float(np.max(resid(np.array(pts)))) < 1e-6

    def test_invariant_residual_off_orbit(self, rw24):
        resid = rw24.invariant_residual()
        assert float(resid(np.array([rw24.base_point + 0.3j]))[0]) > 1e-2


class TestWandering:
    def test_constraint_residuals(self, rw24):
        base = half_plane_point(rw24.base_point)
        cand = wandering_truncated(
            base, rw24.element, rw24.s, 64, 16, max_entry=6,
            f_gammas=[GAMMA2_A], f_residual=rw24.invariant_residual(),
        )
        assert cand.constraint_violation < 1e-10
        assert cand.candidate.norm() == pytest.approx(1.0)
        assert cand.base_value > 0.1  # the U-perp direction inside V
        assert len(cand.constraint_points) == 16

    def test_truncation_too_small(self, rw24):
        base = half_plane_point(rw24.base_point)
        with pytest.raises(BudgetError):
            wandering_truncated(base, None, rw24.s, 12, 16, max_entry=6)

    def test_residual_trend(self, rw24):
        base = half_plane_point(rw24.base_point)
        grams = []
        orth = []
        for n in (40, 64, 100):
            cand = wandering_truncated(
                base, rw24.element.truncated(n), rw24.s, n, 16, max_entry=6,
                f_gammas=[GAMMA2_A, GAMMA2_B],
                f_residual=rw24.invariant_residual(),
            )
            grams.append(cand.offdiag_gram_mass)
            orth.append(max(cand.f_orthogonality))
        assert grams[0] > grams[1] > grams[2]
        assert orth[0] > orth[1] > orth[2]
