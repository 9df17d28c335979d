import math

import numpy as np
import pytest

from orbit_bergman.bergman import BergmanElement, basis_norm_factors, cayley_transport, random_element
from orbit_bergman.errors import ConvergenceError
from orbit_bergman.groups import PSL2Z, enumerate_group
from orbit_bergman.moebius import IDENTITY, S, T, GroupElement, half_plane_point
from orbit_bergman.poincare import (
    gram_matrix,
    poincare_sums,
    tracelike_deviation,
)
from orbit_bergman.quadrature import QuadratureSpec


def transported_e0(s):
    return cayley_transport(BergmanElement(s, [1.0]), s, "disc_to_half")


def closed_form_abs_sum(elements, z, s):
    """kappa_0^2 4^s sum Q^-s with Q = (a x + b - c y)^2 + (a y + c x + d)^2."""
    kappa0_sq = float(basis_norm_factors(s, 0)[0]) ** 2
    x, y = z.real, z.imag
    total = 0.0
    for g in elements:
        q = (g.a * x + g.b - g.c * y) ** 2 + (g.a * y + g.c * x + g.d) ** 2
        total += q ** (-s)
    return kappa0_sq * 4.0 ** s * total


class TestPoincareSums:
    def test_zero_function(self):
        elems = enumerate_group(PSL2Z, max_entry=5)
        rep = poincare_sums(lambda z: np.zeros_like(z), half_plane_point(2j), 2.5, elems)
        assert rep.holo_sum == 0
        assert rep.abs_sum == 0
        assert rep.converged

    def test_matches_closed_form_for_transported_e0(self):
        s = 3.0
        z = half_plane_point(0.3 + 1.7j)
        elems = enumerate_group(PSL2Z, max_entry=12)
        rep = poincare_sums(transported_e0(s), z, s, elems)
        expect = closed_form_abs_sum(elems, z.value, s)
        assert rep.abs_sum == pytest.approx(expect, rel=1e-10)
        assert abs(rep.holo_sum) <= rep.abs_sum + 1e-12

    def test_monotone_in_budget(self):
        s = 2.5
        z = half_plane_point(1.3j)
        xi = transported_e0(s)
        sums = [
            poincare_sums(xi, z, s, enumerate_group(PSL2Z, max_entry=n)).abs_sum
            for n in (3, 6, 12, 24)
        ]
        assert all(b > a for a, b in zip(sums, sums[1:]))

    def test_invariance_of_completed_sum(self):
        # Im(z)^s * abs_sum at z and Tz agree within the truncation indicator
        s = 3.0
        xi = transported_e0(s)
        elems = enumerate_group(PSL2Z, max_entry=40)
        z = half_plane_point(0.2 + 1.1j)
        tz = half_plane_point(1.2 + 1.1j)
        rep_a = poincare_sums(xi, z, s, elems)
        rep_b = poincare_sums(xi, tz, s, elems)
        assert rep_a.converged and rep_b.converged
        indicator = (
            rep_a.last_shell_abs * z.value.imag ** s
            + rep_b.last_shell_abs * tz.value.imag ** s
        )
        assert abs(rep_a.completed_value - rep_b.completed_value) <= 10 * indicator

    def test_convergence_flag(self):
        s = 2.5
        xi = transported_e0(s)
        small = poincare_sums(xi, half_plane_point(1j), s, enumerate_group(PSL2Z, max_entry=2))
        assert not small.converged


class TestTracelike:
    def test_transported_e0_not_tracelike(self):
        s = 2.5
        xi = transported_e0(s)
        elems = enumerate_group(PSL2Z, max_entry=60)
        report = tracelike_deviation(
            xi, s, [0.15 + 0.9j, -0.35 + 1.6j], elems
        )
        assert report.constant > 0
        assert report.deviation > 0.01  # an Eisenstein-like series is not constant

    def test_scale_invariance(self):
        s = 2.5
        elems = enumerate_group(PSL2Z, max_entry=40)
        samples = [0.1 + 1.0j, 0.4 + 1.3j, -0.2 + 0.8j]
        xi = transported_e0(s)
        xi2 = lambda z: 2.0 * xi(z)
        r1 = tracelike_deviation(xi, s, samples, elems, require_converged=False)
        r2 = tracelike_deviation(xi2, s, samples, elems, require_converged=False)
        assert r1.deviation == pytest.approx(r2.deviation, rel=1e-12)
        assert r2.constant == pytest.approx(4 * r1.constant, rel=1e-12)

    def test_zero_vector_rejected(self):
        elems = enumerate_group(PSL2Z, max_entry=5)
        with pytest.raises(ValueError):
            tracelike_deviation(
                lambda z: np.zeros_like(z), 2.5, [1j, 2j], elems,
                require_converged=False,
            )

    def test_unconverged_propagates(self):
        s = 2.5
        xi = transported_e0(s)
        with pytest.raises(ConvergenceError):
            tracelike_deviation(xi, s, [1j, 2j], enumerate_group(PSL2Z, max_entry=2))


class TestGram:
    def test_single_identity(self):
        s = 2.5
        xi = BergmanElement(s, [1.0, 0.5j])
        report = gram_matrix(xi, [IDENTITY], s)
        assert report.matrix.shape == (1, 1)
        assert report.matrix[0, 0].real == pytest.approx(xi.norm_sq())
        assert report.wandering_deviation == 0.0

    def test_requires_identity(self):
        with pytest.raises(ValueError):
            gram_matrix(BergmanElement(2.5, [1.0]), [S], 2.5)

    def test_diagonal_equals_norm(self):
        rng = np.random.default_rng(3)
        s = 2.5
        xi = random_element(s, 160, rng, support=24)
        elems = [IDENTITY, S, T, T.inverse()]
        report = gram_matrix(xi, elems, s)
        for i in range(len(elems)):
            assert report.matrix[i, i].real == pytest.approx(xi.norm_sq(), abs=2e-6)

    def test_hermitian_psd(self):
        rng = np.random.default_rng(5)
        s = 2.5
        xi = random_element(s, 160, rng, support=24)
        elems = [IDENTITY, S, T, S * T]
        report = gram_matrix(xi, elems, s)
        g = report.matrix
        assert np.allclose(g, g.conj().T)
        trace = float(np.trace(g).real)
        assert report.smallest_eigenvalue() >= -1e-8 * trace
