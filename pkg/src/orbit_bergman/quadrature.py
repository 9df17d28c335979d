"""Quadrature rules for the weighted disc measure and the half-plane domain.

The disc inner product integrates f(w) conj(g(w)) (1 - |w|^2)^(s-2) * 4 du dv.
In polar coordinates with t = r^2 this is

    2 * int_0^1 (1-t)^(s-2) [ int_0^{2 pi} f conj(g) d theta ] dt,

so a Gauss-Jacobi rule in t (exponent s-2, exact boundary weight) crossed with
a uniform angular grid (exact for trigonometric polynomials below the grid
size) gives spectral accuracy on the polynomial-times-weight integrands that
dominate here.

Half-plane fundamental-domain integrals use a Gauss-Legendre rule in x crossed
with per-x panels in y: one panel from the boundary arc up to 1, then dyadic
panels towards the cusp (whose Cayley image is the boundary point w = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import roots_jacobi

from .errors import QuadratureError


@dataclass(frozen=True)
class QuadratureSpec:
    """Rule sizes: radial Gauss-Jacobi order (in t = r^2, exponent s-2),
    angular grid size, and for half-plane domains the dyadic subdivision
    depth and the cusp cutoff (distance to the disc boundary at which the
    dyadic panels stop and the analytic tail bound takes over)."""

    radial_order: int = 96
    angular_size: int = 256
    depth: int = 12
    cusp_cutoff: float = 1e-3

    def __post_init__(self):
        if self.radial_order < 1 or self.angular_size < 1:
            raise ValueError("quadrature orders must be >= 1")
        if not 0 < self.cusp_cutoff < 1:
            raise ValueError("cusp_cutoff must lie in (0, 1)")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")

    def refined(self) -> "QuadratureSpec":
        return replace(
            self,
            radial_order=2 * self.radial_order,
            angular_size=2 * self.angular_size,
        )

    @property
    def cusp_height(self) -> float:
        """Half-plane height corresponding to the cusp cutoff: 1-|C(iY)| = 2/(Y+1)."""
        return 2.0 / self.cusp_cutoff - 1.0


def radial_rule(order: int, s: float):
    """Nodes/weights for int_0^1 h(t) (1-t)^(s-2) dt."""
    x, w = roots_jacobi(order, s - 2.0, 0.0)
    t = 0.5 * (x + 1.0)
    wt = w * 2.0 ** (-(s - 1.0))
    return t, wt


def disc_grid(s: float, spec: QuadratureSpec):
    """Flattened nodes and weights for the weighted disc measure.

    Returns (w, weights): complex nodes and real weights such that
    sum weights * F(w) approximates int F dnu_s for smooth F.
    """
    t, wt = radial_rule(spec.radial_order, s)
    theta = 2.0 * math.pi * np.arange(spec.angular_size) / spec.angular_size
    r = np.sqrt(t)
    w = r[:, None] * np.exp(1j * theta)[None, :]
    weights = 2.0 * (2.0 * math.pi / spec.angular_size) * wt[:, None] * np.ones_like(theta)[None, :]
    return w.ravel(), weights.ravel()


def quad_inner(f, g, s: float, spec: QuadratureSpec, *, tol: float | None = None) -> complex:
    """Disc inner product <f, g> by quadrature; f, g vectorized evaluators.

    With tol set, the rule is refined once and the result must move by less
    than tol, otherwise the spec is reported as too small.
    """
    w, weights = disc_grid(s, spec)
    value = complex(np.sum(weights * f(w) * np.conj(g(w))))
    if tol is not None:
        w2, weights2 = disc_grid(s, spec.refined())
        refined = complex(np.sum(weights2 * f(w2) * np.conj(g(w2))))
        if abs(refined - value) > tol:
            raise QuadratureError(
                f"quadrature spec too small: refinement moved the result by "
                f"{abs(refined - value):.3e} > {tol:.3e}"
            )
        return refined
    return value


def project_onto_basis(F, s: float, n_max: int, spec: QuadratureSpec) -> np.ndarray:
    """Coefficients <F, e_n> for n = 0..n_max by collocation.

    Angular integrals via FFT (exact below the grid size), radial ones by the
    Gauss-Jacobi rule.  The rule sizes are floored at what the basis degree
    needs.
    """
    from .bergman import basis_norm_factors  # local import to avoid a cycle

    order = max(spec.radial_order, n_max + 8)
    m = max(spec.angular_size, 4 * n_max + 16, 8)
    t, wt = radial_rule(order, s)
    r = np.sqrt(t)
    theta = 2.0 * math.pi * np.arange(m) / m
    vals = F(r[:, None] * np.exp(1j * theta)[None, :])
    # hat[i, n] = (2 pi / m) * sum_j vals[i, j] e^{-i n theta_j}
    hat = np.fft.fft(vals, axis=1)[:, : n_max + 1] * (2.0 * math.pi / m)
    powers = np.vstack([r ** n for n in range(n_max + 1)])  # (n, i)
    kappa = basis_norm_factors(s, n_max)
    coeffs = 2.0 * kappa * np.einsum("i,ni,in->n", wt, powers, hat)
    return coeffs


def gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def fd_panels(nx: int, ny: int, depth: int, y_max: float):
    """Nodes/weights covering the standard fundamental domain up to y_max.

    x runs over [-1/2, 1/2] (Gauss-Legendre); per x, one panel from the
    boundary arc sqrt(1-x^2) to 1, then dyadic panels [1,2], [2,4], ... with
    the last one ending at y_max.  Returns flat arrays (X, Y, W).
    """
    xg, xw = gauss_legendre(nx)
    yg, yw = gauss_legendre(ny)
    xs = 0.5 * xg
    xws = 0.5 * xw
    edges = [1.0]
    while edges[-1] < y_max and len(edges) <= depth:
        edges.append(min(2.0 * edges[-1], y_max))
    X, Y, W = [], [], []
    for x, wx in zip(xs, xws):
        y0 = math.sqrt(1.0 - x * x)
        spans = [(y0, 1.0)] + list(zip(edges[:-1], edges[1:]))
        for lo, hi in spans:
            if hi <= lo:
                continue
            mid = 0.5 * (lo + hi)
            half = 0.5 * (hi - lo)
            X.append(np.full(ny, x))
            Y.append(mid + half * yg)
            W.append(wx * half * yw)
    return np.concatenate(X), np.concatenate(Y), np.concatenate(W)
