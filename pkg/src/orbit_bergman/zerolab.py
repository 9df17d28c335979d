"""Zero-set experiments around the critical weight.

Two probes of the orbit zero-set threshold:

* extremal values: lambda_M is the squared distance from the kernel vector at
  a probe point to the span of the kernel vectors at the first M orbit
  points.  Above the critical weight the orbit is a zero set and lambda_M
  stabilizes at a positive floor; below it the kernel vectors fill the space
  and lambda_M keeps decaying.  The solve normalizes the kernel columns
  (which leaves lambda unchanged but tames the conditioning) and floors the
  Gram eigenvalues at 1e-12 of the trace.

* the truncated wandering construction: orbit points of the free level-2
  subgroup are labeled by group elements, ordered by the Magnus left order,
  and the candidate is the unit vector in V cap U-perp, where V constrains
  the points strictly below the identity and U also constrains the base
  point.  Finite truncations only approximate the wandering property; the
  reports record residual trends, never a fabricated limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bergman import (
    BergmanElement,
    basis_norm_factors,
    inner_product,
    kernel_eval,
    pi_action,
)
from .errors import BudgetError, ModelError
from .groups import GAMMA2, GroupPreset, enumerate_group, gamma2_decompose, orbit_sample
from .moebius import DISC, GroupElement, Point, apply_moebius, cayley, disc_point
from .ordering import FreeWord, magnus_key, magnus_less
from .poincare import gram_matrix
from .quadrature import QuadratureSpec

EIGENVALUE_FLOOR_RATIO = 1e-12
_COINCIDENCE_TOL = 1e-13


def extremal_value(s: float, z_star, points, *, floor_ratio: float = EIGENVALUE_FLOOR_RATIO) -> float:
    """Squared distance from eps_{z*} to span{eps_p : p in points}.

    lambda = K(z*,z*) - k^H G^{-1} k with G = [K(p_i, p_j)], k = [K(p_i, z*)];
    computed on unit-normalized kernel vectors with an eigenvalue floor.
    """
    if s <= 1:
        raise ValueError("need s > 1")
    zs = complex(z_star.value if isinstance(z_star, Point) else z_star)
    pts = [complex(p.value if isinstance(p, Point) else p) for p in points]
    diag_star = kernel_eval(s, zs, zs).real
    if not pts:
        return diag_star
    if any(abs(p - zs) < _COINCIDENCE_TOL for p in pts):
        return 0.0  # probe point interpolated exactly
    m = len(pts)
    g_mat = np.empty((m, m), dtype=complex)
    for i, p in enumerate(pts):
        for j in range(i, m):
            g_mat[i, j] = kernel_eval(s, pts[i], pts[j])
            g_mat[j, i] = np.conj(g_mat[i, j])
    k_vec = np.array([kernel_eval(s, p, zs) for p in pts])
    # normalize to unit kernel vectors: lambda only sees the spanned subspace
    scale = 1.0 / np.sqrt(np.real(np.diag(g_mat)))
    g_mat = g_mat * scale[:, None] * scale[None, :]
    k_vec = k_vec * scale
    eigvals, eigvecs = np.linalg.eigh(g_mat)
    floor = floor_ratio * float(np.sum(np.abs(eigvals)))
    inv_eigs = 1.0 / np.maximum(eigvals, floor)
    proj = eigvecs.conj().T @ k_vec
    fitted = float(np.real(np.sum(inv_eigs * np.abs(proj) ** 2)))
    return max(diag_star - fitted, 0.0)


@dataclass(frozen=True)
class ExtremalProfile:
    """lambda_M over nested point sets at one weight."""

    s: float
    z_star: complex
    points: tuple[complex, ...]
    lambdas: np.ndarray  # index M = 0..len(points)

    def csv_header(self):
        return ["m", "lambda"]

    def csv_rows(self):
        return [[m, float(v)] for m, v in enumerate(self.lambdas)]

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "z_star": [self.z_star.real, self.z_star.imag],
            "n_points": len(self.points),
            "lambdas": [float(v) for v in self.lambdas],
        }

    def value_at(self, m: int) -> float:
        return float(self.lambdas[m])


def ordered_orbit_points(preset: GroupPreset, z: Point, max_entry: int,
                         max_count: int = 2_000_000) -> list[complex]:
    """Distinct disc-model orbit points ordered by (|p|, arg p), base first."""
    w = z if z.model == DISC else Point(cayley(z.value), DISC)
    sample = orbit_sample(preset, w, max_entry=max_entry, max_count=max_count)
    pts = [e.image.value for e in sample.entries]
    pts.sort(key=lambda p: (abs(p), math.atan2(p.imag, p.real)))
    return pts


def extremal_profile(
    preset: GroupPreset,
    z: Point,
    z_star,
    s_grid,
    max_entry: int,
    *,
    m_max: int | None = None,
    max_count: int = 2_000_000,
) -> list[ExtremalProfile]:
    """Profiles lambda_M for each weight in s_grid over one orbit.

    Points are appended in order of increasing disc modulus, so the profiles
    are nonincreasing in M by subspace nesting.
    """
    pts = ordered_orbit_points(preset, z, max_entry, max_count)
    zs = complex(z_star.value if isinstance(z_star, Point) else z_star)
    if m_max is not None:
        pts = pts[:m_max]
    profiles = []
    for s in s_grid:
        lams = np.empty(len(pts) + 1)
        for m in range(len(pts) + 1):
            lams[m] = extremal_value(s, zs, pts[:m])
        profiles.append(
            ExtremalProfile(s=float(s), z_star=zs, points=tuple(pts), lambdas=lams)
        )
    return profiles


@dataclass(frozen=True)
class TransportedRW:
    """The vanishing construction as a Bergman element of weight s.

    The half-plane function (2/(z+i))^(s-p) (j(z)-w) Delta(z) eta(z)^r, with
    p = 12 + r/2 the automorphic weight, lies in the weight-s Bergman space
    (the Cayley factor supplies the horizontal decay) and vanishes exactly on
    the orbit of the j-preimage of w.
    """

    w: float
    r: float
    s: float
    element: BergmanElement
    base_point: complex  # the j-preimage on the imaginary axis

    @property
    def automorphic_weight(self) -> float:
        return 12.0 + self.r / 2.0

    @property
    def cayley_exponent(self) -> float:
        return self.s - self.automorphic_weight

    def half_plane_evaluator(self):
        from .forms import rw_function

        rw = rw_function(self.w, self.r)
        sp = self.cayley_exponent

        def F(z):
            z = np.asarray(z, dtype=complex)
            return np.exp(sp * np.log(2.0 / (z + 1j))) * rw.eval(z)

        return F

    def invariant_residual(self):
        """Scale-free vanishing residual: |F(z)| Im^(p/2) (|z+i|/2)^(s-p),
        normalized by the same invariant at an off-orbit reference.

        Near the real axis |F| has gradients of order Im^(-p/2-1), so raw
        values at deep orbit points measure conditioning, not vanishing;
        the invariant weighting removes exactly that factor.
        """
        F = self.half_plane_evaluator()
        p_half = self.automorphic_weight / 2.0
        sp = self.cayley_exponent

        def phi(z):
            z = np.asarray(z, dtype=complex)
            return (
                np.abs(F(z))
                * z.imag ** p_half
                * (np.abs(z + 1j) / 2.0) ** sp
            )

        ref = float(phi(np.array([self.base_point + 0.5j]))[0])

        def residual(z):
            return phi(z) / max(ref, 1e-300)

        return residual


def transported_rw_element(
    w: float,
    r: float,
    s: float,
    n_max: int,
    *,
    x_max: float = 18.0,
    nx: int = 16,
    ny: int = 20,
) -> TransportedRW:
    """Project the vanishing construction onto the weight-s basis.

    Requires s > 13 + r/2 (membership threshold of the construction).
    """
    from .bergman import project_half_plane_evaluator
    from .forms import find_j_preimage

    p = 12.0 + r / 2.0
    if s <= p + 1.0:
        raise ValueError(
            f"need s > {p + 1} for the construction to lie in the space"
        )
    base_point = find_j_preimage(w)
    shell = TransportedRW(
        w=float(w), r=float(r), s=float(s),
        element=BergmanElement(s, [1.0]),  # placeholder until projected
        base_point=base_point,
    )
    element = project_half_plane_evaluator(
        shell.half_plane_evaluator(), s, n_max, x_max=x_max, nx=nx, ny=ny
    )
    return TransportedRW(
        w=float(w), r=float(r), s=float(s), element=element,
        base_point=base_point,
    )


@dataclass(frozen=True)
class WanderingCandidate:
    """Truncated wandering vector from the ordered-orbit construction."""

    base: complex  # disc model
    basis_n: int
    n_constraints: int
    constraint_elements: tuple[GroupElement, ...]
    constraint_words: tuple[str, ...]
    constraint_points: tuple[complex, ...]
    candidate: BergmanElement
    constraint_violation: float
    base_value: float  # |candidate(base)|, the U-perp direction inside V
    offdiag_gram_mass: float
    f_orthogonality: tuple[float, ...]

    def to_json_dict(self) -> dict:
        return {
            "base": [self.base.real, self.base.imag],
            "basis_n": self.basis_n,
            "n_constraints": self.n_constraints,
            "constraint_words": list(self.constraint_words),
            "constraint_violation": self.constraint_violation,
            "base_value": self.base_value,
            "offdiag_gram_mass": self.offdiag_gram_mass,
            "f_orthogonality": list(self.f_orthogonality),
            "candidate": self.candidate.to_json_dict(),
        }


def _basis_rows(s: float, points, n_max: int) -> np.ndarray:
    kappa = basis_norm_factors(s, n_max)
    rows = np.empty((len(points), n_max + 1), dtype=complex)
    for i, p in enumerate(points):
        rows[i] = kappa * np.power(p, np.arange(n_max + 1))
    return rows


def wandering_truncated(
    base: Point,
    f: BergmanElement | None,
    s: float,
    basis_n: int,
    n_constraints: int,
    *,
    max_entry: int = 16,
    gram_elements=None,
    f_gammas=(),
    f_residual=None,
    spec: QuadratureSpec | None = None,
    f_check_tol: float = 1e-6,
) -> WanderingCandidate:
    """Unit vector in V cap U-perp for the Magnus-ordered orbit of the free
    level-2 subgroup.

    V constrains the n_constraints orbit points labeled by the elements
    closest below the identity in the Magnus order; U adds the base point.
    The candidate is the normalized projection of the truncated kernel vector
    at the base onto V, which is orthogonal to U by the reproducing property.

    Residuals are normalized per evaluation functional (the truncated kernel
    norm at the point): near the boundary the raw values carry huge basis
    factors, and only the normalized functional is numerically meaningful.
    The vanishing precheck on f uses f_residual (a scale-free residual over
    half-plane points, e.g. TransportedRW.invariant_residual()), since
    coefficient evaluation of a marginally-square-integrable function is
    cancellation-dominated away from the center.
    """
    if base.model != "half-plane":
        raise ModelError("wandering construction starts from a half-plane base")
    elements = enumerate_group(GAMMA2, max_entry=max_entry)
    labeled = [(gamma2_decompose(g), g) for g in elements]
    negatives = [(w, g) for w, g in labeled if magnus_less(w, FreeWord())]
    negatives.sort(key=lambda pair: magnus_key()(pair[0]))
    if len(negatives) < n_constraints:
        raise BudgetError(
            f"only {len(negatives)} elements below the identity within entry "
            f"bound {max_entry}; need {n_constraints}"
        )
    chosen = negatives[-n_constraints:]  # the order-largest ones below id
    constraint_half = [apply_moebius(g, base).value for _, g in chosen]
    constraint_pts = [cayley(zh) for zh in constraint_half]
    base_disc = cayley(base.value)

    if f_residual is not None:
        pts = np.array(constraint_half + [base.value])
        worst = float(np.max(f_residual(pts)))
        if worst > f_check_tol:
            raise ValueError(
                f"f does not vanish on the constrained orbit points "
                f"(scale-free residual {worst:.2e})"
            )

    rows = _basis_rows(s, constraint_pts, basis_n)
    row_norms = np.linalg.norm(rows, axis=1)
    rows_unit = rows / row_norms[:, None]
    _, svals, vh = np.linalg.svd(rows_unit)
    tol = max(rows.shape) * np.finfo(float).eps * (svals[0] if len(svals) else 1.0)
    rank = int(np.sum(svals > tol))
    null_basis = vh[rank:].conj().T  # columns: orthonormal basis of V
    if null_basis.shape[1] == 0:
        raise BudgetError("V is trivial: basis truncation too small for M")
    kappa = basis_norm_factors(s, basis_n)
    kernel_coeffs = np.conj(kappa * np.power(base_disc, np.arange(basis_n + 1)))
    inside = null_basis.conj().T @ kernel_coeffs
    norm_inside = float(np.linalg.norm(inside))
    if norm_inside < 1e-12 * float(np.linalg.norm(kernel_coeffs)):
        raise BudgetError(
            "V equals U at this truncation (point evaluation vanishes on V); "
            "raise basis_n"
        )
    cand = BergmanElement(s, null_basis @ (inside / norm_inside))

    # normalized interpolation residual: |L_p(cand)| / ||L_p||
    violation = float(np.max(np.abs(rows @ cand.coeffs) / row_norms))
    base_row_norm = float(np.linalg.norm(kernel_coeffs))
    base_value = float(abs(np.dot(kernel_coeffs.conj(), cand.coeffs))) / base_row_norm
    if gram_elements is None:
        gram_elements = enumerate_group(GAMMA2, max_word_len=1)
    gram = gram_matrix(cand, gram_elements, s, spec)
    f_orth = []
    if f is not None:
        f_scaled = f.padded(max(basis_n, f.truncation)).scaled(1.0 / f.norm())
        for gamma in f_gammas:
            # tail loss does not touch coefficients below the truncation,
            # which are all the inner product against cand sees
            moved = pi_action(gamma, s, f_scaled, spec, loss_tol=math.inf)
            f_orth.append(
                abs(inner_product(cand.padded(moved.truncation), moved))
            )
    return WanderingCandidate(
        base=base_disc,
        basis_n=basis_n,
        n_constraints=n_constraints,
        constraint_elements=tuple(g for _, g in chosen),
        constraint_words=tuple(str(w) for w, _ in chosen),
        constraint_points=tuple(constraint_pts),
        candidate=cand,
        constraint_violation=violation,
        base_value=base_value,
        offdiag_gram_mass=gram.wandering_deviation,
        f_orthogonality=tuple(f_orth),
    )
