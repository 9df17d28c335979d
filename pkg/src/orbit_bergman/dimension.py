"""Scalar von Neumann dimension formulas, their numerical verification by
fundamental-domain integration, and orbit density estimation.

The closed form is dim = (s-1)/4pi * covolume; the numeric check integrates
|e_n|^2 against the weighted disc measure over the Cayley image of the
standard domain, term by term.  The integral is evaluated in the half-plane
pullback parametrization (the change of variables is exactly the unitary
Cayley transport, so the integrand is identical), with dyadic panels towards
the cusp, whose image is the boundary point w = 1, and an analytic bound for
the remainder above the cutoff.

The density estimator is the slope of the Blaschke partial sums
sum (1 - |w|) over |w| < rho against log(1/(1-rho)); for a Fuchsian orbit it
converges to 2 pi / (stab * covolume).  This is a desk-scale surrogate for
the Stolz-region upper asymptotic density, not that definition itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetError, ConvergenceError
from .groups import GroupPreset, OrbitSample
from .moebius import cayley_inv
from .quadrature import QuadratureSpec, fd_panels
from .bergman import basis_norm_factors


def _as_fraction(s) -> Fraction | None:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, float) and s == int(s):
        return Fraction(int(s))
    return None


def vn_dimension_exact(s, preset: GroupPreset) -> Fraction:
    """(s-1)/4pi * covolume as an exact rational (rational s only)."""
    frac = _as_fraction(s)
    if frac is None:
        raise ValueError("vn_dimension_exact needs a rational s")
    return (frac - 1) * preset.covolume_over_pi / 4


def vn_dimension(s: float, preset: GroupPreset) -> float:
    """Formula value (s-1)/4pi * covolume(Gamma); exact at rational s."""
    if s <= 1:
        raise ValueError("need s > 1")
    frac = _as_fraction(s)
    if frac is not None:
        return float(vn_dimension_exact(frac, preset))
    cov = preset.covolume_over_pi
    return (s - 1.0) * cov.numerator / (4.0 * cov.denominator)


def critical_exponent_exact(preset: GroupPreset) -> Fraction:
    return 1 + 4 / preset.covolume_over_pi


def critical_exponent(preset: GroupPreset) -> float:
    """The weight s = 1 + 4pi/covolume where the dimension equals 1."""
    return float(critical_exponent_exact(preset))


@dataclass(frozen=True)
class DimensionReport:
    """Partial sums of the basis-index integrals against the formula value."""

    s: float
    preset_name: str
    formula_value: float
    partial_sums: np.ndarray  # cumulative over n = 0..basis_n
    tail_bound: float  # bound for the domain remainder above the cusp cutoff
    spec: QuadratureSpec

    @property
    def value(self) -> float:
        return float(self.partial_sums[-1])

    @property
    def relative_gap(self) -> float:
        return 1.0 - self.value / self.formula_value

    def csv_header(self):
        return ["n", "partial_sum"]

    def csv_rows(self):
        return [[n, float(v)] for n, v in enumerate(self.partial_sums)]

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "preset": self.preset_name,
            "formula_value": self.formula_value,
            "partial_sums": [float(v) for v in self.partial_sums],
            "tail_bound": self.tail_bound,
        }


def vn_dimension_numeric(
    s: float,
    preset: GroupPreset,
    basis_n: int,
    spec: QuadratureSpec | None = None,
    *,
    tail_tol: float = 1e-6,
) -> DimensionReport:
    """Partial sums over n <= basis_n of int_F |e_n|^2 dnu_s (disc model,
    computed in the exact half-plane pullback).

    Positive integrands make the sums nondecreasing; they converge upward to
    (s-1)/4pi * covolume as the basis and the cusp cutoff grow.
    """
    if preset.name != "PSL2Z":
        raise ValueError("numeric check runs on the PSL2Z preset only")
    if s <= 1:
        raise ValueError("need s > 1")
    spec = spec or QuadratureSpec()
    y_max = spec.cusp_height
    nx = spec.radial_order
    ny = max(16, spec.angular_size // 8)
    X, Y, W = fd_panels(nx, ny, spec.depth, y_max)
    z = X + 1j * Y
    # |e_n(C(z))|^2 dnu_s pulled back: kappa_n^2 |C(z)|^(2n) (4/|z+i|^2)^s y^(s-2)
    azi = np.abs(z + 1j) ** 2
    t = np.abs((z - 1j) / (z + 1j)) ** 2
    base = W * (4.0 / azi) ** s * Y ** (s - 2.0)
    kappa_sq = basis_norm_factors(s, basis_n) ** 2
    sums = np.empty(basis_n + 1)
    acc = 0.0
    powers = np.ones_like(t)
    for n in range(basis_n + 1):
        acc += kappa_sq[n] * float(np.sum(base * powers))
        sums[n] = acc
        powers = powers * t
    # domain remainder above y_max: summing the geometric series over all n
    # collapses the integrand to (s-1)/(4 pi y^2), whose strip integral is
    # (s-1)/(4 pi y_max); the partial sums can never regain more than that
    tail = (s - 1.0) / (4.0 * math.pi * y_max)
    formula = vn_dimension(s, preset)
    if tail > tail_tol * formula:
        raise ConvergenceError(
            f"cusp-neighborhood bound {tail:.3e} above {tail_tol:.1e} of the "
            f"formula value; lower the cusp cutoff"
        )
    return DimensionReport(
        s=s,
        preset_name=preset.name,
        formula_value=formula,
        partial_sums=sums,
        tail_bound=tail,
        spec=spec,
    )


def required_entry_bound(base_half_plane: complex, rho: float) -> int:
    """Sup-norm bound certifying that every orbit point with |w| < rho comes
    from an enumerated element.

    An orbit point w = C(g(z0)) satisfies 1 - |w|^2 = 4 y0 / Q(g) with
    Q(g) = |(a + ic) z0 + (b + id)|^2, so |w| < rho bounds Q; the determinant
    forces |a + ic| <= (q + sqrt(q^2 + 4 y0)) / (2 y0) with q = sqrt(Q), and
    |b + id| <= |a + ic| |z0| + q.
    """
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    z0 = complex(base_half_plane)
    y0 = z0.imag
    q = math.sqrt(4.0 * y0 / (1.0 - rho * rho))
    alpha = (q + math.sqrt(q * q + 4.0 * y0)) / (2.0 * y0)
    beta = alpha * abs(z0) + q
    return int(math.ceil(max(alpha, beta)))


@dataclass(frozen=True)
class DensityEstimate:
    """Blaschke partial sums over radii and the fitted log-slope."""

    preset_name: str
    base: complex  # half-plane base point
    radii: tuple[float, ...]
    counts: tuple[int, ...]
    partial_sums: tuple[float, ...]
    slope: float
    intercept: float
    target: float
    certified: tuple[bool, ...]

    def csv_header(self):
        return ["rho", "count", "partial_sum", "certified"]

    def csv_rows(self):
        return [
            [r, c, s, int(f)]
            for r, c, s, f in zip(self.radii, self.counts, self.partial_sums, self.certified)
        ]

    def to_json_dict(self) -> dict:
        return {
            "preset": self.preset_name,
            "base": [self.base.real, self.base.imag],
            "radii": list(self.radii),
            "counts": list(self.counts),
            "partial_sums": list(self.partial_sums),
            "slope": self.slope,
            "intercept": self.intercept,
            "target": self.target,
            "certified": [bool(b) for b in self.certified],
        }


def density_target(preset: GroupPreset, stabilizer: int) -> float:
    """2 pi / (stab * covolume) = 2 / (stab * covolume_over_pi)."""
    return float(2 / (stabilizer * preset.covolume_over_pi))


def density_estimate(
    orbit: OrbitSample,
    radii,
    preset: GroupPreset,
    *,
    strict: bool = True,
) -> DensityEstimate:
    """Partial Blaschke sums sum (1 - |w|) over |w| < rho, and the regression
    slope against log(1/(1 - rho)).

    Radii whose coverage the enumeration budget cannot certify raise (strict)
    or are dropped from the fit.
    """
    if orbit.base.model != "disc":
        raise ValueError("density estimation runs on disc-model orbits")
    if orbit.budget.max_word_len is not None:
        raise BudgetError(
            "orbit must be enumerated by entry bound alone for coverage "
            "certification"
        )
    radii = sorted(float(r) for r in radii)
    if not radii or radii[-1] >= 1 or radii[0] <= 0:
        raise ValueError("radii must be increasing in (0, 1)")
    base_half = cayley_inv(orbit.base.value)
    entry_bound = orbit.budget.max_entry
    certified = tuple(
        required_entry_bound(base_half, rho) <= entry_bound for rho in radii
    )
    if strict and not all(certified):
        worst = [r for r, ok in zip(radii, certified) if not ok]
        need = required_entry_bound(base_half, max(worst))
        raise BudgetError(
            f"entry bound {entry_bound} cannot certify radii {worst}; "
            f"need at least {need}"
        )
    mods = np.array([abs(w) for w in orbit.images()])
    counts = []
    sums = []
    for rho in radii:
        inside = mods < rho
        counts.append(int(np.sum(inside)))
        sums.append(float(np.sum(1.0 - mods[inside])))
    mask = np.array(certified)
    ls = np.log(1.0 / (1.0 - np.array(radii)[mask]))
    ss = np.array(sums)[mask]
    if len(ls) < 2:
        raise ValueError("need at least two certified radii for the slope")
    slope, intercept = np.polyfit(ls, ss, 1)
    stab = orbit.stabilizer_order
    return DensityEstimate(
        preset_name=orbit.preset_name,
        base=base_half,
        radii=tuple(radii),
        counts=tuple(counts),
        partial_sums=tuple(sums),
        slope=float(slope),
        intercept=float(intercept),
        target=density_target(preset, stab),
        certified=certified,
    )
