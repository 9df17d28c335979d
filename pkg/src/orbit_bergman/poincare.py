"""Poincare-series evaluation, tracelike deviation, and Gram-matrix
wandering diagnostics.

The sums run over group elements (not orbit points), grouped into shells by
matrix sup-norm; the outermost shell's contribution is the convergence
indicator, reported rather than assumed.  The completed function
Im(z)^s * sum |xi(gamma z)|^2 / |cz+d|^(2s) is invariant under the group, and
an element is tracelike exactly when that function is constant.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bergman import BergmanElement, inner_product, pi_action
from .errors import ConvergenceError, ModelError
from .moebius import GroupElement, Point, branch_log_value
from .quadrature import QuadratureSpec

CONVERGENCE_GATE = 1e-6  # last shell above this share of the total flags trouble


def worker_count() -> int:
    """Parallelism cap from ORBIT_BERGMAN_THREADS (deterministic reductions)."""
    cap = os.environ.get("ORBIT_BERGMAN_THREADS", "")
    try:
        cap_val = max(1, int(cap))
    except ValueError:
        cap_val = 4
    return min(cap_val, os.cpu_count() or 1)


@dataclass(frozen=True)
class PoincareReport:
    """Truncated holomorphic and absolute Poincare sums at one point."""

    point: complex
    s: float
    holo_sum: complex
    abs_sum: float
    last_shell_abs: float
    n_elements: int
    max_norm: int

    @property
    def converged(self) -> bool:
        if self.abs_sum == 0.0:
            return True
        return self.last_shell_abs <= CONVERGENCE_GATE * self.abs_sum

    @property
    def completed_value(self) -> float:
        """Im(z)^s times the absolute sum (the group-invariant quantity)."""
        return self.point.imag ** self.s * self.abs_sum

    def to_json_dict(self) -> dict:
        return {
            "point": [self.point.real, self.point.imag],
            "s": self.s,
            "holo_sum": [self.holo_sum.real, self.holo_sum.imag],
            "abs_sum": self.abs_sum,
            "last_shell_abs": self.last_shell_abs,
            "n_elements": self.n_elements,
            "max_norm": self.max_norm,
            "converged": self.converged,
        }


def poincare_sums(xi, z: Point, s: float, elements) -> PoincareReport:
    """sum xi(gz)^2/(cz+d)^(2s) and sum |xi(gz)|^2/|cz+d|^(2s) over elements.

    xi is a vectorized half-plane evaluator; elements should exhaust a
    sup-norm ball (all group elements, not orbit representatives).
    """
    if z.model != "half-plane":
        raise ModelError("poincare_sums needs a half-plane point")
    if s <= 1:
        raise ValueError("need s > 1 for convergence")
    zv = z.value
    by_norm: dict[int, list[GroupElement]] = {}
    for g in elements:
        by_norm.setdefault(g.sup_norm, []).append(g)
    holo = 0j
    abs_total = 0.0
    last_shell = 0.0
    count = 0
    max_norm = 0
    for norm in sorted(by_norm):
        shell_holo = 0j
        shell_abs = 0.0
        for g in by_norm[norm]:
            log_j = branch_log_value(g, zv)
            gz = (g.a * zv + g.b) / (g.c * zv + g.d)
            val = complex(xi(np.array([gz]))[0])
            shell_holo += val * val * np.exp(-2.0 * s * log_j)
            shell_abs += abs(val) ** 2 * math.exp(-2.0 * s * log_j.real)
            count += 1
        holo += shell_holo
        abs_total += shell_abs
        last_shell = shell_abs
        max_norm = norm
    return PoincareReport(
        point=zv,
        s=s,
        holo_sum=complex(holo),
        abs_sum=abs_total,
        last_shell_abs=last_shell,
        n_elements=count,
        max_norm=max_norm,
    )


@dataclass(frozen=True)
class TracelikeReport:
    """Deviation of Im(z)^s * absolute sum from its best constant fit."""

    samples: tuple[complex, ...]
    values: tuple[float, ...]
    constant: float
    deviation: float
    budget: dict
    reports: tuple[PoincareReport, ...]

    def to_json_dict(self) -> dict:
        return {
            "samples": [[z.real, z.imag] for z in self.samples],
            "values": list(self.values),
            "constant": self.constant,
            "deviation": self.deviation,
            "budget": dict(self.budget),
        }


def tracelike_deviation(
    xi,
    s: float,
    samples,
    elements,
    *,
    require_converged: bool = True,
) -> TracelikeReport:
    """Fit Im(z)^s * abs_sum to a constant over the samples; the max relative
    deviation measures how far xi is from tracelike."""
    samples = [p if isinstance(p, Point) else Point(p, "half-plane") for p in samples]
    if len(samples) < 2:
        raise ValueError("need at least 2 sample points")
    reports = [poincare_sums(xi, p, s, elements) for p in samples]
    if require_converged:
        bad = [r for r in reports if not r.converged]
        if bad:
            raise ConvergenceError(
                f"{len(bad)} sample(s) fail the last-shell gate; grow the budget"
            )
    values = np.array([r.completed_value for r in reports])
    constant = float(np.mean(values))  # least-squares fit of a constant
    if constant <= 0:
        raise ValueError("zero vector: the completed sums vanish at every sample")
    deviation = float(np.max(np.abs(values - constant)) / constant)
    budget = {
        "n_elements": reports[0].n_elements,
        "max_norm": reports[0].max_norm,
    }
    return TracelikeReport(
        samples=tuple(p.value for p in samples),
        values=tuple(float(v) for v in values),
        constant=constant,
        deviation=deviation,
        budget=budget,
        reports=tuple(reports),
    )


@dataclass(frozen=True)
class GramReport:
    """Hermitian Gram matrix of {pi_s(gamma) xi} and its wandering deviation."""

    elements: tuple[GroupElement, ...]
    matrix: np.ndarray
    wandering_deviation: float
    max_truncation_loss: float

    def to_json_dict(self) -> dict:
        return {
            "elements": [list(g.matrix) for g in self.elements],
            "matrix": [
                [[v.real, v.imag] for v in row] for row in self.matrix
            ],
            "wandering_deviation": self.wandering_deviation,
            "max_truncation_loss": self.max_truncation_loss,
        }

    def smallest_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


def gram_matrix(
    xi: BergmanElement,
    elements,
    s: float,
    spec: QuadratureSpec | None = None,
) -> GramReport:
    """G[i, j] = <pi_s(g_i) xi, pi_s(g_j) xi>, Hermitian by construction.

    The identity must be among the elements; the wandering deviation is
    max_{g != id} |G[g, id]| / G[id, id].
    """
    elements = list(elements)
    id_idx = next((i for i, g in enumerate(elements) if g.is_identity), None)
    if id_idx is None:
        raise ValueError("elements must contain the identity")

    def act(g):
        if g.is_identity:
            return xi, 0.0
        # losses surface through max_truncation_loss, not warnings: only the
        # coefficients up to the truncation enter the entries, and those are
        # unaffected by tail loss
        return pi_action(g, s, xi, spec, return_loss=True, loss_tol=math.inf)

    workers = worker_count()
    if workers > 1 and len(elements) > 2:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            acted = list(pool.map(act, elements))  # order-preserving
    else:
        acted = [act(g) for g in elements]
    vectors = [a[0] for a in acted]
    max_loss = max(abs(a[1]) for a in acted)
    n = len(vectors)
    g_mat = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            val = inner_product(vectors[i], vectors[j])
            g_mat[i, j] = val
            g_mat[j, i] = np.conj(val)
    diag = g_mat[id_idx, id_idx].real
    off = [abs(g_mat[i, id_idx]) for i in range(n) if i != id_idx]
    deviation = max(off) / diag if off else 0.0
    return GramReport(
        elements=tuple(elements),
        matrix=g_mat,
        wandering_deviation=float(deviation),
        max_truncation_loss=float(max_loss),
    )
