"""Distance-to-resilience and degree-d L1 regression as a dual LP pair.

For a Boolean f and degree d, the two programs are

    primal:  max sum_x f(x) g(x)   s.t. sum_x g(x) chi_S(x) = 0 for |S| <= d,
             -1 <= g(x) <= 1
    dual:    min sum_x |f(x) - p(x)|  over degree-<=d polynomials p

whose optima satisfy alpha = 1 - value/2^n and delta = value/2^n with
alpha + delta = 1.  Both sides are solved independently (no witness is
extracted from the other via complementary slackness) and every witness is
re-verified outside the solver; the residual duality gap is the headline
certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hypercube import (
    BooleanFunction,
    BoundedFunction,
    ResilienceCheck,
    chi_values,
    is_d_resilient,
    l1_distance,
    popcounts,
)
from .lp import OPTIMAL, LinearProgram, SolverFailure, solve_lp

MAX_DUALITY_DIM = 12
WITNESS_TOL = 1e-7


class CertificateError(RuntimeError):
    """A solver result failed its independent re-verification."""


def low_degree_masks(n: int, d: int) -> list[int]:
    """All subset masks with popcount <= d, sorted by (popcount, mask)."""
    pc = popcounts(n)
    masks = [int(m) for m in np.nonzero(pc <= d)[0]]
    masks.sort(key=lambda m: (int(pc[m]), m))
    return masks


@dataclass(frozen=True)
class SparsePolynomial:
    """Real multilinear polynomial with support on subsets of size <= degree."""

    n: int
    degree: int
    coeffs: dict[int, float]

    def __post_init__(self):
        pc = popcounts(self.n)
        for mask in self.coeffs:
            if pc[mask] > self.degree:
                raise ValueError(f"mask {mask:#x} exceeds degree bound {self.degree}")

    def table(self) -> np.ndarray:
        values = np.zeros(1 << self.n)
        for mask, coef in self.coeffs.items():
            if coef != 0.0:
                values += coef * chi_values(self.n, mask)
        return values


@dataclass(frozen=True)
class ResilienceResult:
    alpha: float
    witness: BoundedFunction
    d: int
    lp_iterations: int
    witness_check: ResilienceCheck


@dataclass(frozen=True)
class L1ApproxResult:
    delta: float
    poly: SparsePolynomial
    d: int
    lp_iterations: int


@dataclass(frozen=True)
class DualityCertificate:
    alpha: float
    delta: float
    gap: float
    resilience: ResilienceResult
    l1: L1ApproxResult


def _check_inputs(f: BooleanFunction, d: int) -> None:
    if f.n > MAX_DUALITY_DIM:
        raise ValueError(f"exact duality limited to n <= {MAX_DUALITY_DIM}")
    if not 0 <= d <= f.n:
        raise ValueError(f"degree d={d} outside [0, {f.n}]")


def _constraint_matrix(n: int, masks: list[int]) -> np.ndarray:
    return np.array([chi_values(n, mask) for mask in masks], dtype=np.float64)


def distance_to_resilience(f: BooleanFunction, d: int) -> ResilienceResult:
    """Exact L1 distance from f to the closest bounded d-resilient function."""
    _check_inputs(f, d)
    n = f.n
    size = 1 << n
    masks = low_degree_masks(n, d)
    a = _constraint_matrix(n, masks)
    lp = LinearProgram(
        objective=f.table.astype(np.float64),
        eq_matrix=a,
        eq_rhs=np.zeros(len(masks)),
        lower=np.full(size, -1.0),
        upper=np.full(size, 1.0),
    )
    # start at a vertex that is already d-resilient: the parity on [d+1]
    at_upper = None
    if d < n:
        at_upper = chi_values(n, (1 << (d + 1)) - 1) > 0
    sol = solve_lp(lp, initial_at_upper=at_upper)
    if sol.status != OPTIMAL:
        raise SolverFailure(f"resilience LP ended with status {sol.status}")

    point = sol.point
    if np.max(np.abs(point)) > 1.0 + WITNESS_TOL:
        raise CertificateError("witness exceeds the unit box beyond tolerance")
    witness = BoundedFunction(n, np.clip(point, -1.0, 1.0))
    alpha = 1.0 - sol.value / size

    check = is_d_resilient(witness, d, tol=WITNESS_TOL)
    if not check.resilient:
        raise CertificateError(
            f"witness is not {d}-resilient: coef[{check.worst_mask:#x}] = "
            f"{check.worst_coefficient:.3e}"
        )
    dist = l1_distance(f, witness)
    if abs(dist - alpha) > WITNESS_TOL:
        raise CertificateError(f"witness distance {dist} does not match alpha {alpha}")
    return ResilienceResult(alpha, witness, d, sol.iterations, check)


def l1_poly_distance(f: BooleanFunction, d: int) -> L1ApproxResult:
    """Exact minimum of E|f - p| over polynomials of degree <= d."""
    _check_inputs(f, d)
    n = f.n
    size = 1 << n
    masks = low_degree_masks(n, d)
    k = len(masks)

    # columns: [p_S | q_plus_x | q_minus_x], rows: p(x) + q+ - q- = f(x)
    a = np.zeros((size, k + 2 * size))
    for col, mask in enumerate(masks):
        a[:, col] = chi_values(n, mask)
    a[:, k : k + size] = np.eye(size)
    a[:, k + size :] = -np.eye(size)

    objective = np.zeros(k + 2 * size)
    objective[k:] = -1.0  # maximize -(sum of splits) = -sum |q|
    lower = np.concatenate([np.full(k, -np.inf), np.zeros(2 * size)])
    upper = np.full(k + 2 * size, np.inf)
    lp = LinearProgram(objective, a, f.table.astype(np.float64), lower, upper)

    basis = [k + x if f.table[x] > 0 else k + size + x for x in range(size)]
    sol = solve_lp(lp, initial_basis=basis)
    if sol.status != OPTIMAL:
        raise SolverFailure(f"l1 regression LP ended with status {sol.status}")

    coeffs = {mask: float(sol.point[col]) for col, mask in enumerate(masks)}
    poly = SparsePolynomial(n, d, coeffs)
    delta = -sol.value / size

    recomputed = float(np.mean(np.abs(f.table - poly.table())))
    if abs(recomputed - delta) > WITNESS_TOL:
        raise CertificateError(
            f"recomputed E|f-p| = {recomputed} does not match LP delta {delta}"
        )
    if not -WITNESS_TOL <= delta <= 2.0 + WITNESS_TOL:
        raise CertificateError(f"delta {delta} outside [0, 2]")
    return L1ApproxResult(delta, poly, d, sol.iterations)


def duality_certificate(f: BooleanFunction, d: int) -> DualityCertificate:
    """Solve both programs independently and report the duality gap."""
    res = distance_to_resilience(f, d)
    l1 = l1_poly_distance(f, d)
    gap = abs(l1.delta + res.alpha - 1.0)
    return DualityCertificate(res.alpha, l1.delta, gap, res, l1)
