"""Degree-d L1 polynomial regression agnostic learner.

Exact mode minimizes the labeled objective E|p(x) - y| over degree-<=d
polynomials, where y = +-1 has conditional mean g(x); grouping the two
label values per point turns this into a finite weighted LP.  For
Boolean-valued targets the objective collapses to plain E|p - g|.  The
regressor is rounded to a Boolean hypothesis by the deterministic
error-minimizing threshold over all breakpoint values of p (exhausting
every distinct behavior of sign(p - t)), which dominates the randomized
threshold in expectation.

Exact-expectation mode plays the role of tolerance-zero statistical
queries; query tolerance itself is not modeled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .duality import SparsePolynomial, l1_poly_distance, low_degree_masks
from .hypercube import BooleanFunction, BoundedFunction, chi_values
from .lp import OPTIMAL, LinearProgram, SolverFailure, solve_lp

EXACT_MAX_DIM_BOOLEAN = 12
EXACT_MAX_DIM_BOUNDED = 10
REGRESSION_TOL = 1e-7


@dataclass(frozen=True)
class LabeledDistribution:
    """Uniform marginal over the cube with conditional label mean g."""

    g: BoundedFunction

    @property
    def n(self) -> int:
        return self.g.n

    def label_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Point-mass weights of (x, y=+1) and (x, y=-1) pairs."""
        size = 1 << self.n
        up = (1.0 + self.g.table) / 2.0 / size
        down = (1.0 - self.g.table) / 2.0 / size
        return up, down


@dataclass(frozen=True)
class LearnReport:
    hypothesis: BooleanFunction
    error: float              # Pr[h(x) != y] under the true distribution
    regression_delta: float   # optimal E|p - y| (empirical in sampled mode)
    threshold: float
    poly: SparsePolynomial
    opt: float | None = None
    excess: float | None = None
    empirical_error: float | None = None
    m: int | None = None
    seed: int | None = None


def opt_of_class(functions: list[BooleanFunction], dist: LabeledDistribution) -> float:
    """Exact min over the class of Pr[c(x) != y] = E[(1 - c g)/2]."""
    if not functions:
        raise ValueError("empty comparison class")
    best = np.inf
    for c in functions:
        if c.n != dist.n:
            raise ValueError("class member dimension mismatch")
        best = min(best, float(np.mean((1.0 - c.table * dist.g.table) / 2.0)))
    return best


def _weighted_l1_regression(
    n: int,
    d: int,
    up: np.ndarray,
    down: np.ndarray,
    points: np.ndarray,
) -> tuple[SparsePolynomial, float, int]:
    """Minimize sum_x up_x |p(x)-1| + down_x |p(x)+1| over degree-<=d p.

    `points` restricts the objective to the listed point indices (all of
    them in exact mode, the observed sample support in sampled mode).
    """
    masks = low_degree_masks(n, d)
    k = len(masks)
    rows = len(points)
    chi = np.array([chi_values(n, mask)[points] for mask in masks], dtype=np.float64).T

    a = np.zeros((2 * rows, k + 4 * rows))
    b = np.zeros(2 * rows)
    cost = np.zeros(k + 4 * rows)
    # rows 0..rows-1:   p(x) - a+ + a- = +1   (a = |p(x) - 1| at optimum)
    # rows rows..2rows: p(x) - b+ + b- = -1   (b = |p(x) + 1| at optimum)
    a[:rows, :k] = chi
    a[rows:, :k] = chi
    eye = np.eye(rows)
    a[:rows, k : k + rows] = -eye
    a[:rows, k + rows : k + 2 * rows] = eye
    a[rows:, k + 2 * rows : k + 3 * rows] = -eye
    a[rows:, k + 3 * rows :] = eye
    b[:rows] = 1.0
    b[rows:] = -1.0
    cost[k : k + rows] = -up[points]
    cost[k + rows : k + 2 * rows] = -up[points]
    cost[k + 2 * rows : k + 3 * rows] = -down[points]
    cost[k + 3 * rows :] = -down[points]

    lower = np.concatenate([np.full(k, -np.inf), np.zeros(4 * rows)])
    upper = np.full(k + 4 * rows, np.inf)
    lp = LinearProgram(cost, a, b, lower, upper)
    # p = 0 start: a- = 1 on the +1 rows, b+ = 1 on the -1 rows
    basis = [k + rows + i for i in range(rows)] + [k + 2 * rows + i for i in range(rows)]
    sol = solve_lp(lp, initial_basis=basis)
    if sol.status != OPTIMAL:
        raise SolverFailure(f"regression LP ended with status {sol.status}")
    coeffs = {mask: float(sol.point[col]) for col, mask in enumerate(masks)}
    return SparsePolynomial(n, d, coeffs), -sol.value, sol.iterations


def _boolean_l1_regression(
    n: int,
    d: int,
    weights: np.ndarray,
    targets: np.ndarray,
    points: np.ndarray,
) -> tuple[SparsePolynomial, float, int]:
    """Minimize sum_x w_x |p(x) - f(x)| for +-1 targets (one row per point)."""
    masks = low_degree_masks(n, d)
    k = len(masks)
    rows = len(points)
    chi = np.array([chi_values(n, mask)[points] for mask in masks], dtype=np.float64).T
    a = np.zeros((rows, k + 2 * rows))
    a[:, :k] = chi
    a[:, k : k + rows] = np.eye(rows)
    a[:, k + rows :] = -np.eye(rows)
    b = targets[points].astype(np.float64)
    cost = np.zeros(k + 2 * rows)
    cost[k : k + rows] = -weights[points]
    cost[k + rows :] = -weights[points]
    lower = np.concatenate([np.full(k, -np.inf), np.zeros(2 * rows)])
    upper = np.full(k + 2 * rows, np.inf)
    lp = LinearProgram(cost, a, b, lower, upper)
    basis = [k + i if b[i] > 0 else k + rows + i for i in range(rows)]
    sol = solve_lp(lp, initial_basis=basis)
    if sol.status != OPTIMAL:
        raise SolverFailure(f"regression LP ended with status {sol.status}")
    coeffs = {mask: float(sol.point[col]) for col, mask in enumerate(masks)}
    return SparsePolynomial(n, d, coeffs), -sol.value, sol.iterations


def _best_threshold(
    p_table: np.ndarray, up: np.ndarray, down: np.ndarray
) -> tuple[float, float, np.ndarray]:
    """Deterministic sweep over all breakpoints of p.

    Error of h_t = sign(p - t) (value +1 iff p(x) > t) equals
    sum_x [up_x (1 - h)/2 + down_x (1 + h)/2]; minimized exactly over the
    2^n + 1 distinct behaviors.  Ties resolve to the smallest threshold.
    """
    total_up = float(up.sum())
    total_down = float(down.sum())
    order = np.argsort(p_table, kind="stable")
    sorted_p = p_table[order]
    up_sorted = up[order]
    down_sorted = down[order]

    # candidate thresholds: below everything, then each distinct value
    # h = +1 exactly on the strict suffix above the threshold
    boundaries = np.nonzero(np.diff(sorted_p) > 0)[0]
    cut_positions = np.concatenate([[0], boundaries + 1, [len(sorted_p)]])
    up_prefix = np.concatenate([[0.0], np.cumsum(up_sorted)])
    down_prefix = np.concatenate([[0.0], np.cumsum(down_sorted)])
    best_err, best_cut = np.inf, 0
    for cut in cut_positions:
        # points with index >= cut get h = +1
        err = down_prefix[-1] - down_prefix[cut] + up_prefix[cut]
        if err < best_err - 1e-15:
            best_err, best_cut = float(err), int(cut)
    if best_cut == 0:
        threshold = float(sorted_p[0] - 1.0)
    else:
        threshold = float(sorted_p[best_cut - 1])
    h = np.where(p_table > threshold, 1, -1).astype(np.int8)
    err_direct = float(up[h < 0].sum() + down[h > 0].sum())
    return threshold, err_direct, h


def learn_exact(
    dist: LabeledDistribution,
    d: int,
    epsilon: float,
    comparison_class: list[BooleanFunction] | None = None,
) -> LearnReport:
    """Exact-expectation regression + optimal thresholding.

    When a comparison class is supplied, the excess-error contract
    excess <= Delta_d(C)/2 + epsilon is asserted with Delta computed by the
    independent L1-approximation LP over the class.
    """
    n = dist.n
    g = dist.g
    boolean_target = bool(np.all(np.abs(g.table) == 1.0))
    limit = EXACT_MAX_DIM_BOOLEAN if boolean_target else EXACT_MAX_DIM_BOUNDED
    if n > limit:
        raise ValueError(f"exact mode limited to n <= {limit} for this target type")
    up, down = dist.label_weights()
    points = np.arange(1 << n)
    if boolean_target:
        weights = np.full(1 << n, 1.0 / (1 << n))
        poly, delta, _ = _boolean_l1_regression(n, d, weights, g.table, points)
    else:
        poly, delta, _ = _weighted_l1_regression(n, d, up, down, points)

    p_table = poly.table()
    recomputed = float(np.sum(up * np.abs(p_table - 1.0) + down * np.abs(p_table + 1.0)))
    if abs(recomputed - delta) > REGRESSION_TOL:
        raise SolverFailure(
            f"regression objective {delta} disagrees with recomputation {recomputed}"
        )

    threshold, error, h_table = _best_threshold(p_table, up, down)
    hypothesis = BooleanFunction(n, h_table)
    report = LearnReport(
        hypothesis=hypothesis,
        error=error,
        regression_delta=delta,
        threshold=threshold,
        poly=poly,
    )
    if comparison_class is not None:
        opt = opt_of_class(comparison_class, dist)
        excess = error - opt
        delta_class = max(
            l1_poly_distance(c, d).delta for c in comparison_class
        )
        if excess > delta_class / 2.0 + epsilon + 1e-9:
            raise AssertionError(
                f"excess error {excess} exceeded Delta/2 + eps = "
                f"{delta_class / 2.0 + epsilon}"
            )
        report = LearnReport(
            hypothesis=hypothesis,
            error=error,
            regression_delta=delta,
            threshold=threshold,
            poly=poly,
            opt=opt,
            excess=excess,
        )
    return report


def learn_sampled(
    dist: LabeledDistribution,
    d: int,
    m: int,
    seed: int,
    comparison_class: list[BooleanFunction] | None = None,
) -> LearnReport:
    """Empirical-L1 regression over m labeled samples, seed-mandatory.

    The hypothesis threshold minimizes the empirical error; the report
    carries both the empirical error and the exact true error.
    """
    if m < 1:
        raise ValueError("sample count m must be positive")
    n = dist.n
    if n > EXACT_MAX_DIM_BOOLEAN:
        raise ValueError(f"sampled mode limited to n <= {EXACT_MAX_DIM_BOOLEAN}")
    rng = np.random.default_rng(seed)
    size = 1 << n
    xs = rng.integers(0, size, size=m)
    gvals = dist.g.table[xs]
    ys = np.where(rng.random(m) < (1.0 + gvals) / 2.0, 1, -1)

    up_counts = np.bincount(xs[ys > 0], minlength=size).astype(np.float64) / m
    down_counts = np.bincount(xs[ys < 0], minlength=size).astype(np.float64) / m
    observed = np.nonzero(up_counts + down_counts > 0)[0]

    pure = not np.any((up_counts > 0) & (down_counts > 0))
    if pure:
        # consistent labels per point: plain weighted L1 onto the labels
        targets = np.where(up_counts > 0, 1, -1).astype(np.int8)
        poly, delta_emp, _ = _boolean_l1_regression(
            n, d, up_counts + down_counts, targets, observed
        )
    else:
        poly, delta_emp, _ = _weighted_l1_regression(
            n, d, up_counts, down_counts, observed
        )

    p_table = poly.table()
    emp_threshold, emp_error, h_table = _best_threshold(p_table, up_counts, down_counts)
    hypothesis = BooleanFunction(n, h_table)
    up, down = dist.label_weights()
    true_error = float(up[h_table < 0].sum() + down[h_table > 0].sum())

    opt = excess = None
    if comparison_class is not None:
        opt = opt_of_class(comparison_class, dist)
        excess = true_error - opt
    return LearnReport(
        hypothesis=hypothesis,
        error=true_error,
        regression_delta=delta_emp,
        threshold=emp_threshold,
        poly=poly,
        opt=opt,
        excess=excess,
        empirical_error=emp_error,
        m=m,
        seed=seed,
    )
