"""Explicit function constructions: Tribes, CycleRun, majorities, parities,
dictators and symmetric threshold functions with binomial-exact statistics.

Sign conventions are per-function and deliberately explicit:

* Tribes maps logical TRUE to -1 (inputs and output), the convention under
  which its closed-form Fourier coefficients hold.
* CycleRun outputs +1 exactly when the 1-player wins the three-stage run
  comparison; "clockwise" is increasing coordinate index with wraparound.

Generic operations elsewhere never assume either convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hypercube import BooleanFunction, BoundedFunction, chi_values, coordinate_values

# ---------------------------------------------------------------------------
# basic zoo members
# ---------------------------------------------------------------------------


def majority(n: int) -> BooleanFunction:
    if n % 2 == 0:
        raise ValueError("majority needs odd n")
    pc = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    return BooleanFunction(n, np.where(pc < n / 2, 1, -1))


def parity(mask: int, n: int) -> BooleanFunction:
    if not 0 <= mask < (1 << n):
        raise ValueError("parity mask outside [n]")
    return BooleanFunction(n, chi_values(n, mask))


def dictator(i: int, n: int) -> BooleanFunction:
    if not 1 <= i <= n:
        raise ValueError("dictator coordinate outside [1, n]")
    return BooleanFunction(n, coordinate_values(n, i))


def constant(n: int, sign: int) -> BooleanFunction:
    if sign not in (-1, 1):
        raise ValueError("constant sign must be +-1")
    return BooleanFunction(n, np.full(1 << n, sign, dtype=np.int8))


def random_boolean(n: int, seed: int, balanced: bool = False) -> BooleanFunction:
    rng = np.random.default_rng(seed)
    if balanced:
        table = np.ones(1 << n, dtype=np.int8)
        table[rng.permutation(1 << n)[: 1 << (n - 1)]] = -1
        return BooleanFunction(n, table)
    return BooleanFunction(n, rng.choice(np.array([-1, 1], dtype=np.int8), size=1 << n))


# ---------------------------------------------------------------------------
# Tribes
# ---------------------------------------------------------------------------

TRIBES_MAX_BITS = 28


def _tribes_check(w: int, s: int) -> None:
    if w < 1 or s < 1:
        raise ValueError("tribes needs w >= 1 and s >= 1")
    if w * s > TRIBES_MAX_BITS:
        raise ValueError(f"tribes table limited to w*s <= {TRIBES_MAX_BITS}")


def tribes(w: int, s: int) -> BooleanFunction:
    """Disjunction of s disjoint width-w conjunctions; TRUE maps to -1."""
    _tribes_check(w, s)
    n = w * s
    idx = np.arange(1 << n, dtype=np.int64)
    fired = np.zeros(1 << n, dtype=bool)
    for block in range(s):
        bmask = ((1 << w) - 1) << (block * w)
        fired |= (idx & bmask) == bmask
    return BooleanFunction(n, np.where(fired, -1, 1))


def tribes_coefficient(w: int, s: int, mask: int) -> float:
    """Closed-form Fourier coefficient of Tribes at subset T (as a mask)."""
    _tribes_check(w, s)
    n = w * s
    if not 0 <= mask < (1 << n):
        raise ValueError("mask outside the tribes variable range")
    q = 1.0 - 2.0 ** (-w)
    if mask == 0:
        return 2.0 * q**s - 1.0
    size = int(mask).bit_count()
    hit = sum(1 for block in range(s) if mask & (((1 << w) - 1) << (block * w)))
    return 2.0 * (-1.0) ** (hit + size) * 2.0 ** (-hit * w) * q ** (s - hit)


def tribes_spectrum_closed_form(w: int, s: int) -> np.ndarray:
    """All 2^(ws) closed-form coefficients at once (vectorized)."""
    _tribes_check(w, s)
    n = w * s
    masks = np.arange(1 << n, dtype=np.uint64)
    size = np.bitwise_count(masks).astype(np.int64)
    hit = np.zeros(1 << n, dtype=np.int64)
    for block in range(s):
        bmask = np.uint64(((1 << w) - 1) << (block * w))
        hit += (masks & bmask) != 0
    q = 1.0 - 2.0 ** (-w)
    coeffs = 2.0 * (-1.0) ** (hit + size) * 2.0 ** (-hit * w) * q ** (s - hit)
    coeffs[0] = 2.0 * q**s - 1.0
    return coeffs


def tribes_weight_bound(w: int, s: int, d: int) -> float:
    """Upper bound 2 (2 ln n)^(2d+4) / n for the Fourier weight at degree <= d."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    n = w * s
    return 2.0 * (2.0 * math.log(n)) ** (2 * d + 4) / n


# ---------------------------------------------------------------------------
# CycleRun
# ---------------------------------------------------------------------------

CYCLERUN_MAX_DIM = 25
CYCLERUN_EXHAUSTIVE_DIM = 17  # fallback is proven absent by enumeration up to here


def _ror(v: np.ndarray, k: int, n: int, mask: int) -> np.ndarray:
    """Cyclic shift: bit j of the result is bit (j+k) mod n of v."""
    if k == 0:
        return v
    return ((v >> k) | (v << (n - k))) & mask


def _rol(v: np.ndarray, k: int, n: int, mask: int) -> np.ndarray:
    """Cyclic shift: bit j of the result is bit (j-k) mod n of v."""
    if k == 0:
        return v
    return ((v << k) | (v >> (n - k))) & mask


def _longest_run(v: np.ndarray, n: int, mask: int) -> np.ndarray:
    """Longest cyclic run of set bits, vectorized over a point array."""
    best = np.where(v != 0, 1, 0).astype(np.int64)
    y = v.copy()
    for length in range(2, n + 1):
        y = y & _ror(v, length - 1, n, mask)
        if not y.any():
            break
        best[y != 0] = length
    return best


def _run_starts(v: np.ndarray, run_len: int, n: int, mask: int) -> np.ndarray:
    """Bit j set iff a maximal run of exactly `run_len` set bits starts at j.

    Assumes no strictly longer run exists in v.
    """
    y = v.copy()
    for t in range(1, run_len):
        y = y & _ror(v, t, n, mask)
    return y & ~_rol(v, 1, n, mask)


def cyclerun_table(n: int) -> tuple[np.ndarray, int]:
    """CycleRun truth table plus the number of stage-3 residual-tie fallbacks."""
    if n % 2 == 0:
        raise ValueError("cyclerun needs odd n")
    if not 3 <= n <= CYCLERUN_MAX_DIM:
        raise ValueError(f"cyclerun supported for odd n in [3, {CYCLERUN_MAX_DIM}]")
    mask = (1 << n) - 1
    idx = np.arange(1 << n, dtype=np.int64)
    neg_bits = idx
    pos_bits = ~idx & mask

    len_pos = _longest_run(pos_bits, n, mask)
    len_neg = _longest_run(neg_bits, n, mask)
    table = np.zeros(1 << n, dtype=np.int8)
    table[len_pos > len_neg] = 1
    table[len_neg > len_pos] = -1

    fallback_count = 0
    tied = np.nonzero(table == 0)[0]
    for run_len in np.unique(len_pos[tied]):
        group = tied[len_pos[tied] == run_len]
        vp = pos_bits[group]
        vn = neg_bits[group]
        starts_p = _run_starts(vp, int(run_len), n, mask)
        starts_n = _run_starts(vn, int(run_len), n, mask)
        count_p = np.bitwise_count(starts_p.astype(np.uint64)).astype(np.int64)
        count_n = np.bitwise_count(starts_n.astype(np.uint64)).astype(np.int64)
        verdict = np.sign(count_p - count_n).astype(np.int8)

        still = np.nonzero(verdict == 0)[0]
        if len(still):
            sp = starts_p[still]
            sn = starts_n[still]
            both = sp | sn
            cover = both.copy()
            for t in range(1, int(run_len)):
                cover |= _rol(both, t, n, mask)
            open_pos = ~cover & mask
            seed_p = _rol(sp, int(run_len), n, mask) & open_pos
            seed_n = _rol(sn, int(run_len), n, mask) & open_pos
            for _ in range(n):
                grown_p = seed_p | (_rol(seed_p, 1, n, mask) & open_pos)
                grown_n = seed_n | (_rol(seed_n, 1, n, mask) & open_pos)
                if np.array_equal(grown_p, seed_p) and np.array_equal(grown_n, seed_n):
                    break
                seed_p, seed_n = grown_p, grown_n
            total_p = np.bitwise_count(seed_p.astype(np.uint64)).astype(np.int64)
            total_n = np.bitwise_count(seed_n.astype(np.uint64)).astype(np.int64)
            stage3 = np.sign(total_p - total_n).astype(np.int8)

            residual = stage3 == 0
            if residual.any():
                fallback_count += int(residual.sum())
                pts = group[still[residual]]
                pc = np.bitwise_count(pts.astype(np.uint64)).astype(np.int64)
                stage3[residual] = np.where(pc < n / 2, 1, -1)
            verdict[still] = stage3
        table[group] = verdict
    return table, fallback_count


def cyclerun(n: int) -> BooleanFunction:
    """CycleRun; for n <= 17 the stage-3 tiebreak is verified total."""
    table, fallbacks = cyclerun_table(n)
    if n <= CYCLERUN_EXHAUSTIVE_DIM and fallbacks:
        raise RuntimeError(f"cyclerun residual fallback fired {fallbacks} times at n={n}")
    return BooleanFunction(n, table)


# ---------------------------------------------------------------------------
# symmetric threshold functions f_t
# ---------------------------------------------------------------------------

FT_EXACT_MAX = 64  # rational arithmetic below this, log-space above
FT_MAX_N = 10**6


@dataclass(frozen=True)
class SymmetricFunction:
    """Function of the coordinate sum; level k holds the value at k plus-ones."""

    n: int
    level_values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.level_values, dtype=np.float64)
        if vals.shape != (self.n + 1,):
            raise ValueError("level_values must have n+1 entries")
        if np.max(np.abs(vals), initial=0.0) > 1.0:
            raise ValueError("level values must lie in [-1, 1]")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "level_values", vals)

    def to_bounded(self) -> BoundedFunction:
        pc = np.bitwise_count(np.arange(1 << self.n, dtype=np.uint64)).astype(np.int64)
        k = self.n - pc  # number of +1 coordinates
        return BoundedFunction(self.n, self.level_values[k])


def threshold_ft(t: float, n: int) -> SymmetricFunction:
    """Sign of the coordinate sum, zeroed on the band |sum| <= t sqrt(n)."""
    if t < 0:
        raise ValueError("threshold parameter t must be nonnegative")
    if n > FT_MAX_N:
        raise ValueError(f"n limited to {FT_MAX_N}")
    tau = t * math.sqrt(n)
    levels = np.arange(n + 1) * 2 - n  # sum at k plus-ones
    vals = np.where(levels > tau, 1.0, np.where(levels < -tau, -1.0, 0.0))
    return SymmetricFunction(n, vals)


@dataclass(frozen=True)
class FtStats:
    influence_sum: float  # E[f_t(x) * sum(x)] = sum of level-1 coefficients
    support_prob: float   # Pr[f_t(x) != 0]


def ft_stats(t: float, n: int) -> FtStats:
    """Exact binomial statistics of f_t, no hypercube enumeration.

    Rational arithmetic for n <= 64, log-space otherwise.
    """
    if t < 0:
        raise ValueError("threshold parameter t must be nonnegative")
    if n > FT_MAX_N:
        raise ValueError(f"n limited to {FT_MAX_N}")
    tau = t * math.sqrt(n)
    if n <= FT_EXACT_MAX:
        infl = Fraction(0)
        supp = Fraction(0)
        denom = 1 << n
        for k in range(n + 1):
            s = 2 * k - n
            if s > tau:
                p = Fraction(math.comb(n, k), denom)
                infl += p * s
                supp += p
        return FtStats(float(2 * infl), float(2 * supp))
    # positive side levels s = 2k - n > tau
    k0 = int(math.floor((tau + n) / 2.0)) + 1
    if k0 > n:
        return FtStats(0.0, 0.0)
    ks = np.arange(k0, n + 1, dtype=np.float64)
    # log Pr[level k] accumulated from the previous level, seeded at k0
    logp0 = (
        math.lgamma(n + 1) - math.lgamma(k0 + 1) - math.lgamma(n - k0 + 1)
        - n * math.log(2.0)
    )
    steps = np.log(n - ks[:-1]) - np.log(ks[:-1] + 1.0)
    logp = logp0 + np.concatenate([[0.0], np.cumsum(steps)])
    shift = logp.max()
    probs = np.exp(logp - shift)
    supp = 2.0 * math.exp(shift) * float(probs.sum())
    infl = 2.0 * math.exp(shift) * float((probs * (2.0 * ks - n)).sum())
    return FtStats(infl, supp)


def gaussian_density(u: float, printed: bool = False) -> float:
    """Standard normal density; `printed` selects the 1/(2 pi) variant."""
    norm = 1.0 / (2.0 * math.pi) if printed else 1.0 / math.sqrt(2.0 * math.pi)
    return norm * math.exp(-(u * u) / 2.0)


@dataclass(frozen=True)
class FtSandwichRow:
    t: float
    influence: float
    support: float
    phi: float
    influence_low: float
    influence_high: float
    influence_pass: bool
    support_low: float
    support_high: float
    support_pass: bool


def ft_sandwich_report(
    n: int, ts: list[float], printed: bool = False, factor: float = 3.0
) -> list[FtSandwichRow]:
    """Evaluate the influence/support sandwich bounds at each t.

    influence in [phi(t) sqrt(n)/factor, factor phi(t) sqrt(n)] and
    support in [phi(t)/(factor t), factor phi(t)/t]; t must be positive.
    """
    rows = []
    for t in ts:
        if t <= 0:
            raise ValueError("sandwich bounds need t > 0")
        stats = ft_stats(t, n)
        phi = gaussian_density(t, printed=printed)
        inf_lo, inf_hi = phi * math.sqrt(n) / factor, factor * phi * math.sqrt(n)
        sup_lo, sup_hi = phi / (factor * t), factor * phi / t
        rows.append(
            FtSandwichRow(
                t=t,
                influence=stats.influence_sum,
                support=stats.support_prob,
                phi=phi,
                influence_low=inf_lo,
                influence_high=inf_hi,
                influence_pass=inf_lo <= stats.influence_sum <= inf_hi,
                support_low=sup_lo,
                support_high=sup_hi,
                support_pass=sup_lo <= stats.support_prob <= sup_hi,
            )
        )
    return rows
