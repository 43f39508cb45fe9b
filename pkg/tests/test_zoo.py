import math
from fractions import Fraction

import numpy as np
import pytest

from boolres.hypercube import (
    is_d_resilient,
    popcounts,
    spectral_stats,
    wht,
)
from boolres.zoo import (
    SymmetricFunction,
    constant,
    cyclerun,
    cyclerun_table,
    dictator,
    ft_sandwich_report,
    ft_stats,
    gaussian_density,
    majority,
    parity,
    random_boolean,
    threshold_ft,
    tribes,
    tribes_coefficient,
    tribes_spectrum_closed_form,
    tribes_weight_bound,
)


# ---------------------------------------------------------------------------
# tribes
# ---------------------------------------------------------------------------

def tribes_reference(w, s, idx):
    """Independent DNF evaluation: TRUE (-1) iff some block is all-true."""
    for block in range(s):
        if all((idx >> (block * w + j)) & 1 for j in range(w)):
            return -1
    return 1


def test_tribes_table_matches_dnf_oracle():
    for w, s in ((1, 1), (2, 2), (2, 3), (3, 2)):
        f = tribes(w, s)
        for idx in range(1 << (w * s)):
            assert f(idx) == tribes_reference(w, s, idx)


def test_tribes_empty_set_coefficient():
    assert tribes_coefficient(2, 2, 0) == pytest.approx(2 * (3 / 4) ** 2 - 1)
    assert tribes_coefficient(2, 2, 0) == pytest.approx(1 / 8)


def test_tribes_full_block_coefficient():
    # whole first block: k=1 blocks hit, |T| = 2
    assert tribes_coefficient(2, 2, 0b0011) == pytest.approx(-3 / 8)


def test_tribes_closed_form_equals_wht():
    for w, s in ((2, 2), (2, 3), (3, 2)):
        exact = wht(tribes(w, s)).coeffs
        closed = tribes_spectrum_closed_form(w, s)
        assert np.max(np.abs(exact - closed)) <= 1e-12


def test_tribes_single_variable_is_dictator():
    f = tribes(1, 1)
    assert np.array_equal(f.table, dictator(1, 1).table)
    assert tribes_coefficient(1, 1, 0b1) == pytest.approx(1.0)


def test_tribes_weight_bound_formula():
    # w=3, s=5 is the integer closest to (ln 2) 2^w; d=1
    n = 15
    assert tribes_weight_bound(3, 5, 1) == pytest.approx(2 * (2 * math.log(n)) ** 6 / n)


def test_tribes_low_weight_below_bound_when_meaningful():
    for w, s in ((2, 2), (2, 3), (3, 2)):
        f = tribes(w, s)
        for d in (0, 1):
            exact = spectral_stats(f, d).low_weight
            assert exact <= 1.0
            bound = tribes_weight_bound(w, s, d)
            if bound <= 1.0:
                assert exact <= bound


def test_tribes_guards():
    with pytest.raises(ValueError):
        tribes(0, 3)
    with pytest.raises(ValueError):
        tribes(6, 5)  # 30 bits


# ---------------------------------------------------------------------------
# cyclerun
# ---------------------------------------------------------------------------

def cyclerun_reference(bits):
    """Literal three-stage procedure on a +-1 sequence (index 0 = coord 1)."""
    n = len(bits)
    if all(b == bits[0] for b in bits):
        return bits[0]
    start = next(i for i in range(n) if bits[i] != bits[i - 1])
    rotated = [bits[(start + i) % n] for i in range(n)]
    runs = []
    i = 0
    while i < n:
        j = i
        while j < n and rotated[j] == rotated[i]:
            j += 1
        runs.append((rotated[i], j - i))
        i = j

    best_one = max((l for v, l in runs if v == 1), default=0)
    best_neg = max((l for v, l in runs if v == -1), default=0)
    if best_one != best_neg:
        return 1 if best_one > best_neg else -1
    best = best_one
    count_one = sum(1 for v, l in runs if v == 1 and l == best)
    count_neg = sum(1 for v, l in runs if v == -1 and l == best)
    if count_one != count_neg:
        return 1 if count_one > count_neg else -1

    max_positions = [k for k, (v, l) in enumerate(runs) if l == best]
    totals = {1: 0, -1: 0}
    m = len(max_positions)
    for a in range(m):
        here = max_positions[a]
        there = max_positions[(a + 1) % m]
        owner = runs[here][0]
        k = (here + 1) % len(runs)
        while k != there:
            totals[owner] += runs[k][1]
            k = (k + 1) % len(runs)
    if totals[1] != totals[-1]:
        return 1 if totals[1] > totals[-1] else -1
    return 1 if sum(bits) > 0 else -1


def bits_of(idx, n):
    return [-1 if (idx >> j) & 1 else 1 for j in range(n)]


def test_cyclerun_definition_examples():
    f = cyclerun(3)
    # x = (1, 1, -1): longest 1-run is 2
    assert f(0b100) == 1
    # x = (1, -1, 1): the 1-run wraps around to length 2
    assert f(0b010) == 1
    # mirrored for the -1 player
    assert f(0b011) == -1


def test_cyclerun_matches_reference_exhaustively():
    for n in (3, 5, 7, 9):
        f = cyclerun(n)
        for idx in range(1 << n):
            assert f(idx) == cyclerun_reference(bits_of(idx, n)), (n, idx)


def test_cyclerun_rejects_even_n():
    with pytest.raises(ValueError):
        cyclerun(6)


def test_cyclerun_is_odd():
    for n in (3, 5, 7):
        f = cyclerun(n)
        full = (1 << n) - 1
        idx = np.arange(1 << n)
        assert np.array_equal(f.table[idx ^ full], -f.table)


def test_cyclerun_is_monotone():
    for n in (3, 5, 7, 9, 11):
        f = cyclerun(n)
        idx = np.arange(1 << n)
        for j in range(n):
            bit = 1 << j
            upper = f.table[idx & ~bit]  # coordinate j+1 set to +1
            lower = f.table[idx | bit]   # coordinate j+1 set to -1
            assert np.all(lower <= upper)


def test_cyclerun_is_shift_invariant():
    for n in (3, 5, 7, 9):
        f = cyclerun(n)
        idx = np.arange(1 << n)
        rotated = ((idx >> 1) | ((idx & 1) << (n - 1))) & ((1 << n) - 1)
        assert np.array_equal(f.table[rotated], f.table)


def test_cyclerun_total_no_fallback():
    for n in (3, 5, 7, 9, 11, 13):
        _, fallbacks = cyclerun_table(n)
        assert fallbacks == 0


def test_cyclerun_balanced():
    for n in (3, 5, 7, 9):
        f = cyclerun(n)
        assert int(f.table.astype(np.int64).sum()) == 0


# ---------------------------------------------------------------------------
# majority / parity / dictator / random
# ---------------------------------------------------------------------------

def test_majority3_spectrum():
    spec = wht(majority(3))
    assert spec[0b001] == pytest.approx(0.5)
    assert spec[0b111] == pytest.approx(-0.5)


def test_monotone_zoo_singleton_coefficients_equal_influences():
    # for monotone Boolean f, coef({i}) equals the influence of coordinate i
    for f in (majority(5), tribes(2, 3), tribes(3, 2), cyclerun(5), cyclerun(9)):
        spec = wht(f)
        stats = spectral_stats(f, 1)
        for j in range(1, f.n + 1):
            assert spec[1 << (j - 1)] == pytest.approx(
                stats.per_coordinate_influence[j - 1], abs=1e-10
            )


def test_majority_rejects_even():
    with pytest.raises(ValueError):
        majority(4)


def test_parity_resilience():
    f = parity(0b011, 3)
    assert is_d_resilient(f, 1).resilient
    assert not is_d_resilient(f, 2).resilient


def test_dictator_spectrum():
    spec = wht(dictator(2, 3))
    assert spec[0b010] == pytest.approx(1.0)


def test_constant_and_random():
    c = constant(3, -1)
    assert np.all(c.table == -1)
    f1 = random_boolean(6, seed=12)
    f2 = random_boolean(6, seed=12)
    assert np.array_equal(f1.table, f2.table)
    g = random_boolean(6, seed=1, balanced=True)
    assert int(g.table.astype(np.int64).sum()) == 0


# ---------------------------------------------------------------------------
# threshold functions
# ---------------------------------------------------------------------------

def test_ft_above_all_levels_is_zero():
    f = threshold_ft(4.0, 9)  # 4 sqrt(9) = 12 > 9
    assert np.all(f.level_values == 0.0)
    stats = ft_stats(4.0, 9)
    assert stats.influence_sum == 0.0
    assert stats.support_prob == 0.0


def test_ft_zero_threshold_support():
    stats = ft_stats(0.0, 9)
    assert stats.support_prob == pytest.approx(1.0)  # odd n: sum never 0
    stats_even = ft_stats(0.0, 10)
    center = Fraction(math.comb(10, 5), 1 << 10)
    assert stats_even.support_prob == pytest.approx(float(1 - center))


def test_ft_brute_force_agreement_n12():
    for t in (0.5, 1.0, 2.0):
        f = threshold_ft(t, 12).to_bounded()
        pc = popcounts(12)
        sums = 12 - 2 * pc
        infl_bf = float(np.mean(f.table * sums))
        supp_bf = float(np.mean(f.table != 0.0))
        stats = ft_stats(t, 12)
        assert stats.influence_sum == pytest.approx(infl_bf, abs=1e-9)
        assert stats.support_prob == pytest.approx(supp_bf, abs=1e-9)


def test_ft_symmetric_and_odd():
    f = threshold_ft(1.0, 11)
    vals = f.level_values
    assert np.array_equal(vals, -vals[::-1])
    assert np.all(np.diff(vals) >= 0)  # monotone in the level


def test_ft_log_space_matches_exact_bigint():
    n, t = 200, 1.5
    tau = t * math.sqrt(n)
    infl = Fraction(0)
    supp = Fraction(0)
    for k in range(n + 1):
        s = 2 * k - n
        if s > tau:
            p = Fraction(math.comb(n, k), 1 << n)
            infl += p * s
            supp += p
    stats = ft_stats(t, n)
    assert stats.influence_sum == pytest.approx(float(2 * infl), rel=1e-10)
    assert stats.support_prob == pytest.approx(float(2 * supp), rel=1e-10)


def test_ft_sandwich_standard_normalization_large_n():
    rows = ft_sandwich_report(1000, [0.5, 1.0, 2.0, 3.0], printed=False, factor=4.0)
    for row in rows:
        assert row.influence_pass, row
        assert row.support_pass, row


def test_gaussian_density_normalizations():
    assert gaussian_density(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert gaussian_density(0.0, printed=True) == pytest.approx(1 / (2 * math.pi))


def test_symmetric_function_validation():
    with pytest.raises(ValueError):
        SymmetricFunction(3, np.array([0.0, 2.0, 0.0, 0.0]))
