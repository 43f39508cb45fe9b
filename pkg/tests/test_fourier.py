import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boolres.hypercube import (
    BooleanFunction,
    BoundedFunction,
    DimensionMismatch,
    DimensionTooLarge,
    Spectrum,
    chi_values,
    correlation,
    coordinate_values,
    inverse_wht,
    is_d_resilient,
    l1_distance,
    noise_sensitivity,
    read_truth_table,
    spectral_stats,
    spectrum_from_json,
    spectrum_to_json,
    wht,
    wht_int,
    write_truth_table,
)


def brute_force_coefficient(table, n, mask):
    """Independent oracle: 2^-n sum_x f(x) chi_S(x) over explicit tuples."""
    total = 0.0
    for idx in range(1 << n):
        coords = [1 if (idx >> j) & 1 == 0 else -1 for j in range(n)]
        chi = 1
        for j in range(n):
            if (mask >> j) & 1:
                chi *= coords[j]
        total += table[idx] * chi
    return total / (1 << n)


def make_majority3():
    coords = [coordinate_values(3, j).astype(int) for j in (1, 2, 3)]
    return BooleanFunction(3, np.sign(coords[0] + coords[1] + coords[2]))


def random_boolean(n, rng):
    return BooleanFunction(n, rng.choice([-1, 1], size=1 << n))


def test_parity_spectrum_is_single_character():
    f = BooleanFunction(2, chi_values(2, 0b11))
    spec = wht(f)
    expected = np.zeros(4)
    expected[0b11] = 1.0
    assert np.allclose(spec.coeffs, expected, atol=1e-15)


def test_majority3_spectrum_matches_brute_force():
    f = make_majority3()
    spec = wht(f)
    for mask in range(8):
        oracle = brute_force_coefficient(f.table, 3, mask)
        assert spec[mask] == pytest.approx(oracle, abs=1e-12)
    for j in range(3):
        assert spec[1 << j] == pytest.approx(0.5)
    assert spec[0b111] == pytest.approx(-0.5)
    assert spec[0] == pytest.approx(0.0)


def test_constant_function_spectrum():
    f = BooleanFunction(3, np.ones(8, dtype=np.int8))
    spec = wht(f)
    assert spec[0] == pytest.approx(1.0)
    assert np.allclose(spec.coeffs[1:], 0.0)


def test_dictator_bit_convention_canary():
    # coordinate 1 must decode from bit 0 of the point index
    f = BooleanFunction(3, coordinate_values(3, 1))
    spec = wht(f)
    assert spec[0b001] == pytest.approx(1.0)
    assert np.sum(np.abs(spec.coeffs)) == pytest.approx(1.0)
    assert f(0) == 1 and f(1) == -1


def test_wht_round_trip_boolean_exact():
    rng = np.random.default_rng(7)
    for n in range(1, 9):
        f = random_boolean(n, rng)
        back = inverse_wht(wht(f))
        assert np.array_equal(back, f.table.astype(float))


def test_wht_round_trip_bounded():
    rng = np.random.default_rng(11)
    g = BoundedFunction(6, rng.uniform(-1, 1, size=64))
    back = inverse_wht(wht(g))
    assert np.max(np.abs(back - g.table)) < 1e-12


def test_wht_int_is_exact_and_consistent():
    rng = np.random.default_rng(3)
    f = random_boolean(6, rng)
    ints = wht_int(f)
    assert ints.dtype == np.int64
    assert np.allclose(ints / 64.0, wht(f).coeffs)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=8), st.integers(min_value=0, max_value=2**32 - 1))
def test_parseval_random_boolean(n, seed):
    rng = np.random.default_rng(seed)
    f = random_boolean(n, rng)
    assert np.sum(wht(f).coeffs ** 2) == pytest.approx(1.0, abs=1e-9)


def test_parseval_across_dimensions():
    rng = np.random.default_rng(2024)
    for n in range(4, 13):
        for _ in range(12):
            f = random_boolean(n, rng)
            assert np.sum(wht(f).coeffs ** 2) == pytest.approx(1.0, abs=1e-9)


def test_plancherel_random_pairs():
    rng = np.random.default_rng(5)
    for _ in range(20):
        f = random_boolean(6, rng)
        g = random_boolean(6, rng)
        lhs = correlation(f, g)
        rhs = float(np.dot(wht(f).coeffs, wht(g).coeffs))
        assert lhs == pytest.approx(rhs, abs=1e-9)


def test_dimension_guard():
    with pytest.raises(DimensionTooLarge):
        BooleanFunction(40, np.ones(4, dtype=np.int8))


def test_majority3_stats():
    stats = spectral_stats(make_majority3(), d=1)
    assert stats.total_influence == pytest.approx(1.5)
    assert stats.low_weight == pytest.approx(0.75)
    assert stats.per_coordinate_influence == pytest.approx((0.5, 0.5, 0.5))


def test_edge_influence_by_exhaustive_oracle():
    rng = np.random.default_rng(17)
    f = random_boolean(5, rng)
    stats = spectral_stats(f, d=2)
    # oracle: count boundary edges one point at a time
    n = 5
    for j in range(1, n + 1):
        count = 0
        for idx in range(1 << n):
            if f(idx) != f(idx ^ (1 << (j - 1))):
                count += 1
        assert stats.per_coordinate_influence[j - 1] == pytest.approx(count / (1 << n))


def test_parity_influence_and_low_weight():
    for k in (2, 3, 4):
        f = BooleanFunction(5, chi_values(5, (1 << k) - 1))
        stats = spectral_stats(f, d=k - 1)
        assert stats.total_influence == pytest.approx(k)
        assert stats.low_weight == pytest.approx(0.0, abs=1e-12)


def test_dictator_influence_vector():
    f = BooleanFunction(4, coordinate_values(4, 1))
    stats = spectral_stats(f, d=1)
    assert stats.per_coordinate_influence == pytest.approx((1.0, 0.0, 0.0, 0.0))


def test_edge_influence_equals_fourier_influence():
    rng = np.random.default_rng(23)
    for n in (4, 6, 8):
        f = random_boolean(n, rng)
        stats = spectral_stats(f, d=1)
        sq = wht(f).coeffs ** 2
        pc = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(int)
        assert stats.total_influence == pytest.approx(float(np.dot(pc, sq)), abs=1e-9)


def test_monotone_singleton_coefficients_equal_influence():
    f = make_majority3()
    spec = wht(f)
    stats = spectral_stats(f, d=1)
    for j in range(1, 4):
        assert spec[1 << (j - 1)] == pytest.approx(
            stats.per_coordinate_influence[j - 1], abs=1e-10
        )


def test_noise_sensitivity_zero_rate():
    rng = np.random.default_rng(31)
    f = random_boolean(6, rng)
    assert noise_sensitivity(f, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert noise_sensitivity(f, 0.0, method="direct") == pytest.approx(0.0, abs=1e-12)


def test_noise_sensitivity_of_characters():
    # NS_delta[chi_S] = (1 - (1-2 delta)^|S|) / 2
    for size, delta in itertools.product((1, 2, 3), (0.1, 0.25, 0.4)):
        f = BooleanFunction(4, chi_values(4, (1 << size) - 1))
        expected = (1.0 - (1.0 - 2.0 * delta) ** size) / 2.0
        assert noise_sensitivity(f, delta) == pytest.approx(expected, abs=1e-12)
    f = BooleanFunction(4, chi_values(4, 0b1))
    assert noise_sensitivity(f, 0.25) == pytest.approx(0.25)


def test_noise_sensitivity_direct_oracle_agreement():
    rng = np.random.default_rng(41)
    f = make_majority3()
    direct = noise_sensitivity(f, 0.1, method="direct")
    spectral = noise_sensitivity(f, 0.1)
    assert abs(direct - spectral) < 1e-10
    for _ in range(5):
        g = random_boolean(7, rng)
        delta = rng.uniform(0, 1)
        assert abs(
            noise_sensitivity(g, delta, method="direct") - noise_sensitivity(g, delta)
        ) < 1e-10


def test_noise_sensitivity_validates_rate():
    f = make_majority3()
    with pytest.raises(ValueError):
        noise_sensitivity(f, -0.1)
    with pytest.raises(ValueError):
        noise_sensitivity(f, 1.5)


def test_distance_correlation_identity():
    rng = np.random.default_rng(43)
    f = random_boolean(6, rng)
    g = BoundedFunction(6, rng.uniform(-1, 1, size=64))
    assert l1_distance(f, g) + correlation(f, g) == pytest.approx(1.0, abs=1e-10)


def test_distance_extremes():
    rng = np.random.default_rng(47)
    f = random_boolean(5, rng)
    neg = BooleanFunction(5, -f.table)
    assert l1_distance(f, f) == 0.0
    assert correlation(f, f) == 1.0
    assert l1_distance(f, neg) == 2.0
    assert correlation(f, neg) == -1.0


def test_and2_vs_zero_function():
    # +1 everywhere except the all-true point
    table = np.ones(4, dtype=np.int8)
    table[0] = -1
    f = BooleanFunction(2, table)
    zero = BoundedFunction(2, np.zeros(4))
    assert l1_distance(f, zero) == pytest.approx(1.0)
    assert correlation(f, zero) == pytest.approx(0.0)
    assert is_d_resilient(zero, 0).resilient


def test_dimension_mismatch_raises():
    f = BooleanFunction(2, np.ones(4, dtype=np.int8))
    g = BooleanFunction(3, np.ones(8, dtype=np.int8))
    with pytest.raises(DimensionMismatch):
        l1_distance(f, g)


def test_resilience_check_exact_integer_path():
    f = BooleanFunction(4, chi_values(4, 0b111))
    check = is_d_resilient(f, 2)
    assert check.resilient and check.exact
    check3 = is_d_resilient(f, 3)
    assert not check3.resilient
    assert check3.worst_mask == 0b111
    assert check3.worst_coefficient == pytest.approx(1.0)


def test_resilience_check_bounded_tolerance():
    g = BoundedFunction(3, np.full(8, 1e-12))
    assert is_d_resilient(g, 1, tol=1e-9).resilient
    g2 = BoundedFunction(3, np.full(8, 1e-3))
    check = is_d_resilient(g2, 0, tol=1e-9)
    assert not check.resilient
    assert check.worst_mask == 0


def test_truth_table_round_trip(tmp_path):
    rng = np.random.default_rng(53)
    f = random_boolean(4, rng)
    path = tmp_path / "f.tt"
    write_truth_table(f, str(path))
    back = read_truth_table(str(path))
    assert isinstance(back, BooleanFunction)
    assert np.array_equal(back.table, f.table)

    g = BoundedFunction(3, rng.uniform(-1, 1, size=8))
    pathg = tmp_path / "g.tt"
    write_truth_table(g, str(pathg))
    backg = read_truth_table(str(pathg))
    assert isinstance(backg, BoundedFunction)
    assert np.array_equal(backg.table, g.table)


def test_spectrum_json_round_trip():
    f = make_majority3()
    spec = wht(f)
    back = spectrum_from_json(spectrum_to_json(spec))
    assert back.n == spec.n
    assert np.array_equal(back.coeffs, spec.coeffs)


def test_spectrum_parseval_invariant_documented():
    spec = Spectrum(2, np.array([0.5, 0.5, 0.5, 0.5]))
    assert np.sum(spec.coeffs**2) == pytest.approx(1.0)
