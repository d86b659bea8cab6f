import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import ewb
from ewb import (
    ErasureModel,
    Frame,
    bruteforce_moment,
    bruteforce_table,
    expected_moment,
    gram,
    harmonic_etf,
    moment_polynomial,
    montecarlo_moment,
    random_frame,
    repeated_onb,
    simplex_etf,
    subset_rms,
    trace_moment,
)


def identity_frame(n):
    return Frame(field="real", entries=np.eye(n))


def test_erasure_model_validates_p():
    with pytest.raises(ValueError):
        ErasureModel(p=1.5)
    with pytest.raises(ValueError):
        ErasureModel(p=-0.1)


def test_trace_moment_identity_frame():
    f = identity_frame(4)
    for d in (1, 2, 3, 5):
        assert_allclose(trace_moment(f, d), 1.0, atol=1e-14)
    with pytest.raises(ValueError):
        trace_moment(f, 0)


def test_trace_moment_repeated_onb():
    # FF' = 2I at m=2, n=4: (1/n) tr((FF')^d) = (2^d * 2)/4
    f = repeated_onb(2, 2)
    for d in (1, 2, 3, 4):
        assert_allclose(trace_moment(f, d), 2.0**d / 2.0, atol=1e-12)


def test_polynomial_mercedes_benz_d2(mercedes_benz):
    poly = moment_polynomial(mercedes_benz, 2)
    assert_allclose(poly.coeffs, [1.0, 0.5], atol=1e-12)


def test_polynomial_identity_frame_all_orders():
    f = identity_frame(5)
    for d in (1, 2, 3, 4):
        poly = moment_polynomial(f, d)
        assert poly.coeffs[0] == 1.0
        assert_allclose(poly.coeffs[1:], 0.0, atol=1e-13)
        # m_d = p for an orthonormal basis
        assert_allclose(poly.evaluate(0.37), 0.37, atol=1e-13)


def test_polynomial_leading_coefficient_is_one():
    for seed in range(5):
        f = random_frame(3, 7, "complex", seed=seed)
        for d in (1, 2, 3, 4):
            assert moment_polynomial(f, d).coeffs[0] == 1.0


def test_polynomial_repeated_onb_d4_quartic_pair_sum():
    # four ordered duplicate pairs with |c|^4 = 1 give S4 = 1, so
    # a_{4,2} = 6 a_{2,2} + S4 = 7
    poly = moment_polynomial(repeated_onb(2, 2), 4)
    assert_allclose(poly.coeffs[1], 7.0, atol=1e-12)
    table = bruteforce_table(repeated_onb(2, 2), d_max=4)
    for p in (0.2, 0.5, 0.9):
        assert_allclose(poly.evaluate(p), table.moment(p, 4), atol=1e-12)


def test_polynomial_rejects_high_order():
    with pytest.raises(ValueError):
        moment_polynomial(identity_frame(3), 5)
    with pytest.raises(ValueError):
        moment_polynomial(identity_frame(3), 0)


def test_polynomial_at_one_matches_trace_moment():
    for seed in range(4):
        f = random_frame(4, 9, "real", seed=seed)
        for d in (1, 2, 3, 4):
            assert abs(moment_polynomial(f, d).evaluate(1.0) - trace_moment(f, d)) <= 1e-9


def test_expected_moment_first_order_is_p():
    for f in (identity_frame(3), simplex_etf(4), random_frame(2, 6, "real", seed=8)):
        for p in (0.0, 0.25, 0.8, 1.0):
            assert_allclose(expected_moment(f, p, 1), p, atol=1e-15)


def test_expected_moment_examples(mercedes_benz):
    assert expected_moment(mercedes_benz, 0.0, 3) == 0.0
    assert_allclose(expected_moment(mercedes_benz, 0.5, 2), 0.625, atol=1e-12)
    with pytest.raises(ValueError):
        expected_moment(mercedes_benz, 1.2, 2)


def test_bruteforce_identity_frame_is_p():
    f = identity_frame(3)
    for p in (0.0, 0.3, 1.0):
        assert_allclose(bruteforce_moment(f, p, 2), p, atol=1e-14)


def test_bruteforce_mercedes_benz_values(mercedes_benz):
    assert_allclose(bruteforce_moment(mercedes_benz, 0.5, 2), 0.625, atol=1e-14)
    assert_allclose(bruteforce_moment(mercedes_benz, 0.5, 3), 0.84375, atol=1e-14)


def test_bruteforce_rejects_large_n():
    with pytest.raises(ValueError, match="n <= 24"):
        bruteforce_table(random_frame(2, 25, "real", seed=0))


def test_bruteforce_table_matches_single_calls(mercedes_benz):
    table = bruteforce_table(mercedes_benz, d_max=4)
    for p in (0.1, 0.6):
        for d in (1, 2, 3, 4):
            assert bruteforce_moment(mercedes_benz, p, d) == table.moment(p, d)


def test_bruteforce_chunking_invariance(mercedes_benz):
    f = random_frame(3, 8, "complex", seed=21)
    a = bruteforce_table(f, d_max=4, chunk=8192).subset_sums
    b = bruteforce_table(f, d_max=4, chunk=7).subset_sums
    assert_allclose(a, b, rtol=0, atol=1e-12)


def test_oracle_equivalence_small_grid(mercedes_benz):
    frames = [
        mercedes_benz,
        identity_frame(4),
        simplex_etf(3),
        harmonic_etf(7),
        repeated_onb(2, 2),
        random_frame(3, 6, "real", seed=5),
        random_frame(2, 5, "complex", seed=6),
    ]
    for f in frames:
        table = bruteforce_table(f, d_max=4)
        for d in (1, 2, 3, 4):
            poly = moment_polynomial(f, d)
            for p in (0.0, 0.3, 0.7, 1.0):
                assert abs(poly.evaluate(p) - table.moment(p, d)) <= 1e-10


def test_montecarlo_p1_degenerate():
    # every trial keeps everything: value pins to the full-trace moment and
    # the spread is pure round-off
    f = simplex_etf(3)
    est = montecarlo_moment(f, ErasureModel(p=1.0, seed=0), 3, trials=64)
    assert est.stderr <= 1e-15
    assert_allclose(est.value, trace_moment(f, 3), atol=1e-12)


def test_montecarlo_p0_exactly_zero():
    est = montecarlo_moment(simplex_etf(3), ErasureModel(p=0.0, seed=0), 2, trials=32)
    assert est.value == 0.0 and est.stderr == 0.0


def test_montecarlo_matches_oracle(mercedes_benz):
    est = montecarlo_moment(mercedes_benz, ErasureModel(p=0.5, seed=123), 2, trials=100_000)
    assert est.trials == 100_000 and est.stderr > 0.0
    assert abs(est.value - 0.625) <= 3.0 * est.stderr


def test_montecarlo_deterministic_and_chunk_invariant(mercedes_benz):
    a = montecarlo_moment(mercedes_benz, ErasureModel(p=0.4, seed=9), 4, trials=500)
    b = montecarlo_moment(mercedes_benz, ErasureModel(p=0.4, seed=9), 4, trials=500)
    assert (a.value, a.stderr) == (b.value, b.stderr)
    c = montecarlo_moment(mercedes_benz, ErasureModel(p=0.4, seed=9), 4, trials=500, chunk=17)
    assert_allclose([a.value, a.stderr], [c.value, c.stderr], rtol=1e-12, atol=0)


def test_montecarlo_validation(mercedes_benz):
    with pytest.raises(ValueError):
        montecarlo_moment(mercedes_benz, ErasureModel(p=0.4), 2, trials=0)
    with pytest.raises(ValueError):
        montecarlo_moment(mercedes_benz, ErasureModel(p=0.4), 0, trials=10)


def test_subset_rms_reduces_to_coherence_at_p1(mercedes_benz):
    for f in (mercedes_benz, random_frame(3, 8, "real", seed=2)):
        assert abs(subset_rms(f, 1.0) - ewb.coherence(f).rms_sq) <= 1e-12


def test_subset_rms_mercedes_benz(mercedes_benz):
    assert_allclose(subset_rms(mercedes_benz, 2.0 / 3.0), 1.0 / 3.0, atol=1e-12)


def test_subset_rms_identity_is_zero():
    assert_allclose(subset_rms(identity_frame(5), 0.6), 0.0, atol=1e-13)


def test_subset_rms_rejects_small_subsets(mercedes_benz):
    with pytest.raises(ValueError):
        subset_rms(mercedes_benz, 1.0 / 3.0)  # k = 1


@settings(max_examples=30, deadline=None)
@given(
    m=st.integers(min_value=2, max_value=4),
    extra=st.integers(min_value=1, max_value=5),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_property_jensen_pair_inequalities(m, extra, seed):
    # the two averaging inequalities behind the order-4 coefficient bound
    f = random_frame(m, m + extra, "real", seed=seed)
    n = f.n
    sq = np.abs(gram(f).entries) ** 2
    np.fill_diagonal(sq, 0.0)
    a22 = sq.sum() / n
    s4 = (sq**2).sum() / n
    q = (sq.sum(axis=1) ** 2).sum() / n
    assert s4 >= a22**2 / (n - 1) - 1e-12
    assert q >= a22**2 - 1e-12
