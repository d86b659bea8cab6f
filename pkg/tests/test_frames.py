import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import ewb
from ewb import (
    Frame,
    coherence,
    gram,
    harmonic_etf,
    is_etf,
    is_utf,
    load_frame,
    nearest_utf,
    random_frame,
    repeated_onb,
    save_frame,
    simplex_etf,
    welch_floor,
)


def test_frame_rejects_non_unit_columns():
    with pytest.raises(ValueError, match="column norms"):
        Frame(field="real", entries=np.array([[1.0, 0.5], [0.0, 0.5]]))


def test_frame_rejects_bad_shape_and_field():
    with pytest.raises(ValueError):
        Frame(field="real", entries=np.eye(3)[:, :2])  # n < m
    with pytest.raises(ValueError):
        Frame(field="imaginary", entries=np.eye(2))
    with pytest.raises(ValueError):
        Frame(field="real", entries=np.eye(2).astype(complex))


def test_frame_entries_are_immutable():
    f = random_frame(2, 4, "real", seed=0)
    with pytest.raises(ValueError):
        f.entries[0, 0] = 7.0


def test_gram_identity_frame():
    g = gram(Frame(field="real", entries=np.eye(3)))
    assert np.array_equal(g.entries, np.eye(3))


def test_gram_mercedes_benz_offdiagonal(mercedes_benz):
    g = gram(mercedes_benz).entries
    off = g[~np.eye(3, dtype=bool)]
    assert_allclose(off, -0.5, atol=1e-12)


def test_gram_simplex_offdiagonal_magnitude():
    for m in (2, 3, 5):
        g = gram(simplex_etf(m)).entries
        off = np.abs(g[~np.eye(m + 1, dtype=bool)])
        assert_allclose(off, 1.0 / m, atol=1e-12)
        # |c|^2 equals the Welch floor at n = m + 1
        assert_allclose((1.0 / m) ** 2, welch_floor(m, m + 1), atol=1e-15)


def test_gram_is_exactly_hermitian_with_unit_diagonal():
    f = random_frame(3, 7, "complex", seed=11)
    g = gram(f).entries
    assert np.array_equal(g, g.conj().T)
    assert np.array_equal(np.diag(g), np.ones(7))


def test_coherence_identity_frame():
    rep = coherence(Frame(field="real", entries=np.eye(4)))
    assert rep.rms_sq == 0.0 and rep.max_sq == 0.0 and rep.welch_floor == 0.0


def test_coherence_mercedes_benz(mercedes_benz):
    rep = coherence(mercedes_benz)
    assert_allclose([rep.rms_sq, rep.max_sq, rep.welch_floor], 0.25, atol=1e-12)


def test_coherence_repeated_onb():
    rep = coherence(repeated_onb(2, 2))
    assert_allclose(rep.max_sq, 1.0, atol=1e-12)
    assert_allclose(rep.welch_floor, 1.0 / 3.0, atol=1e-15)


def test_coherence_needs_two_columns():
    with pytest.raises(ValueError):
        coherence(Frame(field="real", entries=np.ones((1, 1))))


def test_is_utf_examples():
    assert is_utf(Frame(field="real", entries=np.eye(3)))
    assert is_utf(repeated_onb(2, 2))
    assert not is_utf(random_frame(4, 8, "real", seed=1))
    with pytest.raises(ValueError):
        is_utf(repeated_onb(2, 2), tol=0.0)


def test_is_etf_examples(mercedes_benz):
    assert is_etf(mercedes_benz)
    assert not is_etf(repeated_onb(2, 2))
    assert is_etf(harmonic_etf(7))
    # n = m degenerates to "orthonormal basis"
    assert is_etf(Frame(field="real", entries=np.eye(3)))
    assert not is_etf(random_frame(3, 3, "real", seed=2))


def test_etf_implies_utf_and_floor_equality():
    for f in (simplex_etf(4), harmonic_etf(11)):
        assert is_etf(f) and is_utf(f)
        rep = coherence(f)
        assert abs(rep.max_sq - rep.welch_floor) <= 1e-8


def test_random_frame_scalar_case():
    r = random_frame(1, 1, "real", seed=3)
    assert_allclose(abs(r.entries[0, 0]), 1.0, atol=1e-12)
    c = random_frame(1, 1, "complex", seed=3)
    assert_allclose(abs(c.entries[0, 0]), 1.0, atol=1e-12)


def test_random_frame_deterministic():
    a = random_frame(4, 8, "real", seed=1)
    b = random_frame(4, 8, "real", seed=1)
    assert np.array_equal(a.entries, b.entries)
    assert not np.array_equal(a.entries, random_frame(4, 8, "real", seed=2).entries)


def test_random_frame_unit_norms():
    f = random_frame(4, 8, "complex", seed=5)
    assert_allclose(np.linalg.norm(f.entries, axis=0), 1.0, atol=1e-12)


def test_random_frame_validation():
    with pytest.raises(ValueError):
        random_frame(0, 3, "real", seed=0)
    with pytest.raises(ValueError):
        random_frame(4, 3, "real", seed=0)


def test_simplex_m1_is_antipodal_pair():
    f = simplex_etf(1)
    assert f.m == 1 and f.n == 2
    assert_allclose(np.sort(f.entries[0]), [-1.0, 1.0], atol=1e-12)
    assert_allclose(gram(f).entries[0, 1], -1.0, atol=1e-12)


def test_simplex_m2_matches_mercedes_benz_class():
    assert is_etf(simplex_etf(2))


def test_simplex_m5_floor():
    rep = coherence(simplex_etf(5))
    assert_allclose(rep.welch_floor, 1.0 / 25.0, atol=1e-15)
    assert_allclose(rep.max_sq, 1.0 / 25.0, atol=1e-12)


def test_harmonic_examples():
    f3 = harmonic_etf(3)
    assert (f3.m, f3.n) == (2, 3) and is_etf(f3)
    f7 = harmonic_etf(7)
    assert (f7.m, f7.n) == (4, 7)
    assert_allclose(coherence(f7).max_sq, 1.0 / 8.0, atol=1e-12)


@pytest.mark.parametrize("q", [5, 4, 9, 15, 21])
def test_harmonic_rejects_bad_q(q):
    # composite, even, 1 mod 4, or composite 3 mod 4
    with pytest.raises(ValueError):
        harmonic_etf(q)


def test_shipped_etf_families_classify_as_etf():
    for m in range(1, 65):
        assert is_etf(simplex_etf(m), tol=1e-8), f"simplex m={m}"
    for q in (3, 7, 11, 19, 23, 31, 43):
        assert is_etf(harmonic_etf(q), tol=1e-8), f"harmonic q={q}"


def test_nearest_utf_fixed_point():
    f = harmonic_etf(7)
    res = nearest_utf(f)
    assert res.converged and res.iterations == 0
    assert float(np.max(np.abs(res.frame.entries - f.entries))) <= 1e-12


def test_nearest_utf_random_converges():
    res = nearest_utf(random_frame(3, 6, "real", seed=7), tol=1e-9)
    assert res.converged and res.residual <= 1e-9
    assert is_utf(res.frame)
    assert_allclose(np.linalg.norm(res.frame.entries, axis=0), 1.0, atol=1e-12)


def test_nearest_utf_square_orthonormalizes():
    res = nearest_utf(random_frame(4, 4, "real", seed=9))
    e = res.frame.entries
    assert_allclose(e @ e.T, np.eye(4), atol=1e-9)


def test_nearest_utf_validation():
    f = random_frame(2, 4, "real", seed=0)
    with pytest.raises(ValueError):
        nearest_utf(f, max_iters=0)
    with pytest.raises(ValueError):
        nearest_utf(f, tol=0.0)


def test_json_roundtrip_real(tmp_path):
    f = random_frame(3, 6, "real", seed=13)
    path = tmp_path / "f.json"
    save_frame(f, path)
    g = load_frame(path)
    assert g.field == "real"
    assert np.array_equal(f.entries, g.entries)


def test_json_roundtrip_complex(tmp_path):
    f = harmonic_etf(11)
    path = tmp_path / "f.json"
    save_frame(f, path, extra={"construction": {"kind": "harmonic", "q": 11}})
    g = load_frame(path)
    assert g.field == "complex"
    assert np.array_equal(f.entries, g.entries)


def test_csv_import(tmp_path):
    f = random_frame(2, 5, "real", seed=4)
    path = tmp_path / "f.csv"
    np.savetxt(path, f.entries, delimiter=",", fmt="%.17g")
    g = load_frame(path)
    assert np.array_equal(f.entries, g.entries)


def test_load_rejects_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"field": "real", "m": 2, "n": 3, "data": [[1.0, 0.0]]}))
    with pytest.raises(ValueError):
        load_frame(path)
    path.write_text(json.dumps({"field": "octonion", "m": 1, "n": 1, "data": [[1.0]]}))
    with pytest.raises(ValueError):
        load_frame(path)


@settings(max_examples=40, deadline=None)
@given(
    m=st.integers(min_value=1, max_value=5),
    extra=st.integers(min_value=1, max_value=6),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    field=st.sampled_from(["real", "complex"]),
)
def test_property_rms_never_below_welch_floor(m, extra, seed, field):
    f = random_frame(m, m + extra, field, seed=seed)
    rep = coherence(f)
    assert rep.max_sq >= rep.rms_sq >= rep.welch_floor - 1e-12
    assert_allclose(np.linalg.norm(f.entries, axis=0), 1.0, atol=1e-10)
