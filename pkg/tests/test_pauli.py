import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_hermitian
from locconc.errors import InvalidInputError
from locconc.pauli import (
    PauliOperator,
    PauliString,
    decompose,
    group_by_support,
    op_norm,
    reconstruct,
    subset_restrict,
    support_truncate,
    tln,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)
FACTORS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_label(label):
    """Dense matrix of a Pauli label by explicit Kronecker products, qubit 0 leftmost."""
    out = np.ones((1, 1), dtype=complex)
    for ch in label:
        out = np.kron(out, FACTORS[ch])
    return out


def brute_coefficients(m):
    """2^-n tr(P M) over all 4^n labels, straight from the definition."""
    n = int(np.log2(m.shape[0]))
    out = {}
    for code in range(4**n):
        label = "".join("IXYZ"[(code >> (2 * (n - 1 - j))) & 3] for j in range(n))
        c = np.trace(kron_label(label) @ m) / m.shape[0]
        if abs(c) > 1e-13:
            out[label] = c
    return out


def test_string_masks_and_label():
    p = PauliString.from_label("XYZI")
    assert p.label == "XYZI"
    assert p.support == frozenset({0, 1, 2})
    assert p.weight == 3


def test_y_is_hermitian_standard_matrix():
    op = PauliOperator.from_terms(1, {"Y": 1.0})
    assert np.allclose(op.to_dense(), Y)


def test_decompose_examples():
    assert decompose(np.eye(4)).terms == {PauliString.from_label("II"): 1.0}
    assert decompose(np.kron(Z, I2)).terms == {PauliString.from_label("ZI"): 1.0}
    plus = np.full((2, 2), 0.5)
    op = decompose(np.kron(plus, plus))
    assert {p.label: c for p, c in op.terms.items()} == pytest.approx({"II": 0.25, "XI": 0.25, "IX": 0.25, "XX": 0.25})


def test_decompose_matches_trace_definition(rng):
    m = random_hermitian(3, rng)
    fast = {p.label: c for p, c in decompose(m).terms.items()}
    slow = brute_coefficients(m)
    assert fast.keys() == slow.keys()
    for k in slow:
        assert fast[k] == pytest.approx(slow[k], abs=1e-12)
        assert abs(fast[k].imag) < 1e-12


def test_decompose_rejects_bad_dimension():
    with pytest.raises(InvalidInputError):
        decompose(np.eye(3))


def test_reconstruct_examples():
    assert np.all(reconstruct(PauliOperator.zero(2)) == 0)
    assert np.allclose(reconstruct(PauliOperator.identity(2)), np.eye(4))


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_roundtrip(n, seed):
    m = random_hermitian(n, np.random.default_rng(seed))
    assert np.allclose(reconstruct(decompose(m)), m, atol=1e-10)
    op = decompose(m)
    assert decompose(reconstruct(op)).allclose(op)


def test_roundtrip_non_hermitian(rng):
    m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    assert np.allclose(reconstruct(decompose(m)), m, atol=1e-12)


def test_purge_small_coefficients():
    op = PauliOperator.from_terms(2, {"XX": 1e-16, "ZZ": 1.0})
    assert op.num_terms == 1


def test_text_roundtrip():
    op = PauliOperator.from_terms(3, {"XYZ": 0.5 - 0.25j, "IIZ": 1.0})
    back = PauliOperator.from_text(op.to_text())
    assert back == op
    assert op.to_text().splitlines()[0].split()[0] in ("IIZ", "XYZ")


def test_truncate_examples():
    plus = np.full((2, 2), 0.5)
    op = decompose(np.kron(plus, plus))
    cert = support_truncate(op, 1)
    assert {p.label for p in cert.witness.terms} == {"II", "XI", "IX"}
    assert cert.eps == pytest.approx(0.25)
    assert support_truncate(op, 2).eps == 0.0
    traceless = PauliOperator.from_terms(2, {"XZ": 0.7, "ZI": 0.2})
    c0 = support_truncate(traceless, 0)
    assert c0.witness.num_terms == 0
    assert c0.eps == pytest.approx(op_norm(traceless.to_dense()))


@given(st.integers(0, 2**32 - 1))
def test_truncation_properties(seed):
    rng = np.random.default_rng(seed)
    n = 4
    op = decompose(random_hermitian(n, rng))
    eps = [support_truncate(op, k).eps for k in range(n + 1)]
    assert eps[-1] == 0.0
    for k in range(n + 1):
        cert = support_truncate(op, k)
        assert cert.witness.locality <= k
        again = support_truncate(cert.witness, k)
        assert again.witness == cert.witness and again.eps == 0.0
        assert cert.eps == pytest.approx(op_norm(op.to_dense() - cert.witness.to_dense()), abs=1e-10)


def test_truncation_error_not_monotone_in_k():
    # the remainder after dropping weight > 0 can have smaller norm than after dropping weight > 1
    rng = np.random.default_rng(0)
    found = False
    for _ in range(200):
        op = decompose(random_hermitian(3, rng))
        eps = [support_truncate(op, k).eps for k in range(4)]
        found |= any(eps[k + 1] > eps[k] + 1e-9 for k in range(3))
    assert found


def test_subset_restrict_examples():
    zz12 = PauliOperator.from_terms(4, {"ZZII": 1.0})
    zz34 = PauliOperator.from_terms(4, {"IIZZ": 1.0})
    terms = [((0, 1), zz12), ((2, 3), zz34)]
    assert subset_restrict(terms, []).num_terms == 0
    assert subset_restrict(terms, range(4)) == zz12 + zz34
    assert subset_restrict(terms, [0]) == zz12


@given(st.integers(0, 2**32 - 1), st.integers(0, 31), st.integers(0, 31))
def test_subset_restrict_monotone_and_additive(seed, a, b):
    rng = np.random.default_rng(seed)
    n = 5
    terms = []
    for _ in range(6):
        sup = sorted(rng.choice(n, size=int(rng.integers(1, 3)), replace=False).tolist())
        label = ["I"] * n
        for q in sup:
            label[q] = "XYZ"[rng.integers(3)]
        terms.append((sup, PauliOperator.from_terms(n, {"".join(label): rng.standard_normal()})))
    S = [i for i in range(n) if a >> i & 1]
    T = [i for i in range(n) if (a | b) >> i & 1]
    small = {id(t) for t in terms if set(t[0]) & set(S)}
    big = {id(t) for t in terms if set(t[0]) & set(T)}
    assert small <= big
    half = len(terms) // 2
    whole = subset_restrict(terms, S, n=n)
    parts = subset_restrict(terms[:half], S, n=n) + subset_restrict(terms[half:], S, n=n)
    assert whole.allclose(parts)


def test_group_examples():
    op = PauliOperator.from_terms(2, {"ZI": 1.0, "IZ": 1.0, "ZZ": 1.0})
    groups = group_by_support(op)
    assert {g.support for g in groups} == {frozenset({0}), frozenset({1}), frozenset({0, 1})}
    assert all(g.norm == pytest.approx(1.0) for g in groups)
    ident = group_by_support(PauliOperator.identity(3))
    assert len(ident) == 1 and ident[0].support == frozenset()


@given(st.integers(0, 2**32 - 1))
def test_group_norm_bound(seed):
    op = decompose(random_hermitian(3, np.random.default_rng(seed)))
    total = op_norm(op.to_dense())
    groups = group_by_support(op)
    assert sum(g.op.num_terms for g in groups) == op.num_terms
    for g in groups:
        assert g.norm <= 2 ** len(g.support) * total + 1e-10


def test_tln_examples():
    n = 4
    plus = np.full((2, 2), 0.5)
    local = []
    for i in range(n):
        m = np.kron(np.kron(np.eye(1 << i), plus), np.eye(1 << (n - 1 - i))) / n
        local.append(m)
    assert tln(local) == pytest.approx(1.0)
    assert tln([0.5]) == 0.5
    squares = [a @ b for a in local for b in local]
    assert len(squares) == 16
    assert tln(squares) <= 1.0 + 1e-12


def test_operator_norm_routes_agree(rng):
    m = random_hermitian(4, rng)
    op = decompose(m)
    assert op.norm() == pytest.approx(np.linalg.norm(m, 2), rel=1e-10)
    diag = PauliOperator.from_terms(3, {"ZZI": 0.5, "IZZ": -0.25, "ZII": 1.0})
    assert diag.norm() == pytest.approx(np.linalg.norm(diag.to_dense(), 2))
