import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from locconc.approx import circuit_projector_locality, circuit_projectors, projector_product_approx
from locconc.conc import clustering_check, energy_dist, hamming_dist, restricted_norm, tail_check, weight_band_clustering
from locconc.errors import InvalidInputError
from locconc.models import gen_pure_spin, to_pauli
from locconc.pauli import LocalityCertificate, PauliOperator, decompose, support_truncate
from locconc.sim import StateVector, basis_state, plus_state, random_brickwork, run_circuit


def random_state(n, rng):
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return StateVector.from_amps(v / np.linalg.norm(v))


def brute_weights(s):
    out = np.zeros(s.n + 1)
    for x, p in enumerate(s.probs):
        out[bin(x).count("1")] += p
    return out


def test_hamming_examples():
    d = hamming_dist(basis_state(5))
    assert d.median == 0 and d.probs[0] == pytest.approx(1)
    d = hamming_dist(plus_state(2))
    assert np.allclose(d.probs, [0.25, 0.5, 0.25]) and d.median == 1


@given(st.integers(1, 8), st.integers(0, 10**6))
def test_hamming_distribution_properties(n, seed):
    s = random_state(n, np.random.default_rng(seed))
    d = hamming_dist(s)
    assert np.allclose(d.probs, brute_weights(s), atol=1e-14)
    assert d.probs.sum() == pytest.approx(1, abs=1e-10)
    assert d.probs[: d.median + 1].sum() >= 0.5 - 1e-12
    assert d.probs[d.median :].sum() >= 0.5 - 1e-12
    assert np.allclose(hamming_dist(s.flipped()).probs, d.probs[::-1], atol=1e-14)


def test_median_on_exact_half():
    s = StateVector.from_amps(np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert hamming_dist(s).median == 0


def test_tail_examples():
    s = plus_state(2)
    cert = support_truncate(decompose(s.density()), 1)
    assert cert.k == 1 and cert.eps == pytest.approx(0.25)
    v = tail_check(s, cert)
    assert v.upper_tail == 0 and v.bound == pytest.approx(0.25) and v.passed
    v = tail_check(random_state(4, np.random.default_rng(3)), LocalityCertificate(4, 0.0))
    assert v.upper_tail == 0 and v.lower_tail == 0 and v.passed


def test_tail_after_depth_one_circuit():
    c = random_brickwork(8, 1, 11)
    cert = projector_product_approx(circuit_projectors(c), 2, 3, 6, ell=circuit_projector_locality(c))
    state, _ = run_circuit(c, basis_state(8))
    assert tail_check(state, cert).passed


def test_tail_dimension_mismatch():
    cert = support_truncate(decompose(plus_state(2).density()), 1)
    with pytest.raises(InvalidInputError):
        tail_check(plus_state(3), cert)


@given(st.integers(2, 6), st.integers(0, 10**6), st.data())
def test_tail_holds_for_truncation_certificates(n, seed, data):
    s = random_state(n, np.random.default_rng(seed))
    k = data.draw(st.integers(0, n))
    cert = support_truncate(decompose(s.density()), k)
    assert tail_check(s, cert).passed


def test_clustering_examples():
    n = 6
    v = clustering_check(basis_state(n), [0], [(1 << n) - 1], LocalityCertificate(3, 0.0))
    assert (v.weight_s, v.weight_t) == (1.0, 0.0)
    ghz = StateVector.from_amps(np.eye(1 << n)[0] / math.sqrt(2) + np.eye(1 << n)[-1] / math.sqrt(2))
    with pytest.raises(InvalidInputError):
        clustering_check(ghz, [0], [(1 << n) - 1], LocalityCertificate(n, 1.0))
    s = plus_state(n)
    cert = support_truncate(decompose(s.density()), 3)
    v = clustering_check(s, [0], [(1 << n) - 1], cert)
    assert v.product <= cert.eps and v.passed and v.product_passed


@given(st.integers(3, 6), st.integers(0, 10**6), st.data())
def test_clustering_product_bound(n, seed, data):
    s = random_state(n, np.random.default_rng(seed))
    k = data.draw(st.integers(0, n - 2))
    cert = support_truncate(decompose(s.density()), k)
    for v in weight_band_clustering(s, cert):
        assert v.product_passed and v.passed


def test_energy_zero_operator():
    e = energy_dist(plus_state(4), PauliOperator.zero(4), 0.0, 1.0, pairs=16)
    assert list(e.energies) == [0.0] and e.probs[0] == pytest.approx(1)


def test_energy_of_field_is_weight_pushforward():
    n = 6
    g = PauliOperator.from_terms(n, {"I" * i + "Z" + "I" * (n - 1 - i): 1.0 for i in range(n)})
    s = random_state(n, np.random.default_rng(5))
    e = energy_dist(s, g, 0.0, 1.0, pairs=64)
    w = hamming_dist(s)
    push = {float(n - 2 * k): p for k, p in enumerate(w.probs)}
    assert dict(zip(e.energies.tolist(), e.probs.tolist())) == pytest.approx(push, abs=1e-14)
    assert e.subset_violations == 0 and e.max_pair_ratio <= 1 + 1e-12
    assert e.median == n - 2 * hamming_dist(s).median or e.probs[e.energies <= e.median].sum() >= 0.5 - 1e-12


def test_energy_step_on_spin_instance():
    inst = gen_pure_spin(8, 4, 2)
    g = to_pauli(inst)
    e = energy_dist(plus_state(8), g, 0.5, math.sqrt(6), pairs=200, seed=1)
    assert e.max_pair_ratio <= 1 + 1e-12


def test_restricted_norm_matches_enumeration():
    inst = gen_pure_spin(6, 3, 4)
    g = to_pauli(inst)
    diag = np.zeros(64)
    for zmask, c in zip(g.zs, g.coeffs.real):
        diag += c * np.array([(-1) ** bin(x & int(zmask)).count("1") for x in range(64)])
    for smask in [1, 5, 0b110000, 63]:
        part = {int(z): c for z, c in zip(g.zs, g.coeffs.real) if int(z) & smask}
        vals = [sum(c * (-1) ** bin(x & z).count("1") for z, c in part.items()) for x in range(64)]
        assert restricted_norm(g, smask) == pytest.approx(max(map(abs, vals)) if vals else 0.0, abs=1e-12)


def test_energy_rejects_offdiagonal():
    with pytest.raises(InvalidInputError):
        energy_dist(plus_state(2), PauliOperator.from_terms(2, {"XI": 1.0}), 0.0, 1.0)


def test_csv_headers():
    assert hamming_dist(plus_state(1)).to_csv().splitlines()[0] == "w,prob"
    e = energy_dist(plus_state(2), PauliOperator.zero(2), 0.0, 1.0, pairs=4)
    assert e.to_csv().splitlines()[0] == "energy,prob"
