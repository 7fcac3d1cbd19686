import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from locconc.errors import InvalidInputError
from locconc.experiments import LINE_POINTS
from locconc.models import gen_pure_spin
from locconc.ogp import (
    GoodSet,
    cluster_partition,
    cluster_weights,
    good_set,
    ogp_scan,
    optimiser_check,
    planted_cost,
    planted_mu,
    report_text,
)
from locconc.sim import QaoaSchedule, StateVector, basis_state, plus_state, run_qaoa


def gs(n, members):
    return GoodSet(n, 0.0, np.array(sorted(members), dtype=np.int64))


def ghz(n):
    a = np.zeros(1 << n, dtype=complex)
    a[0] = a[-1] = 1 / math.sqrt(2)
    return StateVector(n, a)


def brute_overlaps(n, members):
    """Overlaps straight from the spin inner product, no Hamming shortcut."""
    vecs = {x: [1 - 2 * ((x >> (n - 1 - i)) & 1) for i in range(n)] for x in members}
    return {abs(sum(a * b for a, b in zip(vecs[x], vecs[y]))) / n for x in members for y in members}


def brute_holds(values, nu1, nu2):
    return all(v <= nu1 + 1e-12 or v >= nu2 - 1e-12 for v in values)


def test_good_set_examples():
    n = 6
    avg_sq = lambda z: (z.sum(axis=1) / n) ** 2
    assert list(good_set(avg_sq, 1.0, n).members) == [0, 63]
    assert len(good_set(avg_sq, 1.5, n)) == 0
    assert len(good_set(avg_sq, -math.inf, n)) == 64
    g = good_set(avg_sq, 1.0, n)
    assert 0 in g and 1 not in g


def test_good_set_from_instance():
    inst = gen_pure_spin(8, 2, 3)
    mu = float(np.quantile(inst.cost_diag, 0.9))
    g = good_set(inst, mu)
    assert all((inst.cost_diag[x] >= mu) == (x in g) for x in range(256))


def test_scan_examples():
    rep = ogp_scan(gs(6, [0, 63]))
    assert rep.overlap_values == (1.0,)
    assert rep.holds(0.1, 0.9) and rep.holds(0.0, 1.0)
    rep = ogp_scan(gs(4, range(16)))
    assert rep.overlap_values == (0.0, 0.5, 1.0)
    # no attained overlap lies inside (0.1, 0.4), so the gap holds there; (0.1, 0.6) contains 1/2
    assert rep.holds(0.1, 0.4)
    assert not rep.holds(0.1, 0.6)
    assert ogp_scan(gs(5, [7])).overlap_values == (1.0,)


@given(st.integers(2, 7), st.integers(0, 10**6), st.floats(0, 1), st.floats(0, 1))
def test_scan_agrees_with_pairwise_recheck(n, seed, a, b):
    rng = np.random.default_rng(seed)
    members = sorted(set(rng.integers(0, 1 << n, size=rng.integers(1, 12)).tolist()))
    rep = ogp_scan(gs(n, members))
    ref = brute_overlaps(n, members)
    assert list(rep.overlap_values) == pytest.approx(sorted(ref), abs=1e-15)
    nu1, nu2 = min(a, b), max(a, b)
    assert rep.holds(nu1, nu2) == brute_holds(ref, nu1, nu2)
    lo, hi = rep.best_gap
    assert rep.holds(lo, hi)


def test_sampled_scan_is_marked():
    rep = ogp_scan(gs(10, range(1024)), cap=1000)
    assert not rep.exhaustive and rep.pairs_checked == 1000


def test_partition_examples():
    part = cluster_partition(gs(6, [0, 63]), 0.1, 0.9)
    assert (part.nu1_t, part.nu2_t) == pytest.approx((0.05, 0.45))
    assert part.valid and [list(c) for c in part.clusters] == [[0], [63]]
    single = cluster_partition(gs(6, [5]), 0.1, 0.9)
    assert single.valid and len(single.clusters) == 1
    line = cluster_partition(gs(10, LINE_POINTS), 0.1, 0.6)
    assert not line.valid


def test_partition_precondition():
    with pytest.raises(InvalidInputError):
        cluster_partition(gs(6, [0, 63]), 0.5, 0.6)


@given(st.integers(4, 9), st.integers(0, 3), st.data())
def test_valid_partition_satisfies_both_conditions(n, r, data):
    r = min(r, n // 2 - 1) if n >= 4 else 0
    g = good_set(planted_cost(n), planted_mu(n, r))
    nu1 = data.draw(st.floats(0.0, 0.3))
    nu2 = data.draw(st.floats(0.7, 1.0))
    part = cluster_partition(g, nu1, nu2)
    if not part.valid:
        return
    label = part.label_of()
    for x, y in itertools.combinations(g.members.tolist(), 2):
        d = bin(x ^ y).count("1")
        if label[x] == label[y]:
            assert d <= part.nu1_t * n + 1e-12
        else:
            assert d >= part.nu2_t * n - 1e-12


def test_weights_examples():
    n = 6
    part = cluster_partition(gs(n, [0, 63]), 0.1, 0.9)
    w = cluster_weights(ghz(n), part)
    assert np.allclose(w.weights, [0.5, 0.5]) and w.flip_pairs == [(0, 1)] and w.max_flip_residual < 1e-15
    w = cluster_weights(basis_state(n), part, eps=0.01)
    assert np.allclose(w.weights, [1, 0]) and w.dominant == 0 and w.dominant_ok


def test_flip_symmetric_qaoa_weights():
    n = 10
    inst = gen_pure_spin(n, 4, 7)
    state = run_qaoa(inst, QaoaSchedule.random(2, 1))
    g = good_set(planted_cost(n), planted_mu(n, 1))
    part = cluster_partition(g, 0.1, 0.6)
    assert part.valid and len(part.clusters) == 2
    w = cluster_weights(state, part)
    assert w.max_flip_residual <= 1e-10


@given(st.integers(4, 8), st.integers(0, 10**6))
def test_flip_symmetric_state_weights(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    a = a + a[::-1]
    s = StateVector.from_amps(a / np.linalg.norm(a))
    part = cluster_partition(good_set(planted_cost(n), planted_mu(n, 1)), 0.1, 0.6)
    assert cluster_weights(s, part).max_flip_residual <= 1e-10


def test_optimiser_examples():
    n = 6
    cost = planted_cost(n)
    v = optimiser_check(basis_state(n, 0), cost, 1.0, delta=0.0)
    assert v.delta == 0 and v.is_optimiser
    v = optimiser_check(plus_state(n), cost, planted_mu(n, 1))
    assert v.delta == pytest.approx(1 - len(good_set(cost, planted_mu(n, 1))) / 64)
    assert optimiser_check(plus_state(n), cost, -1.0).delta == 0


@given(st.integers(2, 8), st.integers(0, 10**6), st.floats(-0.1, 1.1))
def test_optimiser_mass_identity(n, seed, mu):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(1 << n)
    s = StateVector.from_amps(a / np.linalg.norm(a))
    v = optimiser_check(s, planted_cost(n), mu)
    assert v.delta + v.good_mass == 1.0


def test_report_text_lists_clusters():
    g = gs(6, [0, 63])
    part = cluster_partition(g, 0.1, 0.9)
    text = report_text(ogp_scan(g), part, cluster_weights(ghz(6), part))
    assert "cluster.0 000000" in text and "cluster.1 111111" in text and "valid 1" in text
