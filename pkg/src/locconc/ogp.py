"""Brute-force overlap-gap analysis on small instances.

Strings are basis indices; qubit i is bit n-1-i and spin z_i = (-1)^{x_i}.
Overlaps are |<z1, z2>| / n = |n - 2 d(x1, x2)| / n, self-pairs included.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from locconc.config import MAX_ENUMERATION_QUBITS, MAX_OGP_PAIRS
from locconc.errors import InvalidInputError, ResourceLimitError
from locconc.models import SpinInstance
from locconc.pauli import popcount
from locconc.sim import StateVector

GAP_TOL = 1e-12


def spins(n: int) -> np.ndarray:
    """All 2^n spin vectors, row x holding (-1)^{x_i}."""
    bits = (np.arange(1 << n)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return 1 - 2 * bits


def cost_values(source, n: int | None = None) -> np.ndarray:
    """Cost on every basis index from an instance, a vectorised callable on spins, or an array."""
    if isinstance(source, SpinInstance):
        return source.cost_diag
    if callable(source):
        if n is None:
            raise InvalidInputError("n is required with a cost callable")
        if n > MAX_ENUMERATION_QUBITS:
            raise ResourceLimitError(f"enumeration capped at n <= {MAX_ENUMERATION_QUBITS}")
        return np.asarray(source(spins(n)), dtype=float)
    vals = np.asarray(source, dtype=float)
    if vals.ndim != 1 or vals.size & (vals.size - 1):
        raise InvalidInputError("cost array length must be a power of two")
    return vals


def _n_of(values: np.ndarray) -> int:
    return int(values.size).bit_length() - 1


@dataclass(frozen=True, eq=False)
class GoodSet:
    n: int
    mu: float
    members: np.ndarray

    def __len__(self) -> int:
        return int(self.members.size)

    def __contains__(self, x: int) -> bool:
        i = np.searchsorted(self.members, x)
        return bool(i < self.members.size and self.members[i] == x)


def good_set(source: SpinInstance | Callable | np.ndarray, mu: float, n: int | None = None) -> GoodSet:
    vals = cost_values(source, n)
    nn = _n_of(vals)
    if nn > MAX_ENUMERATION_QUBITS:
        raise ResourceLimitError(f"enumeration capped at n <= {MAX_ENUMERATION_QUBITS}")
    return GoodSet(nn, float(mu), np.flatnonzero(vals >= mu).astype(np.int64))


def planted_cost(n: int, center: int = 0) -> np.ndarray:
    """|<z, z*>| / n: two antipodal optima, and good sets made of Hamming balls."""
    d = popcount(np.arange(1 << n) ^ center)
    return np.abs(n - 2 * d) / n


def planted_mu(n: int, radius: int) -> float:
    """Threshold whose good set is the two radius-r balls around z* and its flip."""
    return (n - 2 * radius) / n


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OgpReport:
    n: int
    mu: float
    size: int
    overlap_values: tuple[float, ...]
    exhaustive: bool
    pairs_checked: int

    def holds(self, nu1: float, nu2: float) -> bool:
        """True when no attained overlap lies strictly between nu1 and nu2."""
        return not any(nu1 + GAP_TOL < v < nu2 - GAP_TOL for v in self.overlap_values)

    @property
    def best_gap(self) -> tuple[float, float]:
        pts = sorted({0.0, 1.0, *self.overlap_values})
        widths = [(hi - lo, lo, hi) for lo, hi in zip(pts, pts[1:])]
        _, lo, hi = max(widths)
        return lo, hi


def pair_distances(members: np.ndarray, n: int, cap: int = MAX_OGP_PAIRS, seed: int = 0) -> tuple[np.ndarray, bool, int]:
    """Set of attained Hamming distances; random pairs when |G|^2 exceeds ``cap``."""
    m = members.size
    seen = np.zeros(n + 1, dtype=bool)
    if m == 0:
        return seen, True, 0
    if m * m <= cap:
        rows = max(1, (1 << 22) // m)
        for i in range(0, m, rows):
            d = popcount(members[i : i + rows, None] ^ members[None, :])
            seen[np.unique(d)] = True
        return seen, True, m * m
    rng = np.random.default_rng(seed)
    a = members[rng.integers(0, m, size=cap)]
    b = members[rng.integers(0, m, size=cap)]
    seen[np.unique(popcount(a ^ b))] = True
    seen[0] = True
    return seen, False, cap


def ogp_scan(G: GoodSet, cap: int = MAX_OGP_PAIRS, seed: int = 0) -> OgpReport:
    seen, exhaustive, count = pair_distances(G.members, G.n, cap, seed)
    n = G.n
    values = sorted({abs(n - 2 * int(d)) / n for d in np.flatnonzero(seen)})
    return OgpReport(n, G.mu, len(G), tuple(values), exhaustive, count)


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ClusterPartition:
    n: int
    nu1: float
    nu2: float
    nu1_t: float
    nu2_t: float
    clusters: list[np.ndarray]
    max_intra: int
    min_inter: int
    valid: bool

    def label_of(self) -> dict[int, int]:
        return {int(x): i for i, c in enumerate(self.clusters) for x in c}


def cluster_thresholds(nu1: float, nu2: float) -> tuple[float, float]:
    return (1 - nu2) / 2, (1 - nu1) / 2


def cluster_partition(G: GoodSet, nu1: float, nu2: float) -> ClusterPartition:
    """Connected components at Hamming distance <= (1 - nu2) n / 2, validated post hoc."""
    t1, t2 = cluster_thresholds(nu1, nu2)
    if not 2 * t1 < t2:
        raise InvalidInputError(f"clustering needs 2*{t1:g} < {t2:g}")
    m = len(G)
    if m * m > MAX_OGP_PAIRS:
        raise ResourceLimitError(f"partition needs |G|^2 <= {MAX_OGP_PAIRS} pairs")
    n = G.n
    if m == 0:
        return ClusterPartition(n, nu1, nu2, t1, t2, [], 0, n, True)
    d = popcount(G.members[:, None] ^ G.members[None, :])
    near = d <= t1 * n + GAP_TOL
    _, labels = connected_components(csr_matrix(near), directed=False)
    same = labels[:, None] == labels[None, :]
    max_intra = int(d[same].max())
    min_inter = int(d[~same].min()) if (~same).any() else n
    valid = max_intra <= t1 * n + GAP_TOL and min_inter >= t2 * n - GAP_TOL
    clusters = [G.members[labels == c] for c in range(labels.max() + 1)]
    clusters.sort(key=lambda c: int(c[0]))
    return ClusterPartition(n, nu1, nu2, t1, t2, clusters, max_intra, min_inter, bool(valid))


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ClusterWeights:
    weights: np.ndarray
    good_mass: float
    dominant: int | None
    dominant_ok: bool | None
    flip_pairs: list[tuple[int, int]]
    max_flip_residual: float


def cluster_weights(s: StateVector, part: ClusterPartition, eps: float | None = None, tol: float = 1e-12) -> ClusterWeights:
    """Measurement weight of each cluster and the bit-flip pairing between clusters.

    With ``eps`` given, ``dominant_ok`` says whether the heaviest cluster holds
    at least good_mass - sqrt(eps).
    """
    if s.n != part.n:
        raise InvalidInputError("state and partition act on different qubit counts")
    p = s.probs
    w = np.array([p[c].sum() for c in part.clusters])
    good = float(w.sum())
    dom = int(np.argmax(w)) if w.size else None
    ok = None
    if eps is not None and dom is not None:
        ok = bool(w[dom] >= good - math.sqrt(eps) - tol)
    full = (1 << part.n) - 1
    keys = {tuple(np.sort(c).tolist()): i for i, c in enumerate(part.clusters)}
    pairs = []
    resid = 0.0
    for i, c in enumerate(part.clusters):
        j = keys.get(tuple(np.sort(c ^ full).tolist()))
        if j is not None and i < j:
            pairs.append((i, j))
            resid = max(resid, abs(w[i] - w[j]))
    return ClusterWeights(w, good, dom, ok, pairs, resid)


@dataclass(frozen=True)
class OptimiserVerdict:
    mu: float
    delta: float
    good_mass: float
    is_optimiser: bool | None


def optimiser_check(s: StateVector, cost, mu: float, delta: float | None = None) -> OptimiserVerdict:
    """delta = 1 - Pr[C >= mu]; ``is_optimiser`` compares against a queried delta."""
    vals = cost_values(cost, s.n)
    if vals.size != 1 << s.n:
        raise InvalidInputError("cost and state act on different qubit counts")
    good = float(s.probs[vals >= mu].sum())
    d = 1.0 - good
    return OptimiserVerdict(mu, d, good, None if delta is None else d <= delta + 1e-12)


# ---------------------------------------------------------------------------


def _bits(x: int, n: int) -> str:
    return format(int(x), f"0{n}b")


def report_text(rep: OgpReport, part: ClusterPartition | None = None, weights: ClusterWeights | None = None) -> str:
    lo, hi = rep.best_gap
    lines = [
        f"n {rep.n}",
        f"mu {rep.mu!r}",
        f"good_size {rep.size}",
        f"exhaustive {int(rep.exhaustive)}",
        f"pairs_checked {rep.pairs_checked}",
        "overlaps " + " ".join(repr(v) for v in rep.overlap_values),
        f"best_gap {lo!r} {hi!r}",
    ]
    if part is not None:
        lines += [
            f"nu1 {part.nu1!r}",
            f"nu2 {part.nu2!r}",
            f"nu1_t {part.nu1_t!r}",
            f"nu2_t {part.nu2_t!r}",
            f"max_intra {part.max_intra}",
            f"min_inter {part.min_inter}",
            f"valid {int(part.valid)}",
            f"clusters {len(part.clusters)}",
        ]
        for i, c in enumerate(part.clusters):
            lines.append(f"cluster.{i} " + " ".join(_bits(x, part.n) for x in c))
    if weights is not None:
        lines.append(f"good_mass {weights.good_mass!r}")
        for i, w in enumerate(weights.weights):
            lines.append(f"weight.{i} {w!r}")
        lines.append(f"max_flip_residual {weights.max_flip_residual!r}")
    return "\n".join(lines) + "\n"
