"""Hamming-weight and energy distributions and the locality-to-concentration checks.

Median convention: the smallest value whose cumulative probability reaches
1/2.  Both one-sided mass conditions then hold exactly.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from locconc.errors import InvalidInputError
from locconc.pauli import LocalityCertificate, PauliOperator, _compress, fwht, popcount
from locconc.sim import StateVector

HALF_TOL = 1e-12


def _median_index(probs: np.ndarray) -> int:
    cdf = np.cumsum(probs)
    return int(np.searchsorted(cdf, 0.5 - HALF_TOL, side="left"))


@dataclass(frozen=True, eq=False)
class WeightDistribution:
    n: int
    probs: np.ndarray
    median: int

    def upper_tail(self, threshold: int) -> float:
        """Pr[W > threshold]."""
        lo = max(threshold + 1, 0)
        return float(self.probs[lo:].sum()) if lo <= self.n else 0.0

    def lower_tail(self, threshold: int) -> float:
        """Pr[W < threshold]."""
        hi = min(max(threshold, 0), self.n + 1)
        return float(self.probs[:hi].sum())

    def mass_at_most(self, w: int) -> float:
        return self.lower_tail(w + 1)

    def to_csv(self) -> str:
        rows = ["w,prob"] + [f"{w},{p!r}" for w, p in enumerate(self.probs)]
        return "\n".join(rows) + "\n"


def hamming_dist(s: StateVector) -> WeightDistribution:
    weights = popcount(np.arange(1 << s.n))
    probs = np.bincount(weights, weights=s.probs, minlength=s.n + 1)
    return WeightDistribution(s.n, probs, _median_index(probs))


@dataclass(frozen=True)
class TailVerdict:
    k: int
    eps: float
    median: int
    upper_tail: float
    lower_tail: float
    bound: float
    passed: bool


def tail_check(s: StateVector, cert: LocalityCertificate, tol: float = 1e-12) -> TailVerdict:
    """Compare both Hamming tails beyond median +- k against 4 eps^2."""
    if cert.witness is not None and cert.witness.n != s.n:
        raise InvalidInputError("certificate and state act on different qubit counts")
    if not 0 <= cert.k <= s.n:
        raise InvalidInputError("certificate locality outside [0, n]")
    wd = hamming_dist(s)
    up = wd.upper_tail(wd.median + cert.k)
    lo = wd.lower_tail(wd.median - cert.k)
    bound = 4 * cert.eps**2
    return TailVerdict(
        k=cert.k,
        eps=cert.eps,
        median=wd.median,
        upper_tail=up,
        lower_tail=lo,
        bound=bound,
        passed=up <= bound + tol and lo <= bound + tol,
    )


@dataclass(frozen=True)
class ClusteringVerdict:
    distance: int
    weight_s: float
    weight_t: float
    product: float
    eps: float
    passed: bool
    product_passed: bool


def _as_index_array(strings: Iterable[int]) -> np.ndarray:
    return np.unique(np.fromiter((int(x) for x in strings), dtype=np.int64))


def min_distance(a: np.ndarray, b: np.ndarray, chunk: int = 1 << 22) -> int:
    best = 64
    rows = max(1, chunk // max(b.size, 1))
    for i in range(0, a.size, rows):
        d = popcount(a[i : i + rows, None] ^ b[None, :])
        best = min(best, int(d.min(initial=64)))
    return best


def clustering_check(
    s: StateVector, S: Iterable[int], S_prime: Iterable[int], cert: LocalityCertificate, tol: float = 1e-12
) -> ClusteringVerdict:
    """Two string sets farther apart than k cannot both carry weight above sqrt(eps)."""
    a, b = _as_index_array(S), _as_index_array(S_prime)
    if a.size == 0 or b.size == 0:
        raise InvalidInputError("both string sets must be nonempty")
    dist = min_distance(a, b)
    if dist <= cert.k:
        raise InvalidInputError(f"sets are at Hamming distance {dist} <= k={cert.k}")
    p = s.probs
    ws, wt = float(p[a].sum()), float(p[b].sum())
    root = math.sqrt(cert.eps)
    return ClusteringVerdict(
        distance=dist,
        weight_s=ws,
        weight_t=wt,
        product=ws * wt,
        eps=cert.eps,
        passed=min(ws, wt) <= root + tol,
        product_passed=ws * wt <= cert.eps + tol,
    )


def weight_band_clustering(s: StateVector, cert: LocalityCertificate, tol: float = 1e-12) -> list[ClusteringVerdict]:
    """Clustering checks on every pair {|x| <= j} versus {|x| > j + k}."""
    wd = hamming_dist(s)
    out = []
    for j in range(s.n + 1):
        lo = wd.mass_at_most(j)
        hi = wd.upper_tail(j + cert.k)
        if j + cert.k + 1 > s.n:
            break
        prod = lo * hi
        out.append(
            ClusteringVerdict(
                distance=cert.k + 1,
                weight_s=lo,
                weight_t=hi,
                product=prod,
                eps=cert.eps,
                passed=min(lo, hi) <= math.sqrt(cert.eps) + tol,
                product_passed=prod <= cert.eps + tol,
            )
        )
    return out


# ---------------------------------------------------------------------------
# energies


def diagonal_values(G: PauliOperator) -> np.ndarray:
    if not G.is_diagonal():
        raise InvalidInputError("G must be diagonal in the computational basis")
    if np.any(np.abs(G.coeffs.imag) > 1e-12):
        raise InvalidInputError("G must be Hermitian")
    c = np.zeros(1 << G.n)
    np.add.at(c, G.zs, G.coeffs.real)
    return fwht(c)


def restricted_norm(G: PauliOperator, smask: int) -> float:
    """||G_S|| for a diagonal G, with S given as a qubit mask."""
    part = G.select((G.zs & smask) != 0)
    if part.num_terms == 0:
        return 0.0
    sup = part.support_mask
    c = np.zeros(1 << sup.bit_count())
    np.add.at(c, _compress(part.zs, sup, G.n), part.coeffs.real)
    return float(np.abs(fwht(c)).max())


def bin_values(values: np.ndarray, probs: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, kind="stable")
    v, p = values[order], probs[order]
    starts = np.concatenate(([True], np.diff(v) > tol))
    groups = np.cumsum(starts) - 1
    energies = v[starts]
    mass = np.bincount(groups, weights=p)
    return energies, mass


@dataclass(frozen=True, eq=False)
class EnergyDistribution:
    energies: np.ndarray
    probs: np.ndarray
    median: float
    pair_checks: int
    max_pair_ratio: float
    subset_violations: int
    radius: float | None
    tail_bound: float | None

    @property
    def vacuous(self) -> bool:
        return self.tail_bound is not None and self.tail_bound >= 1.0

    def tail_beyond(self, f: float) -> tuple[float, float]:
        up = float(self.probs[self.energies > self.median + f].sum())
        lo = float(self.probs[self.energies < self.median - f].sum())
        return up, lo

    def to_csv(self) -> str:
        rows = ["energy,prob"] + [f"{e!r},{p!r}" for e, p in zip(self.energies, self.probs)]
        return "\n".join(rows) + "\n"


def energy_dist(
    s: StateVector,
    G: PauliOperator,
    alpha_prime: float,
    D: float,
    *,
    p: int | None = None,
    alpha: float | None = None,
    c1: float | None = None,
    pairs: int = 256,
    seed: int = 0,
) -> EnergyDistribution:
    """Exact energy law of ``s`` under the diagonal G, plus the pairwise step check.

    For sampled string pairs x, y with difference set S the energy gap is
    compared against 2 ||G_S||, and ||G_S|| against D n^a' |S|^(1-a').  When
    ``p``, ``alpha`` and ``c1`` are given the energy radius and tail bound of
    the dense-evolution corollary are evaluated as well.
    """
    if G.n != s.n:
        raise InvalidInputError("G and state act on different qubit counts")
    n = s.n
    vals = diagonal_values(G)
    energies, mass = bin_values(vals, s.probs)
    med = float(energies[_median_index(mass)])
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, 1 << n, size=pairs)
    ys = rng.integers(0, 1 << n, size=pairs)
    worst = 0.0
    sub_bad = 0
    for x, y in zip(xs, ys):
        smask = int(x ^ y)
        if smask == 0:
            continue
        gs = restricted_norm(G, smask)
        gap = abs(vals[x] - vals[y])
        if gs > 0:
            worst = max(worst, gap / (2 * gs))
        elif gap > 1e-12:
            worst = math.inf
        if gs > D * n**alpha_prime * smask.bit_count() ** (1 - alpha_prime) * (1 + 1e-12):
            sub_bad += 1
    radius = tail = None
    if p is not None and alpha is not None and c1 is not None:
        radius = 2 * D * c1 ** (p * (1 - alpha_prime)) * n ** (1 - (1 - alpha) ** p * (1 - alpha_prime) / 4)
        tail = 128 * math.exp(-math.sqrt(2) * n ** 0.125)
    return EnergyDistribution(energies, mass, med, pairs, worst, sub_bad, radius, tail)
