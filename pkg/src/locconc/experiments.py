"""Config dataclasses and runners for every experiment kind.

A runner takes its config and returns an ``Outcome``: named data files plus
check rows ``(formula_id, measured, bound, status)``.  Runners never touch the
filesystem; ``locconc.cli`` handles staging, hashing and the manifest.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from locconc.approx import (
    LedgerInputs,
    bound_ledger,
    circuit_projector_locality,
    circuit_projectors,
    commuting_spread,
    plus_state_approx,
    projector_product_approx,
    taylor_conjugate,
)
from locconc.conc import energy_dist, hamming_dist, tail_check, weight_band_clustering
from locconc.errors import InvalidInputError
from locconc.models import check_subset_condition, dumps_instance, gen_mixed_spin, gen_pure_spin, to_pauli
from locconc.ogp import (
    GoodSet,
    cluster_partition,
    cluster_weights,
    good_set,
    ogp_scan,
    planted_cost,
    planted_mu,
    report_text,
)
from locconc.pauli import PauliOperator, decompose, support_truncate
from locconc.sim import (
    QaoaSchedule,
    StateVector,
    basis_state,
    diag_evolve,
    markov_state,
    mixer_evolve,
    plus_state,
    random_brickwork,
    run_circuit,
    run_qaoa,
)

SQRT6 = math.sqrt(6)


# ---------------------------------------------------------------------------
# configs


@dataclass
class BoundLedgerConfig:
    n: float = 256
    p: int = 3
    ell: float = 4
    alpha: float = 0.5
    c_tilde: float = SQRT6
    mu: float = 1 + 4 / math.e
    kappa: float | None = None
    alpha_prime: float | None = 0.5
    D: float | None = SQRT6
    depth: int | None = None
    circuit_k: float | None = None


@dataclass
class PlusApproxConfig:
    ns: tuple[int, ...] = (16, 64, 256, 4096)


@dataclass
class SubsetNormsConfig:
    n: int = 10
    q: int = 4
    instances: int = 200
    seed: int = 0
    alpha: float = 0.5
    c_tilde: float = SQRT6
    mode: str = "exhaustive"
    save_instances: bool = False


@dataclass
class TaylorSpreadConfig:
    n: int = 6
    trials: int = 100
    seed: int = 0
    ell: int = 2
    max_norm: float = 1.5
    max_degree: int = 24


@dataclass
class ShallowTailsConfig:
    ns: tuple[int, ...] = (8, 10)
    depths: tuple[int, ...] = (1, 2)
    seeds: int = 5
    seed: int = 0


@dataclass
class QaoaConcConfig:
    n: int = 12
    q: int = 4
    p: int = 2
    seeds: int = 5
    seed: int = 0
    gamma_max: float = 1.0
    beta_max: float = math.pi / 2
    cert_max_n: int = 10
    pairs: int = 256


@dataclass
class MarkovConcConfig:
    ns: tuple[int, ...] = (6, 8, 10)
    seeds: int = 5
    seed: int = 0
    c: float = 1.0
    cert_max_n: int = 10


@dataclass
class OgpSymmetricConfig:
    ns: tuple[int, ...] = (8, 10)
    radius: tuple[int, ...] = (0, 1)
    nu1: tuple[float, ...] = (0.1, 0.1)
    nu2: tuple[float, ...] = (0.8, 0.6)
    states: int = 5
    seed: int = 0


@dataclass
class GenInstanceConfig:
    n: int = 10
    q: int = 4
    seed: int = 0
    mixed: str = ""


CONFIGS: dict[str, type] = {
    "bound-ledger": BoundLedgerConfig,
    "plus-approx": PlusApproxConfig,
    "subset-norms": SubsetNormsConfig,
    "taylor-spread": TaylorSpreadConfig,
    "shallow-tails": ShallowTailsConfig,
    "qaoa-conc": QaoaConcConfig,
    "markov-conc": MarkovConcConfig,
    "ogp-symmetric": OgpSymmetricConfig,
    "gen-instance": GenInstanceConfig,
}


def _parse_value(raw: str, default):
    raw = raw.strip()
    if isinstance(default, bool):
        if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise InvalidInputError(f"not a boolean: {raw!r}")
        return raw.lower() in ("true", "1", "yes")
    if isinstance(default, tuple):
        kind = type(default[0]) if default else float
        return tuple(kind(v) for v in raw.replace(",", " ").split())
    if isinstance(default, int):
        return int(raw, 0)
    if isinstance(default, str):
        return raw
    if raw.lower() in ("", "none"):
        return None
    return float(raw)


def make_config(kind: str, params: dict[str, str]):
    """Build the config dataclass for ``kind`` from raw string values."""
    if kind not in CONFIGS:
        raise InvalidInputError(f"unknown experiment kind {kind!r}; known: {', '.join(CONFIGS)}")
    cls = CONFIGS[kind]
    names = {f.name: f for f in fields(cls)}
    unknown = set(params) - set(names)
    if unknown:
        raise InvalidInputError(f"unknown keys for {kind}: {', '.join(sorted(unknown))}")
    base = cls()
    values = {}
    for key, raw in params.items():
        try:
            values[key] = _parse_value(raw, getattr(base, key))
        except ValueError as exc:
            raise InvalidInputError(f"bad value for {key}: {raw!r}") from exc
    return cls(**values)


def config_items(cfg) -> list[tuple[str, str]]:
    out = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = " ".join(repr(x) for x in v)
        out.append((f.name, "none" if v is None else repr(v) if isinstance(v, float) else str(v)))
    return out


# ---------------------------------------------------------------------------
# outcome and formatting


@dataclass
class Outcome:
    files: dict[str, bytes] = field(default_factory=dict)
    checks: list[tuple[str, float | None, float | None, str]] = field(default_factory=list)

    def add_text(self, name: str, text: str):
        self.files[name] = text.encode()

    def check(self, formula_id: str, measured, bound, status: str | None = None):
        if status is None:
            status = "pass" if measured <= bound else "fail"
        self.checks.append((formula_id, measured, bound, status))


@dataclass(frozen=True)
class Fmt:
    exact: bool = False

    def __call__(self, v) -> str:
        if v is None:
            return ""
        if isinstance(v, (bool, np.bool_)):
            return str(int(v))
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        v = float(v)
        return v.hex() if self.exact else repr(v)

    def csv(self, header: Sequence[str], rows) -> str:
        lines = [",".join(header)]
        lines += [",".join(self(x) if not isinstance(x, str) else x for x in row) for row in rows]
        return "\n".join(lines) + "\n"


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def probability_status(value: float) -> str:
    return "vacuous" if value >= 1.0 else "info"


# ---------------------------------------------------------------------------
# shared building blocks


def random_local_hamiltonian(n: int, ell: int, rng: np.random.Generator, norm: float) -> PauliOperator:
    """Random Hermitian sum of Paulis on nearest-neighbour windows of ``ell`` qubits, scaled to ``norm``."""
    terms = {}
    for start in range(n - ell + 1):
        for code in range(1, 4**ell):
            letters = ["IXYZ"[(code >> (2 * j)) & 3] for j in range(ell)]
            label = ["I"] * n
            label[start : start + ell] = letters
            terms["".join(label)] = terms.get("".join(label), 0.0) + rng.standard_normal()
    op = PauliOperator.from_terms(n, terms)
    return op * (norm / op.norm())


def random_local_observable(n: int, k: int, rng: np.random.Generator) -> PauliOperator:
    qubits = sorted(rng.choice(n, size=k, replace=False).tolist())
    label = ["I"] * n
    for q in qubits:
        label[q] = "XYZ"[rng.integers(3)]
    return PauliOperator.from_terms(n, {"".join(label): 1.0})


def truncation_checks(tag: str, s: StateVector, rows: list):
    """Support-truncation certificates of |s><s| at every k, fed to both concentration lemmas."""
    rho = decompose(s.density())
    worst_tail = worst_prod = 0.0
    bad_tail = bad_prod = 0
    for k in range(1, s.n + 1):
        cert = support_truncate(rho, k)
        tv = tail_check(s, cert, tol=1e-10)
        bands = weight_band_clustering(s, cert, tol=1e-10)
        prod_ok = all(b.product_passed for b in bands)
        prod_excess = max((b.product - b.eps for b in bands), default=-math.inf)
        bad_tail += not tv.passed
        bad_prod += not prod_ok
        worst_tail = max(worst_tail, max(tv.upper_tail, tv.lower_tail) - tv.bound)
        worst_prod = max(worst_prod, prod_excess)
        rows.append((tag, k, cert.eps, tv.median, tv.upper_tail, tv.lower_tail, tv.bound, tv.passed, prod_ok))
    return bad_tail, bad_prod, worst_tail, worst_prod


TAIL_HEADER = ("state", "k", "eps", "median", "upper_tail", "lower_tail", "bound", "tail_pass", "product_pass")


# ---------------------------------------------------------------------------
# runners


def run_bound_ledger(cfg: BoundLedgerConfig, seed: int, fmt: Fmt, threads: int = 1) -> Outcome:
    led = bound_ledger(
        LedgerInputs(
            n=cfg.n,
            p=cfg.p,
            ell=cfg.ell,
            alpha=cfg.alpha,
            c_tilde=cfg.c_tilde,
            mu=cfg.mu,
            kappa=cfg.kappa,
            alpha_prime=cfg.alpha_prime,
            D=cfg.D,
            depth=cfg.depth,
            circuit_k=cfg.circuit_k,
        )
    )
    out = Outcome()
    out.add_text("ledger.txt", led.to_text())
    v = led.values
    for key in ("cor42.tail", "cor43.tail", "cor32.tail"):
        if key in v:
            out.check(key, None, v[key], probability_status(v[key]))
    out.check("thm31.k_dominates", v["lemma33.k_p"], v["thm31.k_p"], "pass" if v["check.thm31_k_dominates"] else "flag")
    eps_status = "pass" if v["check.thm31_eps_dominates"] else ("vacuous" if v["lemma33.eps_p"] >= 1 else "flag")
    out.check("thm31.eps_dominates", v["lemma33.eps_p"], v["thm31.eps_p"], eps_status)
    return out


def run_plus_approx(cfg: PlusApproxConfig, seed: int, fmt: Fmt, threads: int = 1) -> Outcome:
    out = Outcome()
    rows = []
    for n in cfg.ns:
        r = plus_state_approx(n)
        rows.append((n, r.m, r.a, r.s, r.locality, r.measured_eps, r.paper_eps_bound, r.eps0, r.k0))
        out.check(f"lemma35.eps0[n={n}]", r.measured_eps, r.eps0)
        out.check(f"lemma35.construction[n={n}]", r.measured_eps, r.paper_eps_bound)
        out.check(f"lemma35.k0[n={n}]", r.locality, r.k0)
    header = ("n", "m", "a", "s", "locality", "measured_eps", "construction_bound", "eps0", "k0")
    out.add_text("plus_approx.csv", fmt.csv(header, rows))
    return out


def run_subset_norms(cfg: SubsetNormsConfig, seed: int, fmt: Fmt, threads: int = 1) -> Outcome:
    out = Outcome()

    def one(i: int):
        inst = gen_pure_spin(cfg.n, cfg.q, seed + i)
        return inst, check_subset_condition(inst, cfg.alpha, cfg.c_tilde, mode=cfg.mode, seed=seed + i)

    results = _pmap(one, range(cfg.instances), threads)
    rows = []
    for inst, rep in results:
        rows.append((inst.seed, rep.tested, len(rep.violations), rep.max_ratio))
        if cfg.save_instances:
            out.add_text(f"instances/spin_n{cfg.n}_q{cfg.q}_s{inst.seed}.txt", dumps_instance(inst))
    out.add_text("subset_norms.csv", fmt.csv(("seed", "subsets_tested", "violations", "max_ratio"), rows))
    bad = sum(1 for r in rows if r[2])
    allowed = math.ceil(cfg.instances * math.exp(-cfg.n))
    out.check("lemma44.violating_instances", bad, allowed)
    return out


def run_taylor_spread(cfg: TaylorSpreadConfig, seed: int, fmt: Fmt, threads: int = 1) -> Outcome:
    out = Outcome()
    rng = np.random.default_rng(seed)
    jobs = []
    for trial in range(cfg.trials):
        norm = rng.uniform(0.1, cfg.max_norm)
        h = random_local_hamiltonian(cfg.n, cfg.ell, rng, norm)
        o = random_local_observable(cfg.n, int(rng.integers(1, 3)), rng)
        jobs.append((trial, h, o))

    def one(job):
        trial, h, o = job
        hd, od = h.to_dense(), o.to_dense()
        d0 = math.ceil(math.e * h.norm())
        res = []
        for d in range(d0, cfg.max_degree + 1):
            r = taylor_conjugate(od, hd, d, ell=cfg.ell, k=o.locality)
            res.append((trial, d, r.norm_h, r.measured_err, r.paper_bound, r.measured_locality, r.locality_bound))
        return res

    rows = [row for chunk in _pmap(one, jobs, threads) for row in chunk]
    out.add_text(
        "taylor.csv",
        fmt.csv(("trial", "d", "norm_h", "measured_err", "bound", "locality", "locality_bound"), rows),
    )
    err_bad = sum(1 for r in rows if r[3] > r[4])
    loc_bad = sum(1 for r in rows if r[5] > r[6])
    out.check("lemmaA1.error_violations", err_bad, 0)
    out.check("lemmaA1.locality_violations", loc_bad, 0)

    # commuting case: Z0 spreading under gamma Z0 Z1
    spread_rows = []
    for label in ("ZIII", "XIII"):
        for gamma in (0.25, 0.5, 1.0):
            r_terms = [((0,), PauliOperator.from_terms(4, {label: 1.0}))]
            h_terms = [((0, 1), PauliOperator.from_terms(4, {"ZZII": gamma})), ((2, 3), PauliOperator.from_terms(4, {"IIZZ": gamma}))]
            cs = commuting_spread(r_terms, h_terms, mu=2.0, kappa=1, alpha=0.5, c_tilde=SQRT6)
            spread_rows.append(
                (label, gamma, cs.degree, cs.cert.eps, cs.eps_bound, cs.measured_locality, cs.k_prime, cs.localisation_residual)
            )
            out.check(f"lemmaA2.eps[{label},gamma={gamma}]", cs.cert.eps, cs.eps_bound)
            out.check(f"lemmaA2.localisation[{label},gamma={gamma}]", cs.localisation_residual, 1e-12)
    out.add_text(
        "commuting_spread.csv",
        fmt.csv(("observable", "gamma", "d", "measured_err", "eps_bound", "locality", "k_prime", "localisation_residual"), spread_rows),
    )
    return out


def run_shallow_tails(cfg: ShallowTailsConfig, seed: int, fmt: Fmt, threads: int = 1) -> Outcome:
    out = Outcome()
    jobs = [(n, t, seed + i) for n in cfg.ns for t in cfg.depths for i in range(cfg.seeds)]

    def one(job):
        n, t, sd = job
        c = random_brickwork(n, t, sd)
        s, _ = run_circuit(c, basis_state(n))
        rows = []
        stats = truncation_checks(f"brickwork_n{n}_t{t}_s{sd}", s, rows)
        return rows, stats

    bad_tail = bad_prod = 0
    rows = []
    for r, (bt, bp, _, _) in _pmap(one, jobs, threads):
        rows += r
        bad_tail += bt
        bad_prod += bp
    out.add_text("tails.csv", fmt.csv(TAIL_HEADER, rows))
    out.check("lemma210.tail_violations", bad_tail, 0)
    out.check("lemma211.product_violations", bad_prod, 0)

    # the averaged-projector construction on one depth-1 circuit
    n = min(cfg.ns)
    c = random_brickwork(n, 1, seed)
    cert = projector_product_approx(circuit_projectors(c), 2, 3, 6, ell=circuit_projector_locality(c))
    s, _ = run_circuit(c, basis_state(n))
    tv = tail_check(s, cert)
    out.check(f"lemma210.projector_cert[n={n}]", max(tv.upper_tail, tv.lower_tail), tv.bound)

    # Gaussian tails for shallow circuits, against the closed form
    ledger_rows = []
    for n in cfg.ns:
        for t in cfg.depths:
            for k in range(1, n + 1):
                led = bound_ledger(LedgerInputs(n=n, p=0, ell=2, alpha=0.5, c_tilde=SQRT6, depth=t, circuit_k=k))
                tail = led["cor32.tail"]
                ledger_rows.append((n, t, k, led["cor32.eps"], tail, led.status("cor32.tail")))
            out.check(f"cor32.tail[n={n},t={t},k={n}]", None, tail, probability_status(tail))
    out.add_text("cor32.csv", fmt.csv(("n", "depth", "k", "eps", "tail", "status"), ledger_rows))
    return out


def _qaoa_state(inst, cfg: QaoaConcConfig, sd: int) -> StateVector:
    sched = QaoaSchedule.random(cfg.p, sd, gamma_max=cfg.gamma_max, beta_max=cfg.beta_max)
    return run_qaoa(inst, sched)


def run_qaoa_conc(cfg: QaoaConcConfig, seed: int, fmt: Fmt, threads: int = 1) -> Outcome:
    out = Outcome()

    def one(i: int):
        sd = seed + i
        inst = gen_pure_spin(cfg.n, cfg.q, sd)
        s = _qaoa_state(inst, cfg, sd)
        wd = hamming_dist(s)
        flip = abs(np.vdot(s.amps, s.flipped().amps))
        sym = float(np.abs(wd.probs - wd.probs[::-1]).max())
        g = to_pauli(inst)
        ed = energy_dist(s, g, 0.5, SQRT6, p=cfg.p, alpha=0.5, c1=40 * cfg.q * SQRT6, pairs=cfg.pairs, seed=sd)
        rows = []
        stats = None
        if cfg.n <= cfg.cert_max_n:
            stats = truncation_checks(f"qaoa_s{sd}", s, rows)
        return sd, inst, wd, ed, flip, sym, rows, stats

    tail_rows = []
    sym_rows = []
    even = cfg.q % 2 == 0
    for sd, inst, wd, ed, flip, sym, rows, stats in _pmap(one, range(cfg.seeds), threads):
        out.add_text(f"instances/spin_n{cfg.n}_q{cfg.q}_s{sd}.txt", dumps_instance(inst))
        out.add_text(f"hamming_s{sd}.csv", wd.to_csv() if not fmt.exact else fmt.csv(("w", "prob"), enumerate(wd.probs)))
        out.add_text(f"energy_s{sd}.csv", ed.to_csv() if not fmt.exact else fmt.csv(("energy", "prob"), zip(ed.energies, ed.probs)))
        sym_rows.append((sd, 1 - flip, sym, wd.median, ed.median, ed.max_pair_ratio, ed.subset_violations))
        if even:
            out.check(f"lemma55.flip_overlap[s={sd}]", 1 - flip, 1e-8)
            out.check(f"lemma55.hamming_symmetry[s={sd}]", sym, 1e-10)
        out.check(f"cor43.energy_step[s={sd}]", ed.max_pair_ratio, 1.0)
        if ed.tail_bound is not None:
            out.check(f"cor43.tail[s={sd}]", None, ed.tail_bound, probability_status(ed.tail_bound))
        tail_rows += rows
        if stats is not None:
            out.check(f"lemma210.tail_violations[s={sd}]", stats[0], 0)
            out.check(f"lemma211.product_violations[s={sd}]", stats[1], 0)
    out.add_text(
        "symmetry.csv",
        fmt.csv(("seed", "flip_defect", "hamming_asymmetry", "median_w", "median_energy", "max_step_ratio", "subset_violations"), sym_rows),
    )
    if tail_rows:
        out.add_text("tails.csv", fmt.csv(TAIL_HEADER, tail_rows))
    return out


def random_chain(n: int, rng: np.random.Generator) -> tuple[np.ndarray, list[np.ndarray]]:
    initial = rng.dirichlet([1.0, 1.0])
    mats = [rng.dirichlet([1.0, 1.0], size=2) for _ in range(n - 1)]
    return initial, mats


def run_markov_conc(cfg: MarkovConcConfig, seed: int, fmt: Fmt, threads: int = 1) -> Outcome:
    out = Outcome()
    jobs = [(n, seed + i) for n in cfg.ns for i in range(cfg.seeds)]

    def one(job):
        n, sd = job
        initial, mats = random_chain(n, np.random.default_rng(sd))
        s = markov_state(initial, mats)
        brute = brute_chain(initial, mats)
        diff = float(np.abs(s.probs - brute).max())
        rows = []
        k = min(n, math.ceil(cfg.c * math.sqrt(n)))
        tv = None
        if n <= cfg.cert_max_n:
            cert = support_truncate(decompose(s.density()), k)
            tv = tail_check(s, cert, tol=1e-10)
            rows.append((f"markov_n{n}_s{sd}", k, cert.eps, tv.median, tv.upper_tail, tv.lower_tail, tv.bound, tv.passed, True))
        return n, sd, diff, rows, tv

    rows = []
    dist_rows = []
    for n, sd, diff, r, tv in _pmap(one, jobs, threads):
        dist_rows.append((n, sd, diff))
        out.check(f"markov.distribution[n={n},s={sd}]", diff, 1e-12)
        if tv is not None:
            out.check(f"lemma210.markov[n={n},s={sd}]", max(tv.upper_tail, tv.lower_tail), tv.bound + 1e-10)
        rows += r
    out.add_text("markov.csv", fmt.csv(("n", "seed", "max_abs_diff"), dist_rows))
    if rows:
        out.add_text("tails.csv", fmt.csv(TAIL_HEADER, rows))
    return out


def brute_chain(initial, mats) -> np.ndarray:
    """Joint law by walking every bitstring; an independent route to the chain distribution."""
    n = len(mats) + 1
    out = np.empty(1 << n)
    for x in range(1 << n):
        bits = [(x >> (n - 1 - i)) & 1 for i in range(n)]
        p = initial[bits[0]]
        for i in range(1, n):
            p *= mats[i - 1][bits[i - 1], bits[i]]
        out[x] = p
    return out


def symmetric_test_states(n: int, values: np.ndarray, count: int, seed: int) -> list[tuple[str, StateVector]]:
    """States invariant under the global flip: GHZ, flip-symmetrised random states and QAOA on ``values``."""
    rng = np.random.default_rng(seed)
    ghz = np.zeros(1 << n, dtype=complex)
    ghz[0] = ghz[-1] = 1 / math.sqrt(2)
    out = [("ghz", StateVector(n, ghz)), ("plus", plus_state(n))]
    for i in range(count):
        a = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
        a = a + a[::-1]
        out.append((f"random{i}", StateVector(n, a / np.linalg.norm(a))))
        s = plus_state(n)
        for _ in range(2):
            s = mixer_evolve(diag_evolve(s, values * n, rng.uniform(0, 1)), rng.uniform(0, math.pi / 2))
        out.append((f"qaoa{i}", s))
    return out


LINE_POINTS = (0b0000000000, 0b1100000000, 0b1111000000)


def run_ogp_symmetric(cfg: OgpSymmetricConfig, seed: int, fmt: Fmt, threads: int = 1) -> Outcome:
    out = Outcome()
    if not len(cfg.ns) == len(cfg.radius) == len(cfg.nu1) == len(cfg.nu2):
        raise InvalidInputError("ns, radius, nu1 and nu2 must have equal lengths")
    rows = []
    for n, r, nu1, nu2 in zip(cfg.ns, cfg.radius, cfg.nu1, cfg.nu2):
        values = planted_cost(n)
        g = good_set(values, planted_mu(n, r))
        rep = ogp_scan(g)
        part = cluster_partition(g, nu1, nu2)
        worst = 0.0
        for name, s in symmetric_test_states(n, values, cfg.states, seed + n):
            cw = cluster_weights(s, part)
            worst = max(worst, cw.max_flip_residual)
            rows.append((n, name, cw.good_mass, *cw.weights[:2], cw.max_flip_residual))
        out.add_text(f"ogp_n{n}.txt", report_text(rep, part))
        out.check(f"eq9.valid[n={n}]", float(not part.valid), 0.0)
        out.check(f"def52.holds[n={n}]", float(not rep.holds(nu1, nu2)), 0.0)
        out.check(f"cor54.flip_residual[n={n}]", worst, 1e-10)
    out.add_text("cluster_weights.csv", fmt.csv(("n", "state", "good_mass", "weight0", "weight1", "flip_residual"), rows))
    line = GoodSet(10, 0.0, np.array(sorted(LINE_POINTS), dtype=np.int64))
    lp = cluster_partition(line, 0.1, 0.6)
    out.check("eq9.line_flagged_invalid", float(lp.valid), 0.0)
    out.add_text("line.txt", report_text(ogp_scan(line), lp))
    return out


def parse_mixture(text: str) -> dict[int, float]:
    out = {}
    for item in text.replace(" ", "").split(","):
        if item:
            q, c = item.split(":")
            out[int(q)] = float(c)
    return out


def run_gen_instance(cfg: GenInstanceConfig, seed: int, fmt: Fmt, threads: int = 1) -> Outcome:
    out = Outcome()
    if cfg.mixed:
        inst = gen_mixed_spin(cfg.n, parse_mixture(cfg.mixed), seed)
        name = f"spin_n{cfg.n}_mixed_s{seed}.txt"
    else:
        inst = gen_pure_spin(cfg.n, cfg.q, seed)
        name = f"spin_n{cfg.n}_q{cfg.q}_s{seed}.txt"
    out.add_text(name, dumps_instance(inst))
    return out


RUNNERS: dict[str, Callable] = {
    "bound-ledger": run_bound_ledger,
    "plus-approx": run_plus_approx,
    "subset-norms": run_subset_norms,
    "taylor-spread": run_taylor_spread,
    "shallow-tails": run_shallow_tails,
    "qaoa-conc": run_qaoa_conc,
    "markov-conc": run_markov_conc,
    "ogp-symmetric": run_ogp_symmetric,
    "gen-instance": run_gen_instance,
}

