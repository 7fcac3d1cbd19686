"""Explicit local approximations with measured errors, and the bound ledger.

Every construction here reports the exact (dense or eigenbasis) error next
to the closed-form bound it is supposed to satisfy, so a failing inequality
points at an implementation bug rather than at a loose constant.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, fields

import numpy as np

from locconc.config import MAX_DENSE_QUBITS
from locconc.errors import InvalidInputError, ResourceLimitError
from locconc.pauli import (
    LocalityCertificate,
    PauliOperator,
    decompose,
    group_by_support,
    is_hermitian,
    num_qubits_of,
    op_norm,
    subset_restrict,
    support_truncate,
)
from locconc.poly import power_poly, taylor_exp
from locconc.sim import ShallowCircuit, dense_unitary, lightcones

E = math.e


def ceil_int(x: float, rel: float = 1e-9) -> int:
    """Ceiling that ignores float noise on values that are integers in exact arithmetic."""
    r = round(x)
    if abs(x - r) <= rel * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def measured_locality(op: PauliOperator, rel: float = 1e-12) -> int:
    """Largest support among terms above ``rel`` times the largest coefficient."""
    if op.num_terms == 0:
        return 0
    big = np.abs(op.coeffs) > rel * np.abs(op.coeffs).max()
    return int(op.weights[big].max(initial=0))


# ---------------------------------------------------------------------------
# |+><+|^n from powers of the averaged projector Hamiltonian


@dataclass(frozen=True)
class PlusApproxResult:
    n: int
    m: int
    a: int
    s: int
    locality: int
    measured_eps: float
    paper_eps_bound: float
    tln_bound: float
    k0: float
    eps0: float


def plus_defaults(n: int) -> tuple[int, int, int]:
    m = ceil_int(n**0.25)
    a = ceil_int(n**0.5)
    s = ceil_int(n**0.875 / math.sqrt(2))
    return m, a, s


def plus_state_approx(n: int, m: int | None = None, a: int | None = None, s: int | None = None) -> PlusApproxResult:
    """Error of R = P_{s,a}(H0^m) against |+><+|^n, computed in the H0 eigenbasis.

    H0 = (1/n) sum_i |+><+|_i has eigenvalue w/n on states with w qubits in
    |+>, so only n + 1 scalar evaluations are needed.
    """
    dm, da, ds = plus_defaults(n)
    m = dm if m is None else m
    a = da if a is None else a
    s = ds if s is None else s
    if n < 1 or m < 1 or s < 0:
        raise InvalidInputError("need n >= 1, m >= 1, s >= 0")
    if a > s:
        raise InvalidInputError(f"cutoff a={a} exceeds step count s={s}")
    poly = power_poly(s, a)
    eig = (np.arange(n + 1) / n) ** m
    vals = poly(eig)
    measured = max(float(np.abs(vals[:-1]).max(initial=0.0)), abs(1.0 - float(vals[-1])))
    bound = math.exp(-m * s / n) + 2 * math.exp(-((a + 1) ** 2) / (2 * s)) if s else math.inf
    return PlusApproxResult(
        n=n,
        m=m,
        a=a,
        s=s,
        locality=a * m,
        measured_eps=measured,
        paper_eps_bound=bound,
        tln_bound=safe_exp(a),
        k0=2 * n**0.75,
        eps0=3 * math.exp(-(n**0.125) / math.sqrt(2)),
    )


def plus_state_operator(n: int, m: int, a: int, s: int) -> np.ndarray:
    """Dense R = P_{s,a}(H0^m); used to cross-check the eigenbasis shortcut."""
    if n > MAX_DENSE_QUBITS:
        raise ResourceLimitError(f"dense operators capped at n <= {MAX_DENSE_QUBITS}")
    plus = np.full((2, 2), 0.5, dtype=complex)
    h0 = np.zeros((1 << n, 1 << n), dtype=complex)
    for i in range(n):
        h0 += np.kron(np.kron(np.eye(1 << i), plus), np.eye(1 << (n - 1 - i)))
    h0 /= n
    return apply_spectral(h0, lambda lam: power_poly(s, a)(np.clip(lam, 0, 1) ** m))


def apply_spectral(h: np.ndarray, f) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * f(w)) @ v.conj().T


# ---------------------------------------------------------------------------
# products of commuting projectors


def _check_projector(p: np.ndarray, atol: float = 1e-9):
    if not is_hermitian(p) or not np.allclose(p @ p, p, atol=atol):
        raise InvalidInputError("input is not an orthogonal projector")


def _pairwise_commute(ops: Sequence[np.ndarray], atol: float = 1e-9) -> bool:
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if not np.allclose(ops[i] @ ops[j], ops[j] @ ops[i], atol=atol):
                return False
    return True


def projector_error_bound(r: int, m: int, a: int, s: int) -> float:
    return math.exp(-m * s / r) + 2 * math.exp(-((a + 1) ** 2) / (2 * s))


def projector_product_approx(
    projectors: Sequence[np.ndarray], m: int, a: int, s: int, ell: int | None = None
) -> LocalityCertificate:
    """Certificate for prod_i P_i built as P_{s,a}(H_avg^m), H_avg = mean of the P_i.

    The witness is truncated at k = min(n, ell * a * m) Pauli weight, so it is
    k-local exactly; eps is the dense error of that truncated witness.
    """
    projectors = [np.asarray(p, dtype=complex) for p in projectors]
    if not projectors:
        raise InvalidInputError("need at least one projector")
    n = num_qubits_of(projectors[0].shape[0])
    if n > 10:
        raise ResourceLimitError("projector products are verified densely for n <= 10")
    if a > s:
        raise InvalidInputError(f"cutoff a={a} exceeds step count s={s}")
    for p in projectors:
        _check_projector(p)
    if not _pairwise_commute(projectors):
        raise InvalidInputError("projectors do not commute")
    target = projectors[0]
    for p in projectors[1:]:
        target = target @ p
    if abs(np.trace(target).real - 1.0) > 1e-8:
        raise InvalidInputError("joint top eigenspace is not one-dimensional")
    if ell is None:
        ell = max(decompose(p).locality for p in projectors)
    h_avg = sum(projectors) / len(projectors)
    poly = power_poly(s, a)
    r = apply_spectral(h_avg, lambda lam: poly(np.clip(lam, 0, 1) ** m))
    k = min(n, ell * a * m)
    witness = support_truncate(decompose(r), k).witness
    eps = op_norm(target - witness.to_dense())
    return LocalityCertificate(k=k, eps=eps, witness=witness)


def circuit_projectors(c: ShallowCircuit) -> list[np.ndarray]:
    """U |0><0|_i U^dag for every qubit i; their joint +1 eigenstate is U|0^n>."""
    u = c.unitary()
    n = c.n
    zero = np.diag([1.0, 0.0]).astype(complex)
    out = []
    for i in range(n):
        p = np.kron(np.kron(np.eye(1 << i), zero), np.eye(1 << (n - 1 - i)))
        out.append(u @ p @ u.conj().T)
    return out


def circuit_projector_locality(c: ShallowCircuit) -> int:
    return max(len(cone) for cone in lightcones(c, backward=False).values())


# ---------------------------------------------------------------------------
# Taylor-truncated conjugation


@dataclass(frozen=True, eq=False)
class TaylorConjugateResult:
    approx: np.ndarray
    measured_err: float
    paper_bound: float
    locality_bound: int
    measured_locality: int
    norm_h: float
    applicable: bool


def taylor_conjugate(
    O: np.ndarray, H: np.ndarray, d: int, ell: int | None = None, k: int | None = None
) -> TaylorConjugateResult:
    """Compare Q O Q^dag (Q = degree-d Taylor of exp(-iH)) with exp(-iH) O exp(iH)."""
    O = np.asarray(O, dtype=complex)
    H = np.asarray(H, dtype=complex)
    n = num_qubits_of(H.shape[0])
    if n > 10:
        raise ResourceLimitError("Taylor conjugation is verified densely for n <= 10")
    if O.shape != H.shape:
        raise InvalidInputError("O and H must have the same shape")
    if ell is None:
        ell = decompose(H).locality
    if k is None:
        k = decompose(O).locality
    norm_h = op_norm(H)
    u = dense_unitary(H, sign=-1.0)
    exact = u @ O @ u.conj().T
    q = taylor_exp(H, d)
    approx = q @ O @ q.conj().T
    err = op_norm(exact - approx)
    bound = 3 * math.exp(-(d - E * norm_h)) * op_norm(O)
    return TaylorConjugateResult(
        approx=approx,
        measured_err=err,
        paper_bound=bound,
        locality_bound=min(n, 2 * ell * d + k),
        measured_locality=measured_locality(decompose(approx)),
        norm_h=norm_h,
        applicable=d >= E * norm_h,
    )


# ---------------------------------------------------------------------------
# spread of a local operator under a commuting Hamiltonian


@dataclass(frozen=True, eq=False)
class CommutingSpreadResult:
    cert: LocalityCertificate
    degree: int
    k_prime: int
    eps_bound: float
    tln_bound: float
    tln_constructive: float
    tln_input: float
    measured_locality: int
    localisation_residual: float
    subset_condition_ok: bool
    degree_ok: bool


def _terms_n(terms) -> int:
    for _, op in terms:
        return op.n
    raise InvalidInputError("empty term list")


def commuting_spread(
    R_terms: Sequence[tuple[Sequence[int], PauliOperator]],
    H_terms: Sequence[tuple[Sequence[int], PauliOperator]],
    mu: float,
    kappa: float,
    alpha: float,
    c_tilde: float,
    ell: int | None = None,
) -> CommutingSpreadResult:
    """Conjugate each R_i by the Taylor truncation of exp(-i H_{S_i}) only.

    Commutativity of H lets the i-th term feel just the subset Hamiltonian on
    its own support; the degree is d = ceil(mu c_tilde e n^alpha kappa^(1-alpha)).
    """
    n = _terms_n(R_terms)
    if n > 10:
        raise ResourceLimitError("commuting spread is verified densely for n <= 10")
    if mu <= 1:
        raise InvalidInputError("mu must exceed 1")
    supports = [frozenset(int(q) for q in s) for s, _ in R_terms]
    k = max((len(s) for s in supports), default=0)
    if kappa < k:
        raise InvalidInputError(f"kappa={kappa} is below the input locality k={k}")
    h_dense = [op.to_dense() for _, op in H_terms]
    if not _pairwise_commute(h_dense):
        raise InvalidInputError("Hamiltonian terms do not commute")
    if ell is None:
        ell = max((op.locality for _, op in H_terms), default=0)
    dim = 1 << n
    h_full = sum(h_dense) if h_dense else np.zeros((dim, dim), dtype=complex)
    u_full = dense_unitary(h_full, sign=-1.0)

    x = c_tilde * n**alpha * kappa ** (1 - alpha)
    d = math.ceil(mu * E * x)
    approx = np.zeros((dim, dim), dtype=complex)
    exact = np.zeros((dim, dim), dtype=complex)
    tln_in = tln_out = 0.0
    resid = 0.0
    subset_ok = degree_ok = True
    for S, (_, r_op) in zip(supports, R_terms):
        r = r_op.to_dense()
        tln_in += r_op.norm()
        h_s = subset_restrict(H_terms, S, n=n) if S else PauliOperator.zero(n)
        hs = h_s.to_dense()
        norm_s = h_s.norm()
        subset_ok &= norm_s <= c_tilde * n**alpha * len(S) ** (1 - alpha) * (1 + 1e-12)
        degree_ok &= d > E * norm_s
        u_s = dense_unitary(hs, sign=-1.0)
        local_exact = u_s @ r @ u_s.conj().T
        full_exact = u_full @ r @ u_full.conj().T
        resid = max(resid, op_norm(full_exact - local_exact))
        q = taylor_exp(hs, d)
        term = q @ r @ q.conj().T
        tln_out += sum(g.norm for g in group_by_support(decompose(term)))
        approx += term
        exact += full_exact
    witness = decompose(approx)
    k_prime = 2 * ell * d + k
    eps_bound = 3 * math.exp(-(mu - 1) * E * x) * tln_in
    err = op_norm(exact - approx)
    return CommutingSpreadResult(
        cert=LocalityCertificate(k=min(n, k_prime), eps=err, witness=witness),
        degree=d,
        k_prime=k_prime,
        eps_bound=eps_bound,
        tln_bound=float(2 * n) ** k_prime * (tln_in + eps_bound),
        tln_constructive=tln_out,
        tln_input=tln_in,
        measured_locality=measured_locality(witness),
        localisation_residual=resid,
        subset_condition_ok=bool(subset_ok),
        degree_ok=bool(degree_ok),
    )


# ---------------------------------------------------------------------------
# closed-form ledger


@dataclass(frozen=True)
class LedgerInputs:
    n: float
    p: int
    ell: float
    alpha: float
    c_tilde: float
    mu: float = 1 + 4 / E
    kappa: float | None = None
    alpha_prime: float | None = None
    D: float | None = None
    depth: int | None = None
    circuit_k: float | None = None
    taylor_d: int | None = None
    taylor_norm_h: float | None = None
    taylor_k: float | None = None
    taylor_norm_o: float = 1.0

    def __post_init__(self):
        if self.n <= 0 or self.ell <= 0 or self.c_tilde <= 0 or self.p < 0:
            raise InvalidInputError("ledger parameters must be positive and p >= 0")
        if not 0 <= self.alpha < 1:
            raise InvalidInputError("alpha must lie in [0, 1)")


PROBABILITY_BOUNDS = ("cor42.tail", "cor43.tail", "cor32.tail")


@dataclass(frozen=True)
class BoundLedger:
    inputs: LedgerInputs
    values: dict[str, float] = field(default_factory=dict)

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    def status(self, key: str) -> str:
        v = self.values[key]
        if key in PROBABILITY_BOUNDS:
            return "vacuous" if v >= 1.0 else "ok"
        if key.startswith("check."):
            return "pass" if v == 1.0 else "flag"
        return "value"

    def to_text(self) -> str:
        lines = []
        for f in fields(self.inputs):
            val = getattr(self.inputs, f.name)
            if val is not None:
                lines.append(f"input.{f.name} {val!r}")
        lines += [f"{k} {v!r}" for k, v in self.values.items()]
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse(text: str) -> dict[str, float]:
        out = {}
        for line in text.splitlines():
            if line.strip() and not line.startswith("input."):
                key, val = line.split()
                out[key] = float(val)
        return out


def bound_ledger(inp: LedgerInputs) -> BoundLedger:
    n, p, ell, alpha, ct = inp.n, inp.p, inp.ell, inp.alpha, inp.c_tilde
    v: dict[str, float] = {}
    log2n = math.log(2 * n)
    root2 = math.sqrt(2)

    c1 = 40 * ell * ct
    v["thm31.c1"] = c1

    # starting state
    m, a, s = plus_defaults(int(n)) if float(n).is_integer() else (None, None, None)
    k0 = 2 * n**0.75
    eps0 = 3 * math.exp(-(n**0.125) / root2)
    log_tln0 = math.log(2) + math.sqrt(n)
    v["lemma35.k0"] = k0
    v["lemma35.eps0"] = eps0
    v["lemma35.tln0"] = safe_exp(log_tln0)
    v["lemma35.log_tln0"] = log_tln0
    if m is not None:
        v["lemma35.m"] = m
        v["lemma35.a"] = a
        v["lemma35.s"] = s
        v["lemma35.locality"] = a * m
        v["lemma35.eps_construction"] = math.exp(-m * s / n) + 2 * math.exp(-((a + 1) ** 2) / (2 * s))
        v["lemma35.tln_construction"] = safe_exp(a)

    # technical lemma: closed forms for every level
    def k33(j: int) -> float:
        return 2 * (20 * ell * ct) ** j * n ** (1 - (1 - alpha) ** j / 4)

    eps33 = eps0
    for j in range(p + 1):
        if j >= 1:
            expo = (
                -4 * (20 * ell) ** (j - 1) * ct**j * n ** (1 - (1 - alpha) ** j / 4)
                + math.sqrt(n)
                + 2 * (j - 1) * log2n * k33(j - 1)
            )
            eps33 += 6 * safe_exp(expo)
        v[f"lemma33.k.{j}"] = k33(j)
        v[f"lemma33.eps.{j}"] = eps33
        v[f"lemma33.log_tln.{j}"] = math.log(2) + math.sqrt(n) + 2 * j * log2n * k33(j)
    v["lemma33.k_p"] = k33(p)
    v["lemma33.eps_p"] = eps33

    # theorem: simplified forms, and whether they dominate the technical ones
    v["thm31.k_p"] = c1**p * n ** (1 - (1 - alpha) ** p / 4)
    v["thm31.eps_p"] = 4 * math.exp(-(n**0.125) / root2)
    v["check.thm31_k_dominates"] = float(v["thm31.k_p"] >= v["lemma33.k_p"])
    v["check.thm31_eps_dominates"] = float(v["thm31.eps_p"] >= v["lemma33.eps_p"])

    # one-step recursion of the simplified spread lemma
    k_prev, eps_prev, log_tln_prev = k0, eps0, log_tln0
    for i in range(1, p + 1):
        big_c = 2 * (20 * ell * ct) ** (i - 1)
        delta = (1 - alpha) ** (i - 1) / 4
        grow = n ** (1 - (1 - alpha) * delta)
        k_new = 20 * ell * ct * big_c * grow
        eps_new = safe_exp(math.log(3) - 4 * ct * big_c * grow + log_tln_prev) + eps_prev
        log_tln_new = 2 * log2n * k_new + log_tln_prev
        v[f"lemma36.k.{i}"] = k_new
        v[f"lemma36.eps.{i}"] = eps_new
        v[f"lemma36.log_tln.{i}"] = log_tln_new
        k_prev, eps_prev, log_tln_prev = k_new, eps_new, log_tln_new

    # same recursion through the general commuting-spread lemma
    k_prev, eps_prev, log_tln_prev = k0, eps0, log_tln0
    mu = inp.mu
    for i in range(1, p + 1):
        kappa = k_prev if inp.kappa is None else max(inp.kappa, k_prev)
        x = ct * n**alpha * kappa ** (1 - alpha)
        k_new = 2 * ell * math.ceil(mu * E * x) + k_prev
        log_eps_step = math.log(3) - (mu - 1) * E * x + log_tln_prev
        eps_new = safe_exp(log_eps_step) + eps_prev
        log_tln_new = k_new * log2n + float(np.logaddexp(log_tln_prev, log_eps_step))
        v[f"lemmaA2.k.{i}"] = k_new
        v[f"lemmaA2.eps.{i}"] = eps_new
        v[f"lemmaA2.log_tln.{i}"] = log_tln_new
        k_prev, eps_prev, log_tln_prev = k_new, eps_new, log_tln_new

    if inp.taylor_d is not None and inp.taylor_norm_h is not None:
        kk = inp.taylor_k if inp.taylor_k is not None else 1
        v["lemmaA1.k"] = 2 * ell * inp.taylor_d + kk
        v["lemmaA1.eps"] = 3 * math.exp(-(inp.taylor_d - E * inp.taylor_norm_h)) * inp.taylor_norm_o
        v["check.lemmaA1_applicable"] = float(inp.taylor_d >= E * inp.taylor_norm_h)

    tail = 128 * math.exp(-root2 * n**0.125)
    v["cor42.radius"] = c1**p * n ** (1 - (1 - alpha) ** p / 4)
    v["cor42.tail"] = tail
    if inp.alpha_prime is not None and inp.D is not None:
        ap = inp.alpha_prime
        v["cor43.radius"] = 2 * inp.D * c1 ** (p * (1 - ap)) * n ** (1 - (1 - alpha) ** p * (1 - ap) / 4)
        v["cor43.tail"] = tail

    if inp.depth is not None and inp.circuit_k is not None:
        t, kc = inp.depth, inp.circuit_k
        v["cor32.eps"] = 2 ** (-(kc**2) / (2 ** (2 * t + 8) * n))
        v["cor32.tail"] = 4 * 2 ** (-(kc**2) / (2 ** (2 * t + 7) * n))
        v["check.cor32_k_in_range"] = float(2**t * math.sqrt(n) < kc < 2**t * n)

    return BoundLedger(inp, v)
