"""Exact statevector simulation of the state families used in the experiments.

Amplitude index convention: qubit 0 is the most significant bit.  Global
phases are never meaningful; compare states with :func:`fidelity`.
"""

from __future__ import annotations

import struct
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from locconc.config import EXACT_ATOL, MAX_DENSE_QUBITS, MAX_STATEVECTOR_QUBITS
from locconc.errors import InvalidInputError, ResourceLimitError
from locconc.pauli import is_hermitian, num_qubits_of

ZERO = np.array([1.0, 0.0], dtype=complex)
ONE = np.array([0.0, 1.0], dtype=complex)
PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        if self.n > MAX_STATEVECTOR_QUBITS:
            raise ResourceLimitError(f"statevectors capped at n <= {MAX_STATEVECTOR_QUBITS}")
        a = np.array(self.amps, dtype=complex).ravel()
        if a.size != 1 << self.n:
            raise InvalidInputError(f"expected {1 << self.n} amplitudes, got {a.size}")
        if abs(np.linalg.norm(a) - 1.0) > EXACT_ATOL:
            raise InvalidInputError("state is not normalised")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def from_amps(cls, amps) -> StateVector:
        amps = np.asarray(amps, dtype=complex).ravel()
        return cls(num_qubits_of(amps.size), amps)

    @property
    def probs(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def density(self) -> np.ndarray:
        if self.n > MAX_DENSE_QUBITS:
            raise ResourceLimitError(f"dense operators capped at n <= {MAX_DENSE_QUBITS}")
        return np.outer(self.amps, self.amps.conj())

    def flipped(self) -> StateVector:
        """X on every qubit: amplitude x moves to the complement of x."""
        return StateVector(self.n, self.amps[::-1])


def fidelity(a: StateVector, b: StateVector) -> float:
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def basis_state(n: int, index: int = 0) -> StateVector:
    a = np.zeros(1 << n, dtype=complex)
    a[index] = 1.0
    return StateVector(n, a)


def product_state(locals_: Sequence[np.ndarray]) -> StateVector:
    out = np.ones(1, dtype=complex)
    for v in locals_:
        v = np.asarray(v, dtype=complex)
        if v.shape != (2,) or abs(np.linalg.norm(v) - 1.0) > EXACT_ATOL:
            raise InvalidInputError("each local state must be a normalised 2-vector")
        out = np.kron(out, v)
    return StateVector(len(locals_), out)


def plus_state(n: int) -> StateVector:
    return StateVector(n, np.full(1 << n, 2 ** (-n / 2), dtype=complex))


# ---------------------------------------------------------------------------
# gate application


def apply_gate(amps: np.ndarray, n: int, qubits: Sequence[int], u: np.ndarray) -> np.ndarray:
    k = len(qubits)
    psi = np.asarray(amps).reshape((2,) * n)
    g = np.asarray(u, dtype=complex).reshape((2,) * (2 * k))
    psi = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), list(qubits)))
    psi = np.moveaxis(psi, list(range(k)), list(qubits))
    return psi.reshape(-1)


@dataclass(frozen=True)
class Gate:
    qubits: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        k = len(self.qubits)
        if k not in (1, 2) or len(set(self.qubits)) != k:
            raise InvalidInputError("gates act on one or two distinct qubits")
        if m.shape != (1 << k, 1 << k):
            raise InvalidInputError(f"gate on {k} qubits needs a {1 << k}x{1 << k} matrix")
        if not np.allclose(m.conj().T @ m, np.eye(1 << k), atol=EXACT_ATOL):
            raise InvalidInputError("gate matrix is not unitary")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class ShallowCircuit:
    n: int
    layers: tuple[tuple[Gate, ...], ...]

    def __post_init__(self):
        layers = tuple(tuple(layer) for layer in self.layers)
        for layer in layers:
            seen: set[int] = set()
            for g in layer:
                if any(q < 0 or q >= self.n for q in g.qubits):
                    raise InvalidInputError(f"gate qubits {g.qubits} out of range")
                if seen & set(g.qubits):
                    raise InvalidInputError("gate supports overlap within a layer")
                seen |= set(g.qubits)
        object.__setattr__(self, "layers", layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def unitary(self) -> np.ndarray:
        if self.n > MAX_DENSE_QUBITS:
            raise ResourceLimitError(f"dense operators capped at n <= {MAX_DENSE_QUBITS}")
        dim = 1 << self.n
        cols = [apply_circuit(self, np.eye(dim, dtype=complex)[:, j]) for j in range(dim)]
        return np.stack(cols, axis=1)


def apply_circuit(c: ShallowCircuit, amps: np.ndarray) -> np.ndarray:
    for layer in c.layers:
        for g in layer:
            amps = apply_gate(amps, c.n, g.qubits, g.matrix)
    return amps


def lightcones(c: ShallowCircuit, backward: bool = True) -> dict[int, frozenset[int]]:
    """Qubit -> set of qubits it can be causally connected to through the circuit.

    The backward cone of qubit i bounds the support of U^dag P_i U; the
    forward cone bounds that of U P_i U^dag.
    """
    order = reversed(c.layers) if backward else iter(c.layers)
    cones = {i: {i} for i in range(c.n)}
    for layer in order:
        for g in layer:
            for i, cone in cones.items():
                if cone & set(g.qubits):
                    cone |= set(g.qubits)
    return {i: frozenset(s) for i, s in cones.items()}


def run_circuit(c: ShallowCircuit, s0: StateVector) -> tuple[StateVector, dict[int, frozenset[int]]]:
    if c.n != s0.n:
        raise InvalidInputError("circuit and state disagree on qubit count")
    return StateVector(c.n, apply_circuit(c, s0.amps)), lightcones(c)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_brickwork(n: int, depth: int, seed: int) -> ShallowCircuit:
    """Alternating nearest-neighbour layers of Haar-random two-qubit gates."""
    rng = np.random.default_rng(seed)
    layers = []
    for t in range(depth):
        start = t % 2
        layer = [Gate((i, i + 1), haar_unitary(4, rng)) for i in range(start, n - 1, 2)]
        layers.append(tuple(layer))
    return ShallowCircuit(n, tuple(layers))


# ---------------------------------------------------------------------------
# evolutions


def diag_evolve(s: StateVector, diag, angle: float) -> StateVector:
    """Multiply amplitude x by exp(-i angle diag[x])."""
    diag = np.asarray(diag, dtype=float)
    if diag.shape != s.amps.shape:
        raise InvalidInputError("diagonal length does not match the state")
    return StateVector(s.n, s.amps * np.exp(-1j * angle * diag))


def rx_all(amps: np.ndarray, n: int, beta: float) -> np.ndarray:
    c, sn = np.cos(beta), -1j * np.sin(beta)
    psi = np.array(amps, dtype=complex)
    for q in range(n):
        v = psi.reshape(1 << q, 2, -1)
        lo, hi = v[:, 0, :].copy(), v[:, 1, :].copy()
        v[:, 0, :] = c * lo + sn * hi
        v[:, 1, :] = sn * lo + c * hi
    return psi


def mixer_evolve(s: StateVector, beta: float) -> StateVector:
    """Apply exp(-i beta X) to every qubit."""
    return StateVector(s.n, rx_all(s.amps, s.n, beta))


@dataclass(frozen=True)
class QaoaSchedule:
    gammas: tuple[float, ...]
    betas: tuple[float, ...]
    angle_bound: float = 2 * np.pi

    def __post_init__(self):
        g = tuple(float(x) for x in self.gammas)
        b = tuple(float(x) for x in self.betas)
        if len(g) != len(b):
            raise InvalidInputError("gammas and betas must have the same length")
        if any(abs(x) > self.angle_bound for x in g + b):
            raise InvalidInputError(f"angles must lie in [-{self.angle_bound}, {self.angle_bound}]")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)

    @property
    def p(self) -> int:
        return len(self.gammas)

    @classmethod
    def random(cls, p: int, seed: int, gamma_max: float = 1.0, beta_max: float = np.pi / 2) -> QaoaSchedule:
        rng = np.random.default_rng(seed)
        return cls(tuple(rng.uniform(0, gamma_max, p)), tuple(rng.uniform(0, beta_max, p)))


def run_qaoa(inst, sched: QaoaSchedule) -> StateVector:
    """QAOA output from |+>^n with the Hamiltonian-scaled instance diagonal."""
    diag = inst.hamiltonian_diag
    s = plus_state(inst.n)
    for gamma, beta in zip(sched.gammas, sched.betas):
        s = mixer_evolve(diag_evolve(s, diag, gamma), beta)
    return s


def dense_unitary(h: np.ndarray, sign: float = 1.0) -> np.ndarray:
    """exp(i sign H) for Hermitian H via its eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise InvalidInputError("H must be Hermitian")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * sign * w)) @ v.conj().T


def dense_evolve(s: StateVector, h: np.ndarray) -> StateVector:
    """Apply exp(iH)."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (1 << s.n, 1 << s.n):
        raise InvalidInputError("Hamiltonian dimension does not match the state")
    if s.n > MAX_DENSE_QUBITS:
        raise ResourceLimitError(f"dense operators capped at n <= {MAX_DENSE_QUBITS}")
    return StateVector(s.n, dense_unitary(h) @ s.amps)


def chain_distribution(initial, transitions) -> np.ndarray:
    """Joint law P(x_1) prod P(x_i | x_{i-1}) over all bitstrings."""
    initial = np.asarray(initial, dtype=float)
    mats = [np.asarray(t, dtype=float) for t in transitions]
    if initial.shape != (2,) or any(t.shape != (2, 2) for t in mats):
        raise InvalidInputError("need a 2-vector start and 2x2 transition matrices")
    if np.any(initial <= 0) or any(np.any(t <= 0) for t in mats):
        raise InvalidInputError("all probabilities must be strictly positive")
    if abs(initial.sum() - 1) > EXACT_ATOL or any(
        np.any(np.abs(t.sum(axis=1) - 1) > EXACT_ATOL) for t in mats
    ):
        raise InvalidInputError("distributions must sum to one")
    if len(mats) + 1 > MAX_STATEVECTOR_QUBITS:
        raise ResourceLimitError(f"statevectors capped at n <= {MAX_STATEVECTOR_QUBITS}")
    # joint[..., b] over the prefix, last bit kept separate for the next step
    joint = initial.copy()
    for t in mats:
        joint = (joint.reshape(-1, 2)[:, :, None] * t[None, :, :]).reshape(-1)
    return joint


def markov_state(initial, transitions) -> StateVector:
    """sum_x sqrt(P(x)) |x> for a two-state Markov chain along the line."""
    p = chain_distribution(initial, transitions)
    return StateVector(len(transitions) + 1, np.sqrt(p).astype(complex))


# ---------------------------------------------------------------------------
# binary dump

_MAGIC = b"QSV1"


def dumps_state(s: StateVector) -> bytes:
    header = _MAGIC + struct.pack("<I", s.n) + bytes(8)
    body = np.empty(2 * s.amps.size, dtype="<f8")
    body[0::2] = s.amps.real
    body[1::2] = s.amps.imag
    return header + body.tobytes()


def loads_state(data: bytes) -> StateVector:
    if len(data) < 16 or data[:4] != _MAGIC:
        raise InvalidInputError("not a QSV1 state dump")
    (n,) = struct.unpack("<I", data[4:8])
    body = np.frombuffer(data[16:], dtype="<f8")
    if body.size != 2 << n:
        raise InvalidInputError("state dump length does not match its header")
    return StateVector(n, body[0::2] + 1j * body[1::2])


def save_state(s: StateVector, path: str | Path) -> None:
    Path(path).write_bytes(dumps_state(s))


def load_state(path: str | Path) -> StateVector:
    return loads_state(Path(path).read_bytes())
