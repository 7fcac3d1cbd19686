"""Pauli-basis operator algebra on n qubits.

A Pauli string is stored as a pair of n-bit masks ``(x_mask, z_mask)``.  The
bit for qubit ``i`` is ``1 << (n - 1 - i)`` so that masks line up with the
amplitude index convention (qubit 0 is the most significant bit) and with the
label, whose leftmost character is qubit 0.  The string with masks ``(x, z)``
is ``i^{|x & z|} X^x Z^z``, i.e. ``Y`` is the Hermitian Pauli Y and Hermitian
operators have real coefficients.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

import numpy as np

from locconc.config import MAX_DENSE_QUBITS, POWER_ITER_TOL, PURGE_TOL
from locconc.errors import InvalidInputError, ResourceLimitError

_LABEL_OF = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS_OF = {v: k for k, v in _LABEL_OF.items()}


# ---------------------------------------------------------------------------
# bit and transform helpers


def popcount(a) -> np.ndarray:
    return np.bitwise_count(np.asarray(a, dtype=np.int64)).astype(np.int64)


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis.

    ``out[..., z] = sum_b (-1)^{|z & b|} a[..., b]``.
    """
    a = np.array(a, copy=True)
    size = a.shape[-1]
    if size & (size - 1):
        raise InvalidInputError(f"transform length {size} is not a power of two")
    lead = a.shape[:-1]
    h = 1
    while h < size:
        a = a.reshape(*lead, size // (2 * h), 2, h)
        lo = a[..., 0, :]
        hi = a[..., 1, :]
        a = np.stack((lo + hi, lo - hi), axis=-2)
        h *= 2
    return a.reshape(*lead, size)


def qubit_mask(qubits: Iterable[int], n: int) -> int:
    m = 0
    for q in qubits:
        if not 0 <= q < n:
            raise InvalidInputError(f"qubit {q} out of range for n={n}")
        m |= 1 << (n - 1 - q)
    return m


def mask_qubits(mask: int, n: int) -> frozenset[int]:
    return frozenset(q for q in range(n) if mask >> (n - 1 - q) & 1)


def num_qubits_of(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise InvalidInputError(f"dimension {dim} is not a power of two")
    return n


def _compress(masks: np.ndarray, support: int, n: int) -> np.ndarray:
    """Gather the bits of ``masks`` selected by ``support`` into a dense mask."""
    out = np.zeros_like(masks)
    for pos in range(n - 1, -1, -1):
        if support >> pos & 1:
            out = (out << 1) | ((masks >> pos) & 1)
    return out


# ---------------------------------------------------------------------------
# dense norms


def is_hermitian(m: np.ndarray, atol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    return bool(np.allclose(m, m.conj().T, atol=atol * scale, rtol=0.0))


def op_norm(m: np.ndarray) -> float:
    """Operator (spectral) norm of a dense square matrix.

    Diagonal matrices use the largest absolute entry, Hermitian ones an exact
    eigendecomposition; anything else falls back to power iteration on M^H M.
    """
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    off = m - np.diag(np.diag(m))
    if not off.any():
        return float(np.abs(np.diag(m)).max())
    if is_hermitian(m):
        return float(np.abs(np.linalg.eigvalsh(m)).max())
    return _power_norm(m)


def _power_norm(m: np.ndarray) -> float:
    dim = m.shape[0]
    gram = m.conj().T @ m
    v = np.ones(dim, dtype=complex) + 1e-3 * np.arange(dim)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(10 * dim):
        w = gram @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(nw - lam) <= POWER_ITER_TOL * max(nw, 1.0):
            lam = nw
            break
        lam = nw
    return float(math.sqrt(lam))


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True, order=True)
class PauliString:
    n: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        full = (1 << self.n) - 1
        if self.x_mask & ~full or self.z_mask & ~full or self.x_mask < 0 or self.z_mask < 0:
            raise InvalidInputError("Pauli masks use bits beyond the qubit count")

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        n = len(label)
        x = z = 0
        for q, ch in enumerate(label.upper()):
            if ch not in _BITS_OF:
                raise InvalidInputError(f"bad Pauli letter {ch!r}")
            bx, bz = _BITS_OF[ch]
            x |= bx << (n - 1 - q)
            z |= bz << (n - 1 - q)
        return cls(n, x, z)

    @property
    def label(self) -> str:
        n = self.n
        return "".join(
            _LABEL_OF[(self.x_mask >> (n - 1 - q) & 1, self.z_mask >> (n - 1 - q) & 1)]
            for q in range(n)
        )

    @property
    def support_mask(self) -> int:
        return self.x_mask | self.z_mask

    @property
    def support(self) -> frozenset[int]:
        return mask_qubits(self.support_mask, self.n)

    @property
    def weight(self) -> int:
        return self.support_mask.bit_count()

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True, eq=False)
class PauliOperator:
    """Sparse Pauli expansion held as parallel, sorted numpy arrays.

    ``terms`` exposes the usual PauliString -> coefficient mapping; the arrays
    are what every numerical routine works with.
    """

    n: int
    xs: np.ndarray
    zs: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.int64).ravel()
        zs = np.asarray(self.zs, dtype=np.int64).ravel()
        cs = np.asarray(self.coeffs, dtype=complex).ravel()
        if not (xs.shape == zs.shape == cs.shape):
            raise InvalidInputError("xs, zs and coeffs must have equal length")
        if xs.size and (xs.max() >> self.n or zs.max() >> self.n or xs.min() < 0 or zs.min() < 0):
            raise InvalidInputError("Pauli masks use bits beyond the qubit count")
        # merge duplicates, purge near-zero, canonical order
        key = (xs << self.n) | zs
        uniq, inv = np.unique(key, return_inverse=True)
        summed = np.zeros(uniq.shape, dtype=complex)
        np.add.at(summed, inv, cs)
        keep = np.abs(summed) >= PURGE_TOL
        uniq, summed = uniq[keep], summed[keep]
        for name, val in (
            ("xs", uniq >> self.n),
            ("zs", uniq & ((1 << self.n) - 1)),
            ("coeffs", summed),
        ):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> PauliOperator:
        return cls(n, [], [], [])

    @classmethod
    def identity(cls, n: int, coeff: complex = 1.0) -> PauliOperator:
        return cls(n, [0], [0], [coeff])

    @classmethod
    def from_terms(cls, n: int, terms: Mapping[PauliString | str, complex]) -> PauliOperator:
        xs, zs, cs = [], [], []
        for p, c in terms.items():
            if isinstance(p, str):
                p = PauliString.from_label(p)
            if p.n != n:
                raise InvalidInputError("term qubit count does not match operator")
            xs.append(p.x_mask)
            zs.append(p.z_mask)
            cs.append(c)
        return cls(n, xs, zs, cs)

    @classmethod
    def from_dense(cls, m: np.ndarray) -> PauliOperator:
        return decompose(m)

    # views ---------------------------------------------------------------

    @cached_property
    def terms(self) -> Mapping[PauliString, complex]:
        return MappingProxyType(
            {
                PauliString(self.n, int(x), int(z)): complex(c)
                for x, z, c in zip(self.xs, self.zs, self.coeffs)
            }
        )

    @property
    def num_terms(self) -> int:
        return int(self.coeffs.size)

    @property
    def weights(self) -> np.ndarray:
        return popcount(self.xs | self.zs)

    @property
    def locality(self) -> int:
        """Largest support size over all terms (0 for the zero operator)."""
        return int(self.weights.max(initial=0))

    @property
    def support_mask(self) -> int:
        return int(np.bitwise_or.reduce(self.xs | self.zs, initial=0))

    @property
    def support(self) -> frozenset[int]:
        return mask_qubits(self.support_mask, self.n)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= atol))

    def is_diagonal(self) -> bool:
        return not np.any(self.xs)

    def select(self, keep: np.ndarray) -> PauliOperator:
        return PauliOperator(self.n, self.xs[keep], self.zs[keep], self.coeffs[keep])

    # algebra -------------------------------------------------------------

    def _check(self, other: PauliOperator):
        if not isinstance(other, PauliOperator) or other.n != self.n:
            raise InvalidInputError("operands must be PauliOperators on the same qubits")

    def __add__(self, other: PauliOperator) -> PauliOperator:
        self._check(other)
        return PauliOperator(
            self.n,
            np.concatenate((self.xs, other.xs)),
            np.concatenate((self.zs, other.zs)),
            np.concatenate((self.coeffs, other.coeffs)),
        )

    def __sub__(self, other: PauliOperator) -> PauliOperator:
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> PauliOperator:
        return PauliOperator(self.n, self.xs, self.zs, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> PauliOperator:
        return -1.0 * self

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator) or other.n != self.n:
            return NotImplemented
        return (
            np.array_equal(self.xs, other.xs)
            and np.array_equal(self.zs, other.zs)
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def allclose(self, other: PauliOperator, atol: float = 1e-10) -> bool:
        diff = self - other
        return bool(np.all(np.abs(diff.coeffs) <= atol))

    def __repr__(self) -> str:
        shown = ", ".join(f"{p.label}: {c:.6g}" for p, c in list(self.terms.items())[:6])
        more = "" if self.num_terms <= 6 else f", ... ({self.num_terms} terms)"
        return f"PauliOperator(n={self.n}, {{{shown}{more}}})"

    # dense ---------------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        return reconstruct(self)

    def norm(self) -> float:
        """Exact operator norm, computed on the qubits the operator touches."""
        if self.num_terms == 0:
            return 0.0
        if self.is_diagonal():
            sup = self.support_mask
            k = sup.bit_count()
            c = np.zeros(1 << k, dtype=complex)
            np.add.at(c, _compress(self.zs, sup, self.n), self.coeffs)
            return float(np.abs(fwht(c)).max())
        return op_norm(self.reduced().to_dense())

    def reduced(self) -> PauliOperator:
        """The same operator written on its support qubits only."""
        sup = self.support_mask
        return PauliOperator(
            sup.bit_count(),
            _compress(self.xs, sup, self.n),
            _compress(self.zs, sup, self.n),
            self.coeffs,
        )

    # text format ---------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{p.label} {c.real!r} {c.imag!r}" for p, c in self.terms.items()]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, n: int | None = None) -> PauliOperator:
        terms: dict[PauliString, complex] = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise InvalidInputError(f"malformed term line: {raw!r}")
            p = PauliString.from_label(parts[0])
            if n is None:
                n = p.n
            elif p.n != n:
                raise InvalidInputError("inconsistent label lengths")
            terms[p] = terms.get(p, 0.0) + complex(float(parts[1]), float(parts[2]))
        if n is None:
            raise InvalidInputError("empty operator text needs an explicit qubit count")
        return cls.from_terms(n, terms)


@dataclass(frozen=True)
class SupportGroup:
    support: frozenset[int]
    op: PauliOperator
    norm: float


@dataclass(frozen=True)
class LocalityCertificate:
    """A k-local witness together with its exact operator-norm error."""

    k: int
    eps: float
    witness: PauliOperator | None = field(default=None, compare=False)
    tln_value: float | None = field(default=None, compare=False)

    @cached_property
    def tln(self) -> float:
        """TLN of the canonical support grouping of the witness."""
        if self.tln_value is not None:
            return self.tln_value
        if self.witness is None:
            raise InvalidInputError("certificate carries no witness to measure")
        return tln(g.op for g in group_by_support(self.witness))


# ---------------------------------------------------------------------------
# operations


def pauli_coefficients(m: np.ndarray) -> np.ndarray:
    """All 4^n Pauli coefficients of a dense matrix, indexed ``[x_mask, z_mask]``."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError("expected a square matrix")
    n = num_qubits_of(m.shape[0])
    if n > MAX_DENSE_QUBITS:
        raise ResourceLimitError(f"dense decomposition capped at n <= {MAX_DENSE_QUBITS}")
    idx = np.arange(1 << n)
    # V[x, b] = M[b, b ^ x]
    v = m[idx[None, :], idx[None, :] ^ idx[:, None]]
    w = fwht(v)
    phase = (1j) ** (popcount(idx[:, None] & idx[None, :]) % 4)
    return phase * w / (1 << n)


def decompose(m: np.ndarray) -> PauliOperator:
    """Expand a dense 2^n x 2^n matrix in the Pauli basis."""
    coef = pauli_coefficients(m)
    n = num_qubits_of(coef.shape[0])
    xs, zs = np.nonzero(np.abs(coef) >= PURGE_TOL)
    return PauliOperator(n, xs, zs, coef[xs, zs])


def reconstruct(op: PauliOperator) -> np.ndarray:
    n = op.n
    if n > MAX_DENSE_QUBITS:
        raise ResourceLimitError(f"dense reconstruction capped at n <= {MAX_DENSE_QUBITS}")
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    if op.num_terms == 0:
        return out
    ux, row = np.unique(op.xs, return_inverse=True)
    c = np.zeros((ux.size, dim), dtype=complex)
    phase = (1j) ** (popcount(op.xs & op.zs) % 4)
    np.add.at(c, (row, op.zs), op.coeffs * phase)
    f = fwht(c)  # f[j, b] = M[b ^ ux[j], b]
    b = np.arange(dim)
    out[b[None, :] ^ ux[:, None], b[None, :]] = f
    return out


def support_truncate(op: PauliOperator, k: int) -> LocalityCertificate:
    """Keep the terms acting on at most k qubits; eps is the dropped norm."""
    if not 0 <= k <= op.n:
        raise InvalidInputError(f"locality k={k} outside [0, {op.n}]")
    keep = op.weights <= k
    witness = op.select(keep)
    rest = op.select(~keep)
    eps = 0.0 if rest.num_terms == 0 else operator_norm(rest)
    return LocalityCertificate(k=k, eps=eps, witness=witness)


def operator_norm(op: PauliOperator) -> float:
    if op.num_terms == 0:
        return 0.0
    if op.is_diagonal():
        return op.norm()
    if op.n > MAX_DENSE_QUBITS and op.support_mask.bit_count() > MAX_DENSE_QUBITS:
        raise ResourceLimitError("operator norm needs a dense matrix above the cap")
    return op.norm()


def _as_mask(support, n: int) -> int:
    if isinstance(support, (int, np.integer)):
        return int(support)
    return qubit_mask(support, n)


def subset_restrict(
    terms: Sequence[tuple[Iterable[int] | int, PauliOperator]],
    S: Iterable[int],
    n: int | None = None,
) -> PauliOperator:
    """Sum of the declared terms whose support meets the qubit set ``S``."""
    terms = list(terms)
    if n is None:
        if not terms:
            raise InvalidInputError("qubit count required for an empty term list")
        n = terms[0][1].n
    smask = qubit_mask(S, n)
    out = PauliOperator.zero(n)
    for support, op in terms:
        if _as_mask(support, n) & smask:
            out = out + op
    return out


def restrict_to_subset(op: PauliOperator, S: Iterable[int]) -> PauliOperator:
    """Subset operator of the canonical Pauli decomposition of ``op``."""
    smask = qubit_mask(S, op.n)
    return op.select(((op.xs | op.zs) & smask) != 0)


def group_by_support(op: PauliOperator) -> list[SupportGroup]:
    sup = op.xs | op.zs
    groups = []
    for t in np.unique(sup):
        part = op.select(sup == t)
        groups.append(SupportGroup(mask_qubits(int(t), op.n), part, part.norm()))
    return groups


def tln(terms) -> float:
    """Total local norm of an explicit decomposition.

    Each term may be a PauliOperator, a ``(support, PauliOperator)`` pair, a
    dense matrix, or a precomputed nonnegative norm.
    """
    total = 0.0
    for term in terms:
        if isinstance(term, tuple):
            term = term[1]
        if isinstance(term, PauliOperator):
            total += term.norm()
        elif isinstance(term, np.ndarray):
            total += op_norm(term)
        else:
            val = float(term)
            if val < 0:
                raise InvalidInputError("term norms must be nonnegative")
            total += val
    return total
