"""Pure and mixed q-spin instances and the subset-norm condition.

The coupling tensor runs over all ordered index tuples in [n]^q, repeats
included.  A tuple multiplies Z operators, so Z_i^2 = I and the tuple acts on
the indices of odd multiplicity; that set is the term's support everywhere in
this module.  Every instance is therefore a diagonal Hamiltonian

    H(x) = sum_T c_T (-1)^{|x & T|},

and its diagonal is one Walsh-Hadamard transform of the reduced
coefficients c_T.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from locconc.config import (
    MAX_ENUMERATION_QUBITS,
    MAX_EXHAUSTIVE_SUBSET_QUBITS,
    MAX_STATEVECTOR_QUBITS,
    MAX_TENSOR_ENTRIES,
)
from locconc.errors import InvalidInputError, ResourceLimitError
from locconc.pauli import PauliOperator, fwht, mask_qubits, popcount, qubit_mask


@dataclass(frozen=True, eq=False)
class SpinComponent:
    q: int
    coeff: float
    J: np.ndarray = field(repr=False)

    @cached_property
    def tuple_masks(self) -> np.ndarray:
        """Odd-multiplicity support mask of every ordered tuple, row-major."""
        n = self.J.shape[0] if self.q else 0
        bits = np.int64(1) << (n - 1 - np.arange(n, dtype=np.int64))
        masks = np.zeros(1, dtype=np.int64)
        for _ in range(self.q):
            masks = (masks[:, None] ^ bits[None, :]).ravel()
        return masks


@dataclass(frozen=True, eq=False)
class SpinInstance:
    n: int
    components: tuple[SpinComponent, ...]
    seed: int | None = None

    @property
    def q(self) -> int:
        return max(c.q for c in self.components)

    @property
    def is_pure(self) -> bool:
        return len(self.components) == 1 and self.components[0].coeff == 1.0

    @property
    def J(self) -> np.ndarray:
        if len(self.components) != 1:
            raise InvalidInputError("mixed instance has one tensor per component")
        return self.components[0].J

    @property
    def coeff_abs_sum(self) -> float:
        return float(sum(abs(c.coeff) for c in self.components))

    @cached_property
    def reduced_coeffs(self) -> np.ndarray:
        """c_T of the Hamiltonian-scaled operator, indexed by support mask T."""
        if self.n > MAX_STATEVECTOR_QUBITS:
            raise ResourceLimitError(f"diagonal enumeration capped at n <= {MAX_STATEVECTOR_QUBITS}")
        c = np.zeros(1 << self.n)
        for comp in self.components:
            scale = comp.coeff / self.n ** ((comp.q - 1) / 2)
            c += scale * np.bincount(comp.tuple_masks, weights=comp.J.ravel(), minlength=1 << self.n)
        return c

    @cached_property
    def hamiltonian_diag(self) -> np.ndarray:
        d = fwht(self.reduced_coeffs)
        d.setflags(write=False)
        return d

    @cached_property
    def cost_diag(self) -> np.ndarray:
        d = self.hamiltonian_diag / self.n
        d.setflags(write=False)
        return d

    def is_symmetric(self) -> bool:
        """True when every component has even order, so C(z) = C(-z)."""
        return all(c.q % 2 == 0 for c in self.components)


def _check_tensor_size(n: int, q: int):
    if n < 1 or q < 1:
        raise InvalidInputError("need n >= 1 and q >= 1")
    if n**q > MAX_TENSOR_ENTRIES:
        raise ResourceLimitError(f"n^q = {n**q} exceeds the tensor cap {MAX_TENSOR_ENTRIES}")


def _gaussians(seed: int, q: int, count: int) -> np.ndarray:
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), q])
    return np.random.Generator(np.random.Philox(ss)).standard_normal(count)


def gen_pure_spin(n: int, q: int, seed: int) -> SpinInstance:
    """Pure q-spin instance with i.i.d. N(0, 1) couplings in lexicographic order."""
    _check_tensor_size(n, q)
    J = _gaussians(seed, q, n**q).reshape((n,) * q)
    J.setflags(write=False)
    return SpinInstance(n, (SpinComponent(q, 1.0, J),), seed)


def gen_mixed_spin(n: int, coeffs: Mapping[int, float], seed: int) -> SpinInstance:
    comps = []
    for q, c in sorted(coeffs.items()):
        if c == 0:
            continue
        _check_tensor_size(n, q)
        J = _gaussians(seed, q, n**q).reshape((n,) * q)
        J.setflags(write=False)
        comps.append(SpinComponent(q, float(c), J))
    if not comps:
        raise InvalidInputError("mixture needs at least one nonzero coefficient")
    return SpinInstance(n, tuple(comps), seed)


def from_couplings(n: int, q: int, entries: Mapping[tuple[int, ...], float], coeff: float = 1.0) -> SpinInstance:
    """Instance with the given couplings and zeros elsewhere (0-based indices)."""
    _check_tensor_size(n, q)
    J = np.zeros((n,) * q)
    for idx, v in entries.items():
        if len(idx) != q:
            raise InvalidInputError(f"index tuple {idx} has length != q={q}")
        J[idx] = v
    J.setflags(write=False)
    return SpinInstance(n, (SpinComponent(q, coeff, J),), None)


def cost_eval(inst: SpinInstance, z) -> float:
    """C(z) by direct tensor contraction; independent of the diagonal cache."""
    z = np.asarray(z, dtype=float)
    if z.shape != (inst.n,):
        raise InvalidInputError(f"spin vector must have length {inst.n}")
    total = 0.0
    for comp in inst.components:
        val = comp.J
        for _ in range(comp.q):
            val = val @ z
        total += comp.coeff * float(val) / inst.n ** ((comp.q + 1) / 2)
    return total


def diag_values(inst: SpinInstance, scaling: str = "cost") -> np.ndarray:
    """C((-1)^x) for every x, or n times that for ``scaling='hamiltonian'``."""
    if scaling == "cost":
        return inst.cost_diag
    if scaling == "hamiltonian":
        return inst.hamiltonian_diag
    raise InvalidInputError(f"unknown scaling {scaling!r}")


def to_pauli(inst: SpinInstance) -> PauliOperator:
    """Hamiltonian-scaled instance as a sum of Z strings."""
    c = inst.reduced_coeffs
    zs = np.nonzero(c)[0]
    return PauliOperator(inst.n, np.zeros_like(zs), zs, c[zs])


def term_list(inst: SpinInstance) -> list[tuple[int, PauliOperator]]:
    """(support mask, term) pairs, one per distinct nontrivial support."""
    op = to_pauli(inst)
    return [(int(z), op.select(op.zs == z)) for z in op.zs if z != 0]


def _subset_norms(inst: SpinInstance, subset_masks: np.ndarray, chunk: int = 1 << 22) -> np.ndarray:
    c = inst.reduced_coeffs
    T = np.arange(c.size, dtype=np.int64)
    out = np.empty(len(subset_masks))
    rows = max(1, chunk // c.size)
    for start in range(0, len(subset_masks), rows):
        sm = np.asarray(subset_masks[start : start + rows], dtype=np.int64)
        block = c[None, :] * ((sm[:, None] & T[None, :]) != 0)
        out[start : start + rows] = np.abs(fwht(block)).max(axis=1)
    return out


def subset_norm(inst: SpinInstance, S: Iterable[int]) -> float:
    """||H_S|| = n max_z |C_S(z)|, exactly, by enumerating the diagonal."""
    if inst.n > MAX_ENUMERATION_QUBITS:
        raise ResourceLimitError(f"subset norms capped at n <= {MAX_ENUMERATION_QUBITS}")
    return float(_subset_norms(inst, np.array([qubit_mask(S, inst.n)]))[0])


@dataclass(frozen=True)
class SubsetNormReport:
    alpha: float
    c_tilde: float
    mode: str
    tested: int
    violations: list[tuple[frozenset[int], float, float]] = field(default_factory=list)
    max_ratio: float = 0.0
    argmax: frozenset[int] = frozenset()

    @property
    def holds(self) -> bool:
        return not self.violations


def subset_bound(n: int, size, alpha: float, c_tilde: float):
    return c_tilde * n**alpha * np.asarray(size, dtype=float) ** (1 - alpha)


def check_subset_condition(
    inst: SpinInstance,
    alpha: float = 0.5,
    c_tilde: float = math.sqrt(6),
    mode: str = "exhaustive",
    count: int = 64,
    seed: int = 0,
) -> SubsetNormReport:
    """Test ||H_S|| <= c_tilde n^alpha |S|^(1-alpha) over a family of subsets S.

    ``mode='exhaustive'`` tries all 2^n subsets (n <= 10); ``mode='sampled'``
    draws ``count`` uniform subsets of every size 1..n.
    """
    n = inst.n
    if mode == "exhaustive":
        if n > MAX_EXHAUSTIVE_SUBSET_QUBITS:
            raise ResourceLimitError(
                f"exhaustive subset enumeration capped at n <= {MAX_EXHAUSTIVE_SUBSET_QUBITS}"
            )
        masks = np.arange(1, 1 << n, dtype=np.int64)
    elif mode == "sampled":
        if n > MAX_ENUMERATION_QUBITS:
            raise ResourceLimitError(f"subset norms capped at n <= {MAX_ENUMERATION_QUBITS}")
        rng = np.random.default_rng(seed)
        picks = []
        for size in range(1, n + 1):
            for _ in range(count):
                picks.append(qubit_mask(rng.choice(n, size=size, replace=False).tolist(), n))
        masks = np.unique(np.array(picks, dtype=np.int64))
    else:
        raise InvalidInputError(f"unknown mode {mode!r}")
    norms = _subset_norms(inst, masks)
    bounds = subset_bound(n, popcount(masks), alpha, c_tilde)
    ratio = np.where(bounds > 0, norms / np.where(bounds > 0, bounds, 1.0), 0.0)
    bad = np.nonzero(ratio > 1.0)[0]
    violations = [(mask_qubits(int(masks[i]), n), float(norms[i]), float(bounds[i])) for i in bad]
    best = int(np.argmax(ratio)) if ratio.size else 0
    return SubsetNormReport(
        alpha=alpha,
        c_tilde=c_tilde,
        mode=mode if mode == "exhaustive" else f"sampled({count},{seed})",
        tested=int(masks.size),
        violations=violations,
        max_ratio=float(ratio.max(initial=0.0)),
        argmax=mask_qubits(int(masks[best]), n) if ratio.size else frozenset(),
    )


# ---------------------------------------------------------------------------
# instance files


def dumps_instance(inst: SpinInstance) -> str:
    lines = []
    seed = "none" if inst.seed is None else str(inst.seed)
    for comp in inst.components:
        head = f"spin v1 n={inst.n} q={comp.q} seed={seed}"
        if not inst.is_pure:
            head += f" coeff={float(comp.coeff).hex()}"
        lines.append(head)
        flat = comp.J.ravel()
        for pos in np.nonzero(flat)[0]:
            idx = np.unravel_index(pos, comp.J.shape)
            lines.append(" ".join(str(int(i)) for i in idx) + " " + float(flat[pos]).hex())
    return "\n".join(lines) + "\n"


def loads_instance(text: str) -> SpinInstance:
    comps = []
    n = seed = None
    cur = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("spin "):
            fields = dict(tok.split("=", 1) for tok in line.split()[2:])
            if line.split()[1] != "v1":
                raise InvalidInputError(f"unsupported instance version in {line!r}")
            n_here = int(fields["n"])
            if n is not None and n_here != n:
                raise InvalidInputError("components disagree on n")
            n = n_here
            seed = None if fields.get("seed", "none") == "none" else int(fields["seed"])
            q = int(fields["q"])
            _check_tensor_size(n, q)
            coeff = float.fromhex(fields["coeff"]) if "coeff" in fields else 1.0
            cur = (q, coeff, np.zeros((n,) * q))
            comps.append(cur)
            continue
        if cur is None:
            raise InvalidInputError("coefficient line before header")
        parts = line.split()
        q, _, J = cur
        if len(parts) != q + 1:
            raise InvalidInputError(f"expected {q} indices and a value: {raw!r}")
        J[tuple(int(p) for p in parts[:q])] = float.fromhex(parts[-1])
    if not comps:
        raise InvalidInputError("no instance header found")
    out = []
    for q, coeff, J in comps:
        J.setflags(write=False)
        out.append(SpinComponent(q, coeff, J))
    return SpinInstance(n, tuple(out), seed)


def save_instance(inst: SpinInstance, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(inst))


def load_instance(path: str | Path) -> SpinInstance:
    return loads_instance(Path(path).read_text())
