"""Entropy, mixedness and negativity of multi-qubit pure states."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

from .qcore import DensityOperator, Ket, QcoreError, reduced_density

EIG_CLAMP = 1e-10
MIXED_ATOL = 1e-9


@dataclass(frozen=True)
class Bipartition:
    """Cut of an ``n``-qubit register into two nonempty complementary parts (0-based)."""

    part_a: tuple[int, ...]
    part_b: tuple[int, ...]

    def __post_init__(self):
        a, b = tuple(sorted(self.part_a)), tuple(sorted(self.part_b))
        if not a or not b:
            raise QcoreError("both sides of a cut must be nonempty")
        if set(a) & set(b):
            raise QcoreError("cut sides overlap")
        if set(a) | set(b) != set(range(len(a) + len(b))):
            raise QcoreError("cut sides must cover the register")
        object.__setattr__(self, "part_a", a)
        object.__setattr__(self, "part_b", b)

    @classmethod
    def of(cls, part_a: Iterable[int], n_qubits: int) -> Bipartition:
        a = set(part_a)
        return cls(tuple(a), tuple(q for q in range(n_qubits) if q not in a))

    @classmethod
    def parse(cls, text: str) -> Bipartition:
        """``"1234|5"`` with 1-based qubit labels, one digit per qubit."""
        left, _, right = text.partition("|")
        try:
            return cls(tuple(int(c) - 1 for c in left), tuple(int(c) - 1 for c in right))
        except ValueError:
            raise QcoreError(f"malformed cut {text!r}") from None

    def label(self) -> str:
        one = lambda part: "".join(str(q + 1) for q in part)  # noqa: E731
        return f"{one(self.part_a)}|{one(self.part_b)}"


def entropy(rho: DensityOperator) -> float:
    """Von Neumann entropy in bits."""
    m = rho.elems
    if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12:
        raise QcoreError("entropy of a non-Hermitian operator")
    lam = np.linalg.eigvalsh(m)
    lam = np.where((lam < 0) & (lam > -EIG_CLAMP), 0.0, lam)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam))) + 0.0


def bipartition_entropy(state: Ket, cut: Bipartition) -> float:
    return entropy(reduced_density(state, cut.part_a))


def distance_from_mixed(rho: DensityOperator) -> float:
    """Trace distance ``||rho - I/d||_1 / 2``."""
    d = rho.dim
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho.elems - np.eye(d) / d))))


@dataclass
class MixednessEntry:
    keep: tuple[int, ...]
    distance: float
    entropy: float
    purity: float
    maximally_mixed: bool


def mixedness_scan(state: Ket, atol: float = MIXED_ATOL) -> list[MixednessEntry]:
    """Every nonempty kept subset: distance of its reduced operator from ``I/2^k``."""
    n = state.n_qubits
    out = []
    for k in range(1, n + 1):
        for keep in combinations(range(n), k):
            rho = reduced_density(state, keep)
            dist = distance_from_mixed(rho)
            out.append(MixednessEntry(keep, dist, entropy(rho), rho.purity(), dist <= atol))
    return out


def partial_transpose(rho: DensityOperator, sys: Iterable[int]) -> np.ndarray:
    n = rho.n_qubits
    t = rho.elems.reshape((2,) * (2 * n))
    perm = list(range(2 * n))
    for q in sys:
        perm[q], perm[n + q] = n + q, q
    return t.transpose(perm).reshape(rho.dim, rho.dim)


def negativity(state: Ket | DensityOperator, cut: Bipartition) -> float:
    """``(||rho^{T_A}||_1 - 1) / 2``, zero for PPT states."""
    rho = state.projector() if isinstance(state, Ket) else state
    lam = np.linalg.eigvalsh(partial_transpose(rho, cut.part_a))
    return max(0.0, float((np.sum(np.abs(lam)) - 1) / 2))


def all_cuts(n: int) -> list[Bipartition]:
    """Each unordered cut once, the side containing qubit 0 listed first."""
    cuts = []
    for k in range(1, n):
        for a in combinations(range(n), k):
            if 0 in a:
                cuts.append(Bipartition.of(a, n))
    return cuts


@dataclass
class EntanglementReport:
    entropies: dict[str, float] = field(default_factory=dict)
    negativities: dict[str, float] = field(default_factory=dict)
    mixedness: list[MixednessEntry] = field(default_factory=list)


def entanglement_report(state: Ket) -> EntanglementReport:
    n = state.n_qubits
    rep = EntanglementReport(mixedness=mixedness_scan(state))
    for cut in all_cuts(n):
        rep.entropies[cut.label()] = bipartition_entropy(state, cut)
        rep.negativities[cut.label()] = negativity(state, cut)
    return rep
