"""Dense linear algebra over small qubit registers.

Amplitude index ``i`` of an ``n``-qubit :class:`Ket` is read as a big-endian
bit-string: qubit position 0 is the most significant bit. All qubit positions
in this module are 0-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 12

ATOL = 1e-12
PROTOCOL_ATOL = 1e-9


class QcoreError(ValueError):
    """Base error for invalid register operations."""


class CapacityError(QcoreError):
    pass


class DimensionError(QcoreError):
    pass


class MeasurementError(QcoreError):
    pass


def _as_amps(values) -> np.ndarray:
    amps = np.array(values, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(amps)):
        raise QcoreError("amplitudes must be finite")
    amps.setflags(write=False)
    return amps


@dataclass(frozen=True, eq=False)
class Ket:
    """Pure state on ``n_qubits`` qubits.

    The amplitude buffer is read-only; operations return new kets.
    """

    amps: np.ndarray
    n_qubits: int = field(default=-1)

    def __post_init__(self):
        amps = _as_amps(self.amps)
        n = self.n_qubits
        if n < 0:
            n = int(round(math.log2(len(amps)))) if len(amps) else -1
        if n < 0 or len(amps) != 2**n:
            raise DimensionError(f"{len(amps)} amplitudes is not a power of two")
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def basis(cls, bits: str) -> Ket:
        """Computational basis state, e.g. ``Ket.basis("00001")``."""
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2) if bits else 0] = 1.0
        return cls(amps, len(bits))

    @property
    def dim(self) -> int:
        return len(self.amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> Ket:
        nrm = self.norm()
        if nrm == 0.0:
            raise QcoreError("cannot normalize the zero vector")
        return Ket(self.amps / nrm, self.n_qubits)

    def scaled(self, factor: complex) -> Ket:
        return Ket(self.amps * factor, self.n_qubits)

    def projector(self) -> DensityOperator:
        return DensityOperator(np.outer(self.amps, self.amps.conj()), self.n_qubits)

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.n_qubits)

    def terms(self, atol: float = 1e-12) -> list[tuple[str, complex]]:
        """Nonzero computational terms as ``(bitstring, amplitude)`` pairs."""
        return [
            (format(i, f"0{self.n_qubits}b") if self.n_qubits else "", complex(a))
            for i, a in enumerate(self.amps)
            if abs(a) > atol
        ]

    def __repr__(self) -> str:
        return f"Ket(n_qubits={self.n_qubits}, terms={len(self.terms())})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix on ``n_qubits`` qubits."""

    elems: np.ndarray
    n_qubits: int = field(default=-1)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.array(self.elems, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError("density operator must be square")
        n = self.n_qubits
        if n < 0:
            n = int(round(math.log2(m.shape[0])))
        if m.shape[0] != 2**n:
            raise DimensionError(f"dimension {m.shape[0]} does not match {n} qubits")
        if not np.all(np.isfinite(m)):
            raise QcoreError("matrix entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "elems", m)
        object.__setattr__(self, "n_qubits", n)
        if self.check:
            self.validate()

    def validate(self, atol: float = ATOL, eig_floor: float = -1e-10) -> None:
        m = self.elems
        if np.max(np.abs(m - m.conj().T), initial=0.0) > atol:
            raise QcoreError("density operator is not Hermitian")
        if abs(np.trace(m) - 1.0) > atol:
            raise QcoreError(f"trace {np.trace(m).real:.3g} differs from 1")
        if np.min(np.linalg.eigvalsh(m)) < eig_floor:
            raise QcoreError("density operator has a negative eigenvalue")

    @property
    def dim(self) -> int:
        return self.elems.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.elems)

    def purity(self) -> float:
        return float(np.real(np.trace(self.elems @ self.elems)))


# single-qubit alphabet; "iY" is i*sigma_y, real valued
LETTERS: dict[str, np.ndarray] = {
    "I": np.array([[1, 0], [0, 1]], dtype=float),
    "X": np.array([[0, 1], [1, 0]], dtype=float),
    "iY": np.array([[0, 1], [-1, 0]], dtype=float),
    "Z": np.array([[1, 0], [0, -1]], dtype=float),
}
LETTER_ORDER = ("I", "X", "iY", "Z")

_ALIASES = {
    "i": "I", "1": "I", "id": "I",
    "x": "X", "s1": "X", "sigma1": "X", "σ1": "X",
    "iy": "iY", "is2": "iY", "isigma2": "iY", "iσ2": "iY",
    "z": "Z", "s3": "Z", "sigma3": "Z", "σ3": "Z",
}
_PAPER_SYMBOL = {"I": "I", "X": "σ1", "iY": "iσ2", "Z": "σ3"}


def parse_letter(token: str) -> str:
    tok = token.strip()
    if tok in LETTERS:
        return tok
    try:
        return _ALIASES[tok.lower()]
    except KeyError:
        raise QcoreError(f"unknown Pauli letter {token!r}") from None


@dataclass(frozen=True)
class PauliWord:
    """Tensor product of letters from ``{I, X, iY, Z}``."""

    letters: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(parse_letter(c) for c in self.letters))

    @classmethod
    def parse(cls, text: str) -> PauliWord:
        """Parse ``"X,iY,I"``, ``"X iY I"`` or ``"σ1⊗iσ2⊗I"``."""
        for sep in ("⊗", ",", "."):
            text = text.replace(sep, " ")
        return cls(tuple(text.split()))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return "⊗".join(_PAPER_SYMBOL[c] for c in self.letters)

    def matrix(self) -> np.ndarray:
        out = np.ones((1, 1))
        for c in self.letters:
            out = np.kron(out, LETTERS[c])
        return out


def all_words(k: int) -> list[PauliWord]:
    """Every length-``k`` word, ``I < X < iY < Z``, rightmost letter fastest."""
    from itertools import product

    return [PauliWord(p) for p in product(LETTER_ORDER, repeat=k)]


def kron(a: Ket, b: Ket, max_qubits: int = MAX_QUBITS) -> Ket:
    n = a.n_qubits + b.n_qubits
    if n > max_qubits:
        raise CapacityError(f"{n} qubits exceeds the {max_qubits}-qubit guard")
    return Ket(np.kron(a.amps, b.amps), n)


def inner(a: Ket, b: Ket) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"inner product of {a.n_qubits}- and {b.n_qubits}-qubit kets")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: Ket, b: Ket) -> float:
    """Squared overlap of two normalized kets; insensitive to global phase."""
    return abs(inner(a, b)) ** 2


def _check_targets(n: int, targets: Sequence[int]) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise QcoreError(f"duplicate target qubits {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise QcoreError(f"qubit {t} out of range for a {n}-qubit register")
    return targets


def apply_matrix(state: Ket, matrix: np.ndarray, targets: Sequence[int]) -> Ket:
    """Apply a ``2^k x 2^k`` operator to the listed qubits (in that order)."""
    targets = _check_targets(state.n_qubits, targets)
    k = len(targets)
    if matrix.shape != (2**k, 2**k):
        raise DimensionError(f"operator shape {matrix.shape} does not act on {k} qubits")
    psi = state.tensor()
    op = np.asarray(matrix).reshape((2,) * (2 * k))
    psi = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), targets))
    # tensordot puts the new target axes first; move them back
    psi = np.moveaxis(psi, list(range(k)), targets)
    return Ket(psi.reshape(-1), state.n_qubits)


def apply_word(state: Ket, word: PauliWord, targets: Sequence[int]) -> Ket:
    if len(word) != len(targets):
        raise QcoreError(f"word of length {len(word)} given {len(targets)} targets")
    targets = _check_targets(state.n_qubits, targets)
    out = state
    for letter, t in zip(word.letters, targets):
        if letter != "I":
            out = apply_matrix(out, LETTERS[letter], [t])
    return out


def _split(n: int, keep: Iterable[int]) -> tuple[list[int], list[int]]:
    keep = sorted({int(q) for q in keep})
    if not keep:
        raise QcoreError("keep set must be nonempty")
    _check_targets(n, keep)
    rest = [q for q in range(n) if q not in keep]
    return keep, rest


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Trace out every qubit not in ``keep``; kept qubits stay in ascending order."""
    n = rho.n_qubits
    keep, rest = _split(n, keep)
    t = rho.elems.reshape((2,) * (2 * n))
    perm = keep + rest + [n + q for q in keep] + [n + q for q in rest]
    dk, dr = 2 ** len(keep), 2 ** len(rest)
    t = t.transpose(perm).reshape(dk, dr, dk, dr)
    return DensityOperator(np.einsum("ajbj->ab", t), len(keep), check=False)


def reduced_density(state: Ket, keep: Iterable[int]) -> DensityOperator:
    """Reduced operator of a pure state, without forming the full projector."""
    n = state.n_qubits
    keep, rest = _split(n, keep)
    m = state.tensor().transpose(keep + rest).reshape(2 ** len(keep), 2 ** len(rest))
    return DensityOperator(m @ m.conj().T, len(keep), check=False)


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Ordered orthonormal kets used as a projective measurement.

    ``states`` need not span the whole space; see :func:`measure`.
    """

    states: tuple[Ket, ...]
    labels: tuple[str, ...] = ()
    atol: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise QcoreError("empty measurement basis")
        labels = tuple(self.labels) or tuple(str(i) for i in range(len(states)))
        if len(labels) != len(states):
            raise QcoreError("one label per basis state required")
        if len({s.n_qubits for s in states}) != 1:
            raise DimensionError("basis states act on different qubit counts")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "labels", labels)
        dev = self.orthonormality_defect()
        if dev > self.atol:
            raise MeasurementError(f"basis is not orthonormal (Gram defect {dev:.3g})")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def n_qubits(self) -> int:
        return self.states[0].n_qubits

    def matrix(self) -> np.ndarray:
        """Rows are the basis kets."""
        return np.array([s.amps for s in self.states])

    def gram(self) -> np.ndarray:
        m = self.matrix()
        return m.conj() @ m.T

    def orthonormality_defect(self) -> float:
        g = self.gram()
        return float(np.max(np.abs(g - np.eye(len(g)))))

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True, eq=False)
class MeasurementResult:
    outcome: int
    label: str
    probability: float
    post_state: Ket
    probabilities: np.ndarray


def outcome_branches(
    state: Ket, basis: MeasurementBasis, on: Sequence[int]
) -> np.ndarray:
    """Unnormalized residual vectors ``<b_k|_on |state>``, one row per basis element."""
    on = _check_targets(state.n_qubits, on)
    if len(on) != basis.n_qubits:
        raise DimensionError(f"basis acts on {basis.n_qubits} qubits, {len(on)} given")
    rest = [q for q in range(state.n_qubits) if q not in on]
    m = state.tensor().transpose(on + rest).reshape(2 ** len(on), 2 ** len(rest))
    return basis.matrix().conj() @ m


def measure(
    state: Ket,
    basis: MeasurementBasis,
    on: Sequence[int],
    rand: float,
    prob_atol: float = 1e-6,
) -> MeasurementResult:
    """Projective measurement of qubits ``on`` with an explicit uniform draw.

    The outcome is picked by inverse CDF: the first ``k`` with
    ``rand < p_0 + ... + p_k``. The residual state on the unmeasured qubits
    (in ascending order) is renormalized.
    """
    if not 0.0 <= rand < 1.0:
        raise QcoreError(f"rand={rand} outside [0, 1)")
    if basis.orthonormality_defect() > basis.atol:
        raise MeasurementError("basis is not orthonormal")
    branches = outcome_branches(state, basis, on)
    probs = np.sum(np.abs(branches) ** 2, axis=1)
    total = float(probs.sum())
    if abs(total - 1.0) > prob_atol:
        raise MeasurementError(
            f"outcome probabilities sum to {total:.9f}; basis does not cover the state"
        )
    cdf = np.cumsum(probs) / total
    k = int(np.searchsorted(cdf, rand, side="right"))
    if k >= len(probs):
        k = int(np.flatnonzero(probs)[-1])
    n_rest = state.n_qubits - len(on)
    post = Ket(branches[k] / math.sqrt(probs[k]), n_rest)
    probs.setflags(write=False)
    return MeasurementResult(k, basis.labels[k], float(probs[k]), post, probs)


def canonical_phase(state: Ket, atol: float = 1e-12) -> Ket:
    """Rotate the global phase so the first nonzero amplitude is real positive."""
    nz = np.flatnonzero(np.abs(state.amps) > atol)
    if not len(nz):
        return state
    a = state.amps[nz[0]]
    return Ket(state.amps * (abs(a) / a), state.n_qubits)
