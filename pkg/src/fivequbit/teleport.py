"""Single- and two-qubit teleportation through the five-qubit channel.

Register layout: input qubits first, then channel qubits 1..5. Alice measures
the first five positions; Bob keeps the rest (qubit 5, or qubits 4 and 5).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import serialize
from .qcore import (
    Ket,
    PauliWord,
    QcoreError,
    all_words,
    apply_word,
    fidelity,
    kron,
    measure,
    reduced_density,
)
from .states import (
    SINGLE_LABELS,
    TWO_LABELS,
    bob_branches,
    derive_single_basis,
    derive_two_qubit_basis,
    load_fixture,
    psi5,
    single_branches,
    two_qubit_branches,
)

FIDELITY_ATOL = 1e-9
NORM_ATOL = 1e-12
ALICE = (0, 1, 2, 3, 4)

# Bob's fix-ups read off the four single-qubit branches
SINGLE_CORRECTIONS = {"a1+": "I", "a1-": "Z", "a2+": "X", "a2-": "iY"}


class TeleportError(RuntimeError):
    """A protocol invariant (fidelity or outcome weight) was violated."""


@dataclass(frozen=True)
class CorrectionRow:
    label: str
    word: PauliWord
    branch: np.ndarray  # input ket -> Bob's pre-correction ket


@dataclass(frozen=True)
class CorrectionTable:
    rows: tuple[CorrectionRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def word(self, outcome: int) -> PauliWord:
        return self.rows[outcome].word


def single_correction_table() -> CorrectionTable:
    rows = tuple(
        CorrectionRow(lab, PauliWord((SINGLE_CORRECTIONS[lab],)), v)
        for lab, v in zip(SINGLE_LABELS, single_branches())
    )
    return CorrectionTable(rows)


def printed_correction_table() -> CorrectionTable:
    """Two-qubit corrections exactly as printed."""
    fx = load_fixture("two_qubit_corrections")
    rows = tuple(
        CorrectionRow(r["label"], PauliWord(tuple(r["word"])), v)
        for r, v in zip(fx.rows, two_qubit_branches())
    )
    return CorrectionTable(rows)


def recovery_sign(word: PauliWord, branch: np.ndarray) -> int | None:
    """+1/-1 if ``word`` undoes ``branch`` up to that sign on every input, else None."""
    prod = word.matrix() @ branch
    eye = np.eye(len(prod))
    for s in (1, -1):
        if np.allclose(prod, s * eye, atol=1e-12, rtol=0):
            return s
    return None


def _weight(word: PauliWord) -> int:
    return sum(c != "I" for c in word.letters)


def minimal_correction(branch: np.ndarray) -> PauliWord | None:
    """Fewest non-identity letters first, then canonical order."""
    k = int(round(math.log2(len(branch))))
    for w in sorted(all_words(k), key=_weight):
        if recovery_sign(w, branch) is not None:
            return w
    return None


@dataclass
class CorrectionAudit:
    label: str
    printed: str
    recovers: bool
    sign: int | None
    correct_word: str | None


def verify_correction_table(table: CorrectionTable) -> list[CorrectionAudit]:
    """Check every row's word against its branch on all canonical inputs."""
    out = []
    for row in table.rows:
        sign = recovery_sign(row.word, row.branch)
        fix = None
        if sign is None:
            w = minimal_correction(row.branch)
            fix = str(w) if w is not None else None
        out.append(CorrectionAudit(row.label, str(row.word), sign is not None, sign, fix))
    return out


@dataclass
class Transcript:
    protocol: str
    input: np.ndarray
    rand: float
    outcome: int
    label: str
    bits: str
    correction: str
    bob_pre_correction: np.ndarray
    output: np.ndarray
    fidelity: float
    probability: float
    probabilities: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "input": serialize.cvec(self.input),
            "rand": self.rand,
            "outcome": self.outcome,
            "label": self.label,
            "bits": self.bits,
            "correction": self.correction,
            "bob_pre_correction": serialize.cvec(self.bob_pre_correction),
            "output": serialize.cvec(self.output),
            "fidelity": serialize.real(self.fidelity),
            "probability": serialize.real(self.probability),
            "probabilities": [serialize.real(p) for p in self.probabilities],
        }


def as_input(amps, n_qubits: int) -> Ket:
    ket = amps if isinstance(amps, Ket) else Ket(np.asarray(amps, dtype=complex), n_qubits)
    if ket.n_qubits != n_qubits:
        raise QcoreError(f"expected a {n_qubits}-qubit input, got {ket.n_qubits}")
    if abs(ket.norm() - 1) > NORM_ATOL:
        raise QcoreError(f"input norm {ket.norm():.15g} is not 1")
    return ket


def _protocol(name: str, n_in: int, psi_in: Ket, rand: float, basis, table) -> Transcript:
    joint = kron(psi_in, psi5())
    res = measure(joint, basis, ALICE, rand)
    d = len(basis)
    if abs(res.probability - 1 / d) > FIDELITY_ATOL:
        raise TeleportError(f"outcome {res.label} has probability {res.probability}, not 1/{d}")
    word = table.word(res.outcome)
    out = apply_word(res.post_state, word, list(range(n_in)))
    fid = fidelity(out, psi_in)
    if abs(fid - 1) > FIDELITY_ATOL:
        raise TeleportError(f"fidelity {fid} after outcome {res.label}")
    return Transcript(
        protocol=name,
        input=psi_in.amps,
        rand=float(rand),
        outcome=res.outcome,
        label=res.label,
        bits=format(res.outcome, f"0{math.ceil(math.log2(d))}b"),
        correction=str(word),
        bob_pre_correction=res.post_state.amps,
        output=out.amps,
        fidelity=min(fid, 1.0),
        probability=res.probability,
        probabilities=res.probabilities,
    )


def teleport_single(amps, rand: float) -> Transcript:
    """Teleport ``alpha|0> + beta|1>`` from Alice to Bob's qubit 5."""
    psi_in = as_input(amps, 1)
    return _protocol("single", 1, psi_in, rand, derive_single_basis(), single_correction_table())


def teleport_two(amps, rand: float, table: CorrectionTable | None = None) -> Transcript:
    """Teleport a two-qubit state, amplitudes ordered ``(alpha, gamma, mu, beta)``
    on ``|00>, |01>, |10>, |11>``, to Bob's qubits 4 and 5."""
    psi_in = as_input(amps, 2)
    table = table or printed_correction_table()
    return _protocol("two", 2, psi_in, rand, derive_two_qubit_basis(), table)


def exact_outcomes(psi_in: Ket) -> tuple[np.ndarray, np.ndarray]:
    """Analytic outcome probabilities and Bob's unnormalized branches."""
    n_in = psi_in.n_qubits
    basis = derive_single_basis() if n_in == 1 else derive_two_qubit_basis()
    bob = bob_branches(kron(psi_in, psi5()), basis, n_in)
    return np.sum(np.abs(bob) ** 2, axis=1), bob


def bob_marginal(psi_in: Ket) -> np.ndarray:
    """Bob's reduced operator before any classical message arrives."""
    n_in = psi_in.n_qubits
    joint = kron(psi_in, psi5())
    return reduced_density(joint, range(joint.n_qubits - n_in, joint.n_qubits)).elems


def outcome_labels(n_in: int) -> tuple[str, ...]:
    return SINGLE_LABELS if n_in == 1 else TWO_LABELS
