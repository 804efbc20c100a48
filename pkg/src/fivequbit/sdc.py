"""Superdense coding of five classical bits through Alice's qubits 1-3."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import serialize
from .entanglement import entropy
from .qcore import Ket, PauliWord, QcoreError, all_words, apply_word, inner, reduced_density
from .states import DiscrepancyReport, TableFixture, audit_row, load_fixture, psi5

ALICE = (0, 1, 2)
N_MESSAGES = 32
ORTHO_ATOL = 1e-10
DECODE_ATOL = 1e-9
NO_MATCH_ATOL = 1e-6


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class Codeword:
    message: int
    word: PauliWord
    state: Ket


@dataclass(frozen=True, eq=False)
class CodewordTable:
    entries: tuple[Codeword, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def gram(self) -> np.ndarray:
        m = np.array([e.state.amps for e in self.entries])
        return m.conj() @ m.T

    def to_dict(self) -> list[dict]:
        return [
            {"message": e.message, "bits": format(e.message, "05b"),
             "word": list(e.word.letters), "amps": serialize.cvec(e.state.amps)}
            for e in self.entries
        ]


def encoded_state(word: PauliWord) -> Ket:
    return apply_word(psi5(), word, ALICE)


def greedy_orthogonal(states: list[Ket], atol: float = ORTHO_ATOL) -> list[int]:
    """Indices kept by a single in-order pass that accepts a state only if it is
    orthogonal to everything accepted so far."""
    kept: list[int] = []
    for i, s in enumerate(states):
        if all(abs(inner(states[j], s)) < atol for j in kept):
            kept.append(i)
    return kept


@lru_cache(maxsize=None)
def build_codeword_table() -> CodewordTable:
    """Greedy orthogonal subset of the 64 words ``{I,X,iY,Z}^3`` on psi5.

    Words are tried in canonical order (``I < X < iY < Z``, rightmost letter
    fastest); messages are numbered in selection order.
    """
    words = all_words(3)
    states = [encoded_state(w) for w in words]
    kept = greedy_orthogonal(states)
    if len(kept) != N_MESSAGES:
        raise AssertionError(f"greedy selection kept {len(kept)} codewords, expected 32")
    return CodewordTable(tuple(Codeword(m, words[i], states[i]) for m, i in enumerate(kept)))


def _check_message(message: int) -> int:
    if not 0 <= int(message) < N_MESSAGES:
        raise QcoreError(f"message {message} outside 0..31")
    return int(message)


def encode(message: int, table: CodewordTable | None = None) -> tuple[PauliWord, Ket]:
    table = table or build_codeword_table()
    entry = table.entries[_check_message(message)]
    return entry.word, entry.state


def decode(state: Ket, table: CodewordTable | None = None) -> int:
    """Message whose codeword overlaps ``state`` with magnitude ~1 (any global phase)."""
    table = table or build_codeword_table()
    overlaps = np.abs([inner(e.state, state) for e in table.entries])
    best = int(np.argmax(overlaps))
    if overlaps[best] >= 1 - DECODE_ATOL:
        return table.entries[best].message
    if overlaps[best] < 1 - NO_MATCH_ATOL:
        raise DecodeError(f"state is not a codeword (best overlap {overlaps[best]:.6f})")
    raise DecodeError(f"ambiguous decode (best overlap {overlaps[best]:.12f})")


@dataclass(frozen=True)
class CapacityReport:
    d_a: int
    s_b: float
    s_ab: float

    @property
    def log_d_a(self) -> float:
        return math.log2(self.d_a)

    @property
    def x(self) -> float:
        return self.log_d_a + self.s_b - self.s_ab

    def decomposition(self) -> str:
        fmt = lambda v: f"{round(v, 9) + 0.0:g}"  # noqa: E731
        return f"{fmt(self.log_d_a)} + {fmt(self.s_b)} - {fmt(self.s_ab)} = {fmt(self.x)}"


def capacity(state: Ket, alice: Iterable[int]) -> CapacityReport:
    """Dense-coding capacity ``log2 d_A + S(rho_B) - S(rho_AB)`` in bits."""
    alice = sorted(set(alice))
    n = state.n_qubits
    if not alice or len(alice) >= n:
        raise QcoreError("alice must be a nonempty proper subset of the register")
    bob = [q for q in range(n) if q not in alice]
    s_b = entropy(reduced_density(state, bob))
    s_ab = entropy(state.projector())
    return CapacityReport(2 ** len(alice), s_b, s_ab)


def audit_printed_codewords(table: CodewordTable | None = None,
                 fixture: TableFixture | None = None) -> DiscrepancyReport:
    """Apply each printed word to psi5 and diff against the printed state.

    Also reports whether the printed words give 32 mutually orthogonal states
    and which canonical message (if any) each printed row corresponds to.
    """
    table = table or build_codeword_table()
    fixture = fixture or load_fixture("codewords")
    lookup = [(w, encoded_state(w)) for w in all_words(3)]
    rows = []
    applied = []
    for row in fixture.rows:
        word = PauliWord(tuple(row["word"]))
        truth = encoded_state(word)
        applied.append(truth)
        audit = audit_row(row["label"], fixture.row_ket(row), [(str(word), truth)])
        msg = [e.message for e in table.entries if abs(inner(e.state, truth)) >= 1 - DECODE_ATOL]
        audit.note = f"message {msg[0]}" if msg else "no canonical message"
        if audit.status != "match":
            printed = fixture.row_ket(row).normalize()
            hits = [str(w) for w, k in lookup if abs(inner(k, printed)) >= 1 - DECODE_ATOL]
            audit.note += "; printed state is " + (f"{hits[0]} applied to psi5" if hits
                                                   else "not any word applied to psi5")
        rows.append(audit)

    words = [tuple(r["word"]) for r in fixture.rows]
    dupes = sorted({" ".join(w) for w in words if words.count(w) > 1})
    kept = greedy_orthogonal(applied)
    m = np.array([s.amps for s in applied])
    gram_defect = float(np.max(np.abs(m.conj() @ m.T - np.eye(len(m)))))
    extra = {
        "printed_words_orthogonal": gram_defect <= ORTHO_ATOL,
        "printed_words_gram_defect": gram_defect,
        "printed_words_independent_count": len(kept),
        "duplicate_printed_words": dupes,
    }
    return DiscrepancyReport(fixture.source, rows, extra)
