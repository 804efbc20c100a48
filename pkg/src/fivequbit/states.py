"""Named states, measurement bases derived by contraction, and table audits."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .qcore import (
    Ket,
    MeasurementBasis,
    MeasurementError,
    QcoreError,
    canonical_phase,
    inner,
    kron,
)

BELL_LABELS = ("psi_plus", "psi_minus", "phi_plus", "phi_minus")

# Seeds for the generic inputs used to cross-check each derived basis.
DERIVATION_SEEDS = (1729, 4104)

SINGLE_LABELS = ("a1+", "a1-", "a2+", "a2-")
TWO_LABELS = tuple(str(k) for k in range(1, 17))


class DerivationError(RuntimeError):
    """A derived basis failed orthonormality or reconstruction checks."""


def bell(kind: str) -> Ket:
    """Normalized Bell state, ``psi_± = |00>±|11>`` and ``phi_± = |01>±|10>``."""
    s = 1 / math.sqrt(2)
    table = {
        "psi_plus": (s, 0, 0, s),
        "psi_minus": (s, 0, 0, -s),
        "phi_plus": (0, s, s, 0),
        "phi_minus": (0, s, -s, 0),
    }
    try:
        return Ket(np.array(table[kind], dtype=complex), 2)
    except KeyError:
        raise QcoreError(f"unknown Bell label {kind!r}") from None


@lru_cache(maxsize=None)
def psi5() -> Ket:
    """The asymmetric five-qubit channel state.

    ``(|000>|phi_-> + |010>|psi_-> + |100>|phi_+> + |111>|psi_+>) / 2``
    with normalized Bell factors on qubits 4 and 5.
    """
    amps = np.zeros(32, dtype=complex)
    for head, kind in (("000", "phi_minus"), ("010", "psi_minus"),
                       ("100", "phi_plus"), ("111", "psi_plus")):
        amps += kron(Ket.basis(head), bell(kind)).amps / 2
    return Ket(amps, 5)


# fixtures ------------------------------------------------------------------

@dataclass(frozen=True)
class TableFixture:
    """Transcribed printed table; see ``fixtures/README.md`` for the format."""

    source: str
    rows: tuple[dict, ...]
    qubits: tuple[str, ...] = ()
    inputs: dict = field(default_factory=dict)

    def row_ket(self, row: dict) -> Ket:
        """Expand a printed row into an (unnormalized) ket."""
        acc = None
        for term in row["terms"]:
            ket = Ket(np.ones(1, dtype=complex), 0)
            for part in term["parts"]:
                ket = kron(ket, bell(part) if part in BELL_LABELS else Ket.basis(part))
            vec = term["sign"] * ket.amps
            acc = vec if acc is None else acc + vec
        return Ket(acc)

    def labels(self) -> list[str]:
        return [r["label"] for r in self.rows]


def load_fixture(name: str) -> TableFixture:
    """Load one of ``single_branches``, ``single_basis``, ``two_qubit_basis``, ``two_qubit_corrections``, ``codewords``."""
    path = resources.files("fivequbit") / "fixtures" / f"{name}.json"
    data = json.loads(path.read_text(encoding="utf-8"))
    return TableFixture(
        source=data["source"],
        rows=tuple(data["rows"]),
        qubits=tuple(data.get("qubits", ())),
        inputs=dict(data.get("inputs", {})),
    )


def branch_operator(row: dict, inputs: dict) -> np.ndarray:
    """Matrix taking the input ket to Bob's pre-correction branch."""
    n = len(next(iter(inputs.values())))
    v = np.zeros((2**n, 2**n))
    for t in row["branch"]:
        v[int(t["bits"], 2), int(inputs[t["amp"]], 2)] += t["sign"]
    return v


def is_signed_permutation(v: np.ndarray) -> bool:
    nz = np.abs(v) > 0
    return (
        bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1))
        and bool(np.all(np.isin(v[nz], (-1.0, 1.0))))
    )


@lru_cache(maxsize=None)
def single_branches() -> tuple[np.ndarray, ...]:
    fx = load_fixture("single_branches")
    return tuple(branch_operator(r, fx.inputs) for r in fx.rows)


@lru_cache(maxsize=None)
def two_qubit_branches() -> tuple[np.ndarray, ...]:
    fx = load_fixture("two_qubit_corrections")
    return tuple(branch_operator(r, fx.inputs) for r in fx.rows)


# derivation ----------------------------------------------------------------

def random_input(n_qubits: int, rng: np.random.Generator) -> Ket:
    """Haar-like random pure state from normalized complex Gaussians."""
    d = 2**n_qubits
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    return Ket(z, n_qubits).normalize()


def channel_operator(n_in: int) -> np.ndarray:
    """``T[A, b, i]``: amplitude of Alice index A, Bob index b in ``|i> ⊗ psi5``.

    Alice holds the input qubits plus the first ``5 - n_in`` channel qubits,
    Bob the last ``n_in``.
    """
    d_in = 2**n_in
    psi = psi5().amps
    cols = [np.kron(np.eye(d_in)[i], psi).reshape(-1, d_in) for i in range(d_in)]
    return np.stack(cols, axis=2)


def bob_branches(state: Ket, basis: MeasurementBasis, n_bob: int) -> np.ndarray:
    """Bob's unnormalized conditional states, one row per basis element."""
    m = state.amps.reshape(-1, 2**n_bob)
    return basis.matrix().conj() @ m


def _derive(branches, labels, n_in: int) -> MeasurementBasis:
    t = channel_operator(n_in)
    d = len(branches)
    states = []
    for v in branches:
        # Hilbert-Schmidt contraction over Bob's qubits and the input index
        m = np.einsum("abi,bi->a", t, v.conj())
        nrm = np.linalg.norm(m)
        if nrm < 1e-12:
            raise DerivationError("branch has no support in the channel state")
        states.append(canonical_phase(Ket(m / nrm, 5)))
    try:
        basis = MeasurementBasis(tuple(states), tuple(labels))
    except MeasurementError as exc:
        raise DerivationError(str(exc)) from exc

    for seed in DERIVATION_SEEDS:
        psi_in = random_input(n_in, np.random.default_rng(seed))
        joint = kron(psi_in, psi5())
        bob = bob_branches(joint, basis, n_in)
        weights = np.sum(np.abs(bob) ** 2, axis=1)
        if abs(weights.sum() - 1) > 1e-10:
            raise DerivationError(f"basis misses {1 - weights.sum():.3g} of the joint state")
        for k, v in enumerate(branches):
            target = v @ psi_in.amps
            overlap = abs(np.vdot(target, bob[k])) ** 2 / (weights[k] * np.vdot(target, target).real)
            if abs(weights[k] - 1 / d) > 1e-10 or abs(overlap - 1) > 1e-10:
                raise DerivationError(f"branch {labels[k]} does not reproduce its pattern")
    return basis


@lru_cache(maxsize=None)
def derive_single_basis() -> MeasurementBasis:
    """Four-outcome basis on qubits (a,1,2,3,4) for single-qubit teleportation.

    Each element is the contraction of ``|i> ⊗ psi5`` against the conjugated
    branch operator over Bob's qubit 5 and the input index, normalized. Two
    seeded random inputs then confirm that projecting onto element k leaves
    Bob with exactly that branch, at weight 1/4.
    """
    return _derive(single_branches(), SINGLE_LABELS, 1)


@lru_cache(maxsize=None)
def derive_two_qubit_basis() -> MeasurementBasis:
    """Sixteen-outcome basis on qubits (a1,a2,1,2,3), one element per printed correction branch."""
    bad = branch_table_defects(two_qubit_branches())
    if bad:
        raise DerivationError("; ".join(bad))
    return _derive(two_qubit_branches(), TWO_LABELS, 2)


def branch_table_defects(branches) -> list[str]:
    """Problems that would make a branch table unusable for perfect teleportation."""
    out = []
    for k, v in enumerate(branches):
        if not is_signed_permutation(v):
            out.append(f"row {k + 1} is not a signed permutation")
    for j in range(len(branches)):
        for k in range(j + 1, len(branches)):
            if abs(np.trace(branches[j].T @ branches[k])) > 1e-12:
                out.append(f"rows {j + 1} and {k + 1} are not distinguishable")
    return out


# audits --------------------------------------------------------------------

@dataclass
class TermDiff:
    bits: str
    kind: str  # missing | extra | sign_flipped | magnitude
    derived: complex
    printed: complex


@dataclass
class RowAudit:
    label: str
    status: str  # match | typo
    overlap: float
    matched: str | None
    phase: complex
    diffs: list[TermDiff] = field(default_factory=list)
    corrected: list[tuple[str, complex]] = field(default_factory=list)
    note: str = ""


@dataclass
class DiscrepancyReport:
    source: str
    rows: list[RowAudit]
    extra: dict = field(default_factory=dict)

    @property
    def flagged(self) -> list[RowAudit]:
        return [r for r in self.rows if r.status != "match"]

    @property
    def n_match(self) -> int:
        return sum(r.status == "match" for r in self.rows)


MATCH_ATOL = 1e-9


def term_diff(derived: Ket, printed: Ket, atol: float = MATCH_ATOL) -> tuple[complex, list[TermDiff]]:
    """Align ``printed`` to ``derived`` by a global phase and list differing terms.

    Both kets are normalized first. Returns the phase applied to ``printed``.
    """
    d = derived.normalize().amps
    p_ket = printed.normalize() if printed.norm() > 0 else printed
    ov = inner(p_ket, derived)
    phase = ov / abs(ov) if abs(ov) > atol else 1.0 + 0j
    p = p_ket.amps * phase
    diffs = []
    for i in range(len(d)):
        a, b = d[i], p[i]
        if abs(a - b) <= atol:
            continue
        bits = format(i, f"0{derived.n_qubits}b")
        if abs(b) <= atol:
            kind = "missing"
        elif abs(a) <= atol:
            kind = "extra"
        elif abs(a + b) <= atol:
            kind = "sign_flipped"
        else:
            kind = "magnitude"
        diffs.append(TermDiff(bits, kind, complex(a), complex(b)))
    return complex(phase), diffs


def audit_row(label: str, printed: Ket, candidates: list[tuple[str, Ket]]) -> RowAudit:
    """Compare one printed row against the best-overlapping candidate ket.

    Ties go to the candidate carrying the row's own label.
    """
    if printed.norm() == 0:
        name, ket = candidates[0]
        return RowAudit(label, "typo", 0.0, None, 1 + 0j, [], ket.terms(),
                        "printed terms cancel to zero")
    p = printed.normalize()
    overlaps = [abs(inner(k, p)) for _, k in candidates]
    best = int(np.argmax(overlaps))
    names = [n for n, _ in candidates]
    if label in names and overlaps[names.index(label)] >= overlaps[best] - 1e-12:
        best = names.index(label)
    name, ket = candidates[best]
    phase, diffs = term_diff(ket, p)
    ok = overlaps[best] >= 1 - MATCH_ATOL
    return RowAudit(
        label=label,
        status="match" if ok else "typo",
        overlap=float(overlaps[best]),
        matched=name,
        phase=phase,
        diffs=[] if ok else diffs,
        corrected=[] if ok else ket.terms(),
    )


def diff_against_printed(derived: MeasurementBasis, fixture: TableFixture) -> DiscrepancyReport:
    """Audit a printed basis table against a derived basis.

    Every fixture row is matched to the derived element with the largest
    overlap; rows below ``1 - 1e-9`` are flagged with a term-level diff and the
    derived state as the correction.
    """
    if len(fixture.rows) != len(derived):
        raise QcoreError(
            f"{fixture.source} has {len(fixture.rows)} rows, basis has {len(derived)}"
        )
    cands = list(zip(derived.labels, derived.states))
    rows = []
    for row in fixture.rows:
        printed = fixture.row_ket(row)
        if printed.n_qubits != derived.n_qubits:
            raise QcoreError(f"{fixture.source} row {row['label']} has wrong qubit count")
        audit = audit_row(row["label"], printed, cands)
        if audit.status == "match" and audit.matched != row["label"]:
            audit.note = f"matches derived element {audit.matched}"
        rows.append(audit)
    matched = [r.matched for r in rows if r.status == "match"]
    extra = {"distinct_matches": len(set(matched))}
    return DiscrepancyReport(fixture.source, rows, extra)
