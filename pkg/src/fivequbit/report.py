"""Full verification run and its JSON/text rendering."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import serialize
from .entanglement import Bipartition, bipartition_entropy, entanglement_report, negativity
from .qcore import Ket, apply_word, fidelity
from .sdc import audit_printed_codewords, build_codeword_table, capacity, decode
from .states import (
    DiscrepancyReport,
    derive_single_basis,
    derive_two_qubit_basis,
    diff_against_printed,
    load_fixture,
    psi5,
    random_input,
)
from .teleport import (
    exact_outcomes,
    printed_correction_table,
    single_correction_table,
    verify_correction_table,
)

DEFAULT_SEED = 2009
DEFAULT_TRIALS = 100
NPT_FLOOR = 1e-6

# default tolerance per check family
TOL_ALGEBRA = 1e-12
TOL_BASIS = 1e-10
TOL_PROTOCOL = 1e-9


@dataclass
class Check:
    name: str
    value: float | int | bool
    expected: float | int | bool | str
    residual: float
    tol: float | None
    passed: bool

    def to_dict(self) -> dict:
        val = self.value if isinstance(self.value, (bool, int, str)) else serialize.real(self.value)
        return {
            "name": self.name,
            "value": val,
            "expected": self.expected,
            "residual": serialize.real(self.residual),
            "tol": self.tol,
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    seed: int
    tol: float | None
    checks: list[Check] = field(default_factory=list)
    sections: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def numeric(self, name, value, expected, default_tol):
        tol = self.tol if self.tol is not None else default_tol
        residual = abs(value - expected)
        self.checks.append(Check(name, value, expected, residual, tol, bool(residual <= tol)))

    def condition(self, name, ok: bool, value, expected):
        self.checks.append(Check(name, value, expected, 0.0 if ok else 1.0, None, bool(ok)))

    def to_dict(self) -> dict:
        return {
            "schema_version": serialize.SCHEMA_VERSION,
            "command": "verify",
            "seed": self.seed,
            "tol": self.tol,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            **self.sections,
        }


def discrepancy_dict(rep: DiscrepancyReport) -> dict:
    return {
        "source": rep.source,
        "rows": len(rep.rows),
        "matched": rep.n_match,
        "flagged": len(rep.flagged),
        "extra": {k: (serialize.real(v) if isinstance(v, float) else v) for k, v in rep.extra.items()},
        "entries": [
            {
                "label": r.label,
                "status": r.status,
                "overlap": serialize.real(r.overlap),
                "matched": r.matched,
                "phase": serialize.cpair(r.phase),
                "note": r.note,
                "diffs": [
                    {"bits": d.bits, "kind": d.kind,
                     "derived": serialize.cpair(d.derived), "printed": serialize.cpair(d.printed)}
                    for d in r.diffs
                ],
                "corrected": serialize.terms(r.corrected),
            }
            for r in rep.rows
        ],
    }


def correction_audit_dict(rows) -> list[dict]:
    return [
        {"label": a.label, "printed": a.printed, "recovers": a.recovers,
         "sign": a.sign, "correct_word": a.correct_word}
        for a in rows
    ]


def teleport_residuals(psi_in: Ket, table) -> tuple[float, float]:
    """Worst ``|p_k - 1/D|`` and ``|F_k - 1|`` over every outcome, computed exactly."""
    n_in = psi_in.n_qubits
    probs, bob = exact_outcomes(psi_in)
    d = len(probs)
    worst_p = float(np.max(np.abs(probs - 1 / d)))
    worst_f = 0.0
    for k in range(d):
        pre = Ket(bob[k] / math.sqrt(probs[k]), n_in)
        out = apply_word(pre, table.word(k), list(range(n_in)))
        worst_f = max(worst_f, abs(fidelity(out, psi_in) - 1))
    return worst_p, worst_f


def run_verification(seed: int = DEFAULT_SEED, tol: float | None = None,
                     trials: int = DEFAULT_TRIALS) -> VerificationReport:
    rep = VerificationReport(seed=seed, tol=tol)
    psi = psi5()

    # channel state
    mags = np.abs(psi.amps[np.abs(psi.amps) > 1e-12])
    rep.numeric("psi5.norm", psi.norm(), 1.0, TOL_ALGEBRA)
    rep.condition("psi5.nonzero_terms", len(mags) == 8, int(len(mags)), 8)
    rep.numeric("psi5.term_magnitude", float(np.max(np.abs(mags - 1 / (2 * math.sqrt(2))))),
                0.0, TOL_ALGEBRA)

    # entanglement
    ent = entanglement_report(psi)
    for label, expected in (("1234|5", 1.0), ("123|45", 2.0)):
        rep.numeric(f"entropy.{label}", bipartition_entropy(psi, Bipartition.parse(label)),
                    expected, TOL_PROTOCOL)
    for q in range(5):
        cut = Bipartition.of([q], 5)
        val = negativity(psi, cut)
        rep.condition(f"negativity.{cut.label()}", val > NPT_FLOOR, serialize.real(val),
                      f"> {NPT_FLOOR:g}")
    scan = {e.keep: e for e in ent.mixedness}
    for keep in ((4,), (3, 4)):
        lab = "".join(str(q + 1) for q in keep)
        rep.numeric(f"mixedness.keep_{lab}", scan[keep].distance, 0.0, TOL_PROTOCOL)
    rep.sections["entanglement"] = {
        "entropies": {k: serialize.real(v) for k, v in ent.entropies.items()},
        "negativities": {k: serialize.real(v) for k, v in ent.negativities.items()},
        "mixedness": [
            {"keep": [q + 1 for q in e.keep], "distance": serialize.real(e.distance),
             "entropy": serialize.real(e.entropy), "purity": serialize.real(e.purity),
             "maximally_mixed": e.maximally_mixed}
            for e in ent.mixedness
        ],
    }

    # bases and audits
    single, two = derive_single_basis(), derive_two_qubit_basis()
    rep.numeric("basis.single.gram", single.orthonormality_defect(), 0.0, TOL_BASIS)
    rep.numeric("basis.two.gram", two.orthonormality_defect(), 0.0, TOL_BASIS)
    audits = {
        "single_basis": diff_against_printed(single, load_fixture("single_basis")),
        "two_qubit_basis": diff_against_printed(two, load_fixture("two_qubit_basis")),
        "codewords": audit_printed_codewords(),
    }
    for name, a in audits.items():
        total = len(load_fixture(name).rows)
        classified = sum(r.status in ("match", "typo") for r in a.rows)
        rep.condition(f"audit.{name}.classified", classified == total, classified, total)
    t1 = verify_correction_table(printed_correction_table())
    rep.condition("audit.two_qubit_corrections.classified",
                  all(a.recovers or a.correct_word for a in t1), len(t1), 16)
    rep.sections["audits"] = {k: discrepancy_dict(v) for k, v in audits.items()}
    rep.sections["audits"]["two_qubit_corrections"] = correction_audit_dict(t1)
    rep.sections["bases"] = {
        "single": {"labels": list(single.labels), "gram_defect": serialize.real(single.orthonormality_defect()),
                   "states": [serialize.terms(s.terms()) for s in single.states]},
        "two": {"labels": list(two.labels), "gram_defect": serialize.real(two.orthonormality_defect()),
                "states": [serialize.terms(s.terms()) for s in two.states]},
    }

    # teleportation over seeded random inputs, every outcome evaluated
    rng = np.random.default_rng(seed)
    stats = {}
    for n_in, table in ((1, single_correction_table()), (2, printed_correction_table())):
        worst_p = worst_f = 0.0
        for _ in range(trials):
            p, f = teleport_residuals(random_input(n_in, rng), table)
            worst_p, worst_f = max(worst_p, p), max(worst_f, f)
        name = "single" if n_in == 1 else "two"
        rep.numeric(f"teleport.{name}.probability", worst_p, 0.0, TOL_PROTOCOL)
        rep.numeric(f"teleport.{name}.fidelity", worst_f, 0.0, TOL_PROTOCOL)
        stats[name] = {"trials": trials, "max_probability_residual": serialize.real(worst_p),
                       "max_fidelity_residual": serialize.real(worst_f)}
    rep.sections["teleport"] = stats

    # superdense coding
    table = build_codeword_table()
    gram = table.gram()
    rep.condition("sdc.codewords", len(table) == 32, len(table), 32)
    rep.numeric("sdc.gram", float(np.max(np.abs(gram - np.eye(len(gram))))), 0.0, TOL_BASIS)
    ok = 0
    for e in table.entries:
        phase = np.exp(2j * np.pi * rng.random())
        ok += decode(e.state.scaled(phase), table) == e.message
    rep.condition("sdc.roundtrip", ok == 32, ok, 32)
    cap = capacity(psi, [0, 1, 2])
    rep.numeric("sdc.capacity", cap.x, 5.0, TOL_PROTOCOL)
    rep.sections["capacity"] = capacity_dict(cap)
    return rep


def capacity_dict(cap) -> dict:
    return {"d_A": cap.d_a, "log2_d_A": serialize.real(cap.log_d_a), "S_B": serialize.real(cap.s_b),
            "S_AB": serialize.real(cap.s_ab), "X": serialize.real(cap.x),
            "decomposition": cap.decomposition()}


def render_text(rep: VerificationReport) -> str:
    lines = []
    for c in rep.checks:
        mark = "PASS" if c.passed else "FAIL"
        tol = f"tol={c.tol:.0e}" if c.tol is not None else "condition"
        lines.append(f"{mark}  {c.name:<32} value={c.value!s:<24} residual={c.residual:.3e}  {tol}")
    ent = rep.sections.get("entanglement", {})
    if ent:
        lines.append("")
        lines.append("entropies (bits): " + ", ".join(f"{k}={v:.6g}" for k, v in ent["entropies"].items()))
    for name, a in rep.sections.get("audits", {}).items():
        if name == "two_qubit_corrections":
            bad = [r["label"] for r in a if not r["recovers"]]
            lines.append(f"audit two_qubit_corrections: {len(a) - len(bad)}/{len(a)} printed corrections recover the input")
        else:
            flagged = ", ".join(e["label"] for e in a["entries"] if e["status"] != "match") or "none"
            lines.append(f"audit {name}: {a['matched']}/{a['rows']} rows match; flagged: {flagged}")
    cap = rep.sections.get("capacity")
    if cap:
        lines.append(f"capacity: X = {cap['decomposition']}")
    lines.append(f"overall: {'PASS' if rep.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"
