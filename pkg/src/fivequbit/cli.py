"""Command-line front end.

Exit status: 0 when every check passes, 1 on a check failure, 2 on a usage
error (bad flags, malformed amplitudes, out-of-range message, unwritable
output path).
"""
from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter

import numpy as np

from . import serialize
from .entanglement import Bipartition, all_cuts, bipartition_entropy, mixedness_scan, negativity
from .qcore import Ket, QcoreError
from .report import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    capacity_dict,
    correction_audit_dict,
    discrepancy_dict,
    run_verification,
    render_text,
)
from .sdc import DecodeError, audit_printed_codewords, build_codeword_table, capacity, decode, encode
from .states import derive_single_basis, derive_two_qubit_basis, diff_against_printed, load_fixture, psi5, random_input
from .teleport import (
    TeleportError,
    exact_outcomes,
    outcome_labels,
    printed_correction_table,
    teleport_single,
    teleport_two,
    verify_correction_table,
)

log = logging.getLogger("fivequbit")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
RENORM_WARN = 1e-6


class UsageError(Exception):
    pass


def parse_amplitudes(text: str) -> np.ndarray:
    """``"re,im;re,im;..."`` -> complex vector; a bare ``re`` means zero imaginary part."""
    out = []
    for chunk in text.split(";"):
        parts = [p.strip() for p in chunk.split(",")]
        if not parts[0] or len(parts) > 2:
            raise UsageError(f"malformed amplitude {chunk!r}; expected 're,im'")
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise UsageError(f"malformed amplitude {chunk!r}") from None
        out.append(complex(vals[0], vals[1] if len(vals) == 2 else 0.0))
    amps = np.array(out, dtype=complex)
    if not np.all(np.isfinite(amps)):
        raise UsageError("amplitudes must be finite")
    return amps


def prepare_input(amps: np.ndarray, n: int) -> Ket:
    if len(amps) != 2**n:
        raise UsageError(f"--n {n} needs {2**n} amplitudes, got {len(amps)}")
    nrm = float(np.linalg.norm(amps))
    if nrm == 0.0:
        raise UsageError("zero vector cannot be teleported")
    if abs(nrm - 1) > RENORM_WARN:
        log.warning("input norm %.6g; normalizing", nrm)
    return Ket(amps / nrm, n)


def _emit(args, payload: dict, text: str) -> None:
    body = serialize.dumps(payload) if args.format == "json" else text
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(body)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(body)


def cmd_verify(args) -> int:
    trials = args.trials if args.trials is not None else DEFAULT_TRIALS
    rep = run_verification(seed=args.seed, tol=args.tol, trials=trials)
    _emit(args, rep.to_dict(), render_text(rep))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_teleport(args) -> int:
    n = args.n
    rng = np.random.default_rng(args.seed)
    fixed = None if args.amps == "random" else prepare_input(parse_amplitudes(args.amps), n)
    run = teleport_single if n == 1 else teleport_two
    trials = args.trials if args.trials is not None else 1
    transcripts, exact = [], np.zeros(2 ** (2 * n))
    for _ in range(trials):
        psi_in = fixed if fixed is not None else random_input(n, rng)
        transcripts.append(run(psi_in, float(rng.random())))
        exact += exact_outcomes(psi_in)[0]
    exact /= max(trials, 1)
    labels = outcome_labels(n)
    counts = Counter(t.outcome for t in transcripts)
    hist = [{"outcome": k, "label": labels[k], "count": counts.get(k, 0),
             "exact_probability": serialize.real(exact[k])} for k in range(len(labels))]
    worst = max(abs(t.fidelity - 1) for t in transcripts)
    payload = {
        "schema_version": serialize.SCHEMA_VERSION,
        "command": "teleport",
        "n": n,
        "seed": args.seed,
        "trials": trials,
        "transcripts": [t.to_dict() for t in transcripts],
        "histogram": hist,
        "passed": worst <= (args.tol or 1e-9),
    }
    lines = [f"trial {i}: outcome {t.label:>3} bits {t.bits} correction {t.correction:<8} "
             f"p={t.probability:.6f} fidelity={t.fidelity:.12f}"
             for i, t in enumerate(transcripts)]
    lines.append("outcome  count  exact_p")
    lines += [f"{h['label']:>7}  {h['count']:>5}  {h['exact_probability']:.6f}" for h in hist]
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK if payload["passed"] else EXIT_FAIL


def _message(args) -> int:
    if args.message is None:
        raise UsageError(f"sdc {args.mode} needs --message")
    if not 0 <= args.message < 32:
        raise UsageError(f"message {args.message} outside 0..31")
    return args.message


def cmd_sdc(args) -> int:
    table = build_codeword_table()
    rng = np.random.default_rng(args.seed)
    payload = {"schema_version": serialize.SCHEMA_VERSION, "command": "sdc", "mode": args.mode}
    ok = True
    if args.mode == "capacity":
        cap = capacity(psi5(), [0, 1, 2])
        payload["capacity"] = capacity_dict(cap)
        ok = abs(cap.x - 5) <= (args.tol or 1e-9)
        text = f"X = {cap.decomposition()}\n"
    elif args.mode == "encode":
        m = _message(args)
        word, state = encode(m, table)
        payload.update(message=m, word=list(word.letters), terms=serialize.terms(state.terms()))
        text = f"message {m:05b} -> {word}\n" + "".join(
            f"  {a.real:+.6f}|{b}>\n" for b, a in state.terms())
    elif args.mode == "decode":
        m = _message(args)
        _, state = encode(m, table)
        phase = np.exp(2j * np.pi * rng.random())
        got = decode(state.scaled(phase), table)
        ok = got == m
        payload.update(message=m, phase=serialize.cpair(phase), decoded=got)
        text = f"encoded {m:05b}, applied phase {np.angle(phase):.6f} rad, decoded {got:05b}\n"
    else:
        results = []
        for e in table.entries:
            phase = np.exp(2j * np.pi * rng.random())
            try:
                got = decode(e.state.scaled(phase), table)
            except DecodeError:
                got = None
            results.append({"message": e.message, "word": list(e.word.letters), "decoded": got})
        n_ok = sum(r["decoded"] == r["message"] for r in results)
        ok = n_ok == len(results)
        payload.update(results=results, success=n_ok, total=len(results))
        text = "".join(f"{r['message']:05b}  {' '.join(r['word']):<10} -> {r['decoded']}\n"
                       for r in results) + f"{n_ok}/{len(results)} round trips succeeded\n"
    payload["passed"] = bool(ok)
    _emit(args, payload, text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_entropy(args) -> int:
    psi = psi5()
    cuts = [Bipartition.parse(c) for c in args.cut] if args.cut else all_cuts(5)
    for cut in cuts:
        if len(cut.part_a) + len(cut.part_b) != 5:
            raise UsageError(f"cut {cut.label()} does not cover qubits 1-5")
    rows = [{"cut": c.label(), "entropy": serialize.real(bipartition_entropy(psi, c)),
             "negativity": serialize.real(negativity(psi, c))} for c in cuts]
    scan = [{"keep": [q + 1 for q in e.keep], "distance": serialize.real(e.distance),
             "entropy": serialize.real(e.entropy), "maximally_mixed": e.maximally_mixed}
            for e in mixedness_scan(psi)]
    payload = {"schema_version": serialize.SCHEMA_VERSION, "command": "entropy",
               "cuts": rows, "mixedness": scan}
    text = "".join(f"{r['cut']:>8}  S={r['entropy']:.9f}  N={r['negativity']:.9f}\n" for r in rows)
    text += "".join(
        f"keep {''.join(map(str, s['keep'])):>5}  S={s['entropy']:.6f}  "
        f"distance={s['distance']:.3e}  {'maximally mixed' if s['maximally_mixed'] else ''}\n"
        for s in scan)
    _emit(args, payload, text)
    return EXIT_OK


def cmd_audit(args) -> int:
    audits = {
        "single_basis": diff_against_printed(derive_single_basis(), load_fixture("single_basis")),
        "two_qubit_basis": diff_against_printed(derive_two_qubit_basis(), load_fixture("two_qubit_basis")),
        "codewords": audit_printed_codewords(),
    }
    t1 = verify_correction_table(printed_correction_table())
    payload = {"schema_version": serialize.SCHEMA_VERSION, "command": "audit-tables",
               **{k: discrepancy_dict(v) for k, v in audits.items()},
               "two_qubit_corrections": correction_audit_dict(t1)}
    lines = []
    for name, rep in audits.items():
        lines.append(f"{name}: {rep.n_match}/{len(rep.rows)} rows match")
        for r in rep.rows:
            extra = f" ({r.note})" if r.note else ""
            lines.append(f"  {r.label:>4} {r.status:<5} overlap={r.overlap:.6f}{extra}")
            for d in r.diffs:
                lines.append(f"         {d.kind:<12} |{d.bits}> derived {d.derived.real:+.4f} "
                             f"printed {d.printed.real:+.4f}")
    lines.append("two_qubit_corrections:")
    lines += [f"  {a.label:>4} {a.printed:<10} {'ok' if a.recovers else 'FAILS -> ' + str(a.correct_word)}"
              for a in t1]
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"seed for random inputs and draws (default {DEFAULT_SEED})")
    p.add_argument("--tol", type=float, default=None,
                   help="override every numeric tolerance")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="fivequbit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run every numerical check")
    p.add_argument("--trials", type=int, default=None,
                   help=f"random inputs per teleport protocol (default {DEFAULT_TRIALS})")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("teleport", parents=[common], help="run teleportation trials")
    p.add_argument("--n", type=int, choices=(1, 2), required=True)
    p.add_argument("--amps", default="random", help='"re,im;re,im" list or "random"')
    p.add_argument("--trials", type=int, default=None)
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("sdc", parents=[common], help="superdense coding")
    p.add_argument("mode", choices=("roundtrip", "encode", "decode", "capacity"))
    p.add_argument("--message", type=int, default=None)
    p.set_defaults(func=cmd_sdc)

    p = sub.add_parser("entropy", parents=[common], help="entropies and negativities of psi5")
    p.add_argument("--cut", action="append", help='cut such as "1234|5" (repeatable)')
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("audit-tables", parents=[common], help="diff printed tables against derivations")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.tol is not None and not args.tol > 0:
        parser.error("--tol must be positive")
    if getattr(args, "trials", None) is not None and args.trials < 1:
        parser.error("--trials must be at least 1")
    try:
        return args.func(args)
    except (UsageError, QcoreError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TeleportError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
