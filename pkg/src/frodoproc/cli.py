"""frodoproc command line: KEM operations, KAT replay, processor simulation.

Exit codes: 0 success, 1 a requested check failed, 2 usage error, 3 I/O error,
4 input of the wrong length, 5 unparsable input file, 6 simulator deadlock.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import kat, kem, report, targets
from .params import ShakeVariant, params_for
from .programs import PHASES, build_program, inputs_from_seed, reference_outputs, simulate
from .isa import disassemble
from .simulator import DeadlockError
from .xof import shake

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO, EXIT_LENGTH, EXIT_PARSE, EXIT_DEADLOCK = range(7)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _seed(text: str | None) -> bytes | None:
    if text is None:
        return None
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise CliError(f"--seed must be hex, got {text!r}", EXIT_USAGE) from None


def _expand(seed: bytes | None, label: bytes, n: int) -> bytes:
    if seed is None:
        return os.urandom(n)
    return shake(ShakeVariant.SHAKE256, b"frodoproc-kem/" + label + b"/" + seed, n)


def _read(path: str | None, what: str) -> bytes:
    if not path:
        raise CliError(f"missing --{what} path", EXIT_USAGE)
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {what} file {path}: {exc.strerror}", EXIT_IO) from None


def _write(files: dict[str, tuple[str | None, bytes]]) -> None:
    for what, (path, data) in files.items():
        if path:
            try:
                Path(path).write_bytes(data)
            except OSError as exc:
                raise CliError(f"cannot write {what} file {path}: {exc.strerror}", EXIT_IO) from None


def _digest(b: bytes) -> str:
    return hashlib.sha256(b).hexdigest()


def _emit(args, summary: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


# ---------------------------------------------------------------------------------

def cmd_kem(args) -> int:
    p = params_for(args.level)
    seed = _seed(args.seed)
    try:
        if args.op == "keygen":
            pair = kem.keygen(_expand(seed, b"keygen", p.keygen_randomness_len), p)
            files = {"pk": (args.pk, pair.pk), "sk": (args.sk, pair.sk)}
            summary = {"pk_sha256": _digest(pair.pk), "sk_sha256": _digest(pair.sk)}
        elif args.op == "encaps":
            pk = _read(args.pk, "pk")
            ct, ss = kem.encaps(pk, _expand(seed, b"encaps", p.encaps_randomness_len), p)
            files = {"ct": (args.ct, ct), "ss": (args.ss, ss)}
            summary = {"ct_sha256": _digest(ct), "ss": ss.hex()}
        else:
            sk, ct = _read(args.sk, "sk"), _read(args.ct, "ct")
            ss = kem.decaps(sk, ct, p)
            files = {"ss": (args.ss, ss)}
            summary = {"ss": ss.hex()}
    except kem.KemLengthError as exc:
        raise CliError(str(exc), EXIT_LENGTH) from None
    _write(files)
    summary.update(level=p.n, op=args.op)
    _emit(args, summary, [f"{k}\t{v}" for k, v in summary.items()])
    return EXIT_OK


def cmd_kat(args) -> int:
    if not args.rsp:
        raise CliError("missing --rsp path", EXIT_USAGE)
    try:
        vectors = kat.load_rsp(args.rsp)
    except OSError as exc:
        raise CliError(f"cannot read {args.rsp}: {exc.strerror}", EXIT_IO) from None
    except (kat.RspParseError, UnicodeDecodeError) as exc:
        raise CliError(f"{args.rsp}: {exc}", EXIT_PARSE) from None
    if args.limit:
        vectors = vectors[:args.limit]
    results = kat.replay(vectors, args.level)
    failed = [r for r in results if not r.passed]
    lines = [f"count={r.count}\t{'PASS' if r.passed else 'FAIL ' + ','.join(r.mismatches)}" for r in results]
    lines.append(f"total\t{len(results)}\tpassed\t{len(results) - len(failed)}\tfailed\t{len(failed)}")
    summary = {"level": args.level, "total": len(results), "passed": len(results) - len(failed),
               "failed": [{"count": r.count, "fields": r.mismatches} for r in failed]}
    _emit(args, summary, lines)
    return EXIT_OK if not failed else EXIT_FAIL


def _run_one(level: int, phase: str, overlap: bool, seed: bytes):
    inputs = inputs_from_seed(level, phase, seed)
    rep, machine = simulate(level, phase, overlap, inputs, keep_machine=True)
    return rep, machine, rep.outputs == reference_outputs(level, phase, inputs)


def _checks_for(level: int, phase: str, reps: dict[bool, object], functional: dict[bool, bool]) -> list[targets.Check]:
    checks = []
    for ov, rep in reps.items():
        checks.append(targets.compare_total(level, phase, ov, rep.total))
        checks.append(targets.Check(f"outputs {level} {phase} overlap={'on' if ov else 'off'} == kem",
                                    float(functional[ov]), 1.0, functional[ov], "bool"))
    if True in reps and False in reps:
        ratio = 100.0 * reps[True].total / reps[False].total
        checks.append(targets.compare_ratio(level, phase, ratio))
        same = reps[True].output_digest == reps[False].output_digest
        checks.append(targets.Check(f"output digest {level} {phase} on == off", float(same), 1.0, same, "bool"))
    if False in reps:
        checks += targets.compare_opcodes(level, phase, reps[False].cycles)
    if True in reps:
        checks += targets.compare_latency(level, phase, reps[True].total / 1e3)
    return checks


def cmd_sim(args) -> int:
    seed = _seed(args.seed) or b"frodoproc-default"
    modes = {"on": [True], "off": [False], "both": [True, False]}[args.overlap]
    reps, func, machines = {}, {}, {}
    try:
        for ov in modes:
            reps[ov], machines[ov], func[ov] = _run_one(args.level, args.phase, ov, seed)
    except DeadlockError as exc:
        blocked = exc.blocked.text() if exc.blocked else "?"
        blocker = exc.blocker.text() if exc.blocker else "?"
        raise CliError(f"simulator deadlock: {exc} [blocked: {blocked}] [blocker: {blocker}]", EXIT_DEADLOCK) from None
    checks = _checks_for(args.level, args.phase, reps, func)
    ordered = [reps[ov] for ov in modes]
    if args.report:
        try:
            report.write(args.report, ordered, checks, trace=machines[modes[0]].trace)
        except OSError as exc:
            raise CliError(f"cannot write report {args.report}: {exc.strerror}", EXIT_IO) from None
    ok = all(c.passed for c in checks)
    summary = {"reports": [r.to_dict() for r in ordered],
               "checks": [{"name": c.name, "value": c.value, "target": c.target, "passed": c.passed} for c in checks],
               "passed": ok, "targets_version": targets.TARGETS_VERSION}
    _emit(args, summary, [report.document(ordered, checks)])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sweep(args) -> int:
    seed = _seed(args.seed) or b"frodoproc-default"
    jobs = [(n, ph, ov) for n in (640, 976, 1344) for ph in PHASES for ov in (True, False)]
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(lambda j: _run_one(*j, seed), jobs))
    reps: dict[tuple[int, str], dict[bool, object]] = {}
    func: dict[tuple[int, str], dict[bool, bool]] = {}
    for (n, ph, ov), (rep, _, ok) in zip(jobs, results):
        reps.setdefault((n, ph), {})[ov] = rep
        func.setdefault((n, ph), {})[ov] = ok
    checks = []
    for key in sorted(reps):
        checks += _checks_for(*key, reps[key], func[key])
    ordered = [r for (_, _, _), (r, _, _) in zip(jobs, results)]
    if args.report:
        totals = {k: (v[True].total, v[False].total) for k, v in reps.items()}
        try:
            report.write(args.report, ordered, checks, totals=totals, targets=targets.OVERLAP_TOTALS)
        except OSError as exc:
            raise CliError(f"cannot write report {args.report}: {exc.strerror}", EXIT_IO) from None
    ok = all(c.passed for c in checks)
    summary = {"checks": [{"name": c.name, "value": c.value, "target": c.target, "passed": c.passed} for c in checks],
               "passed": ok}
    _emit(args, summary, [report.checks_text(checks)])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_disasm(args) -> int:
    print(disassemble(build_program(args.level, args.phase, args.overlap == "on")))
    return EXIT_OK


# ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frodoproc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, level_required=True):
        p.add_argument("--level", type=int, choices=(640, 976, 1344), default=None if level_required else 640,
                       required=level_required)
        p.add_argument("--json", action="store_true", help="machine-readable output")

    k = sub.add_parser("kem", help="run KeyGen / Encaps / Decaps on files")
    k.add_argument("op", choices=("keygen", "encaps", "decaps"))
    common(k)
    k.add_argument("--seed", help="hex seed for deterministic randomness (default: OS entropy)")
    for f in ("pk", "sk", "ct", "ss"):
        k.add_argument(f"--{f}", help=f"{f} file path")
    k.set_defaults(func=cmd_kem)

    t = sub.add_parser("kat", help="replay a NIST-style .rsp file (gzip accepted)")
    common(t)
    t.add_argument("--rsp", required=True)
    t.add_argument("--limit", type=int, default=0, help="only the first N vectors")
    t.set_defaults(func=cmd_kat)

    s = sub.add_parser("sim", help="simulate one phase and compare against reference cycle figures")
    common(s)
    s.add_argument("--phase", choices=PHASES, required=True)
    s.add_argument("--overlap", choices=("on", "off", "both"), default="both")
    s.add_argument("--seed", help="hex seed for the phase inputs")
    s.add_argument("--report", help="write the delimited report here; figures go next to it")
    s.set_defaults(func=cmd_sim)

    w = sub.add_parser("sweep", help="simulate all nine level/phase combinations, both overlap modes")
    w.add_argument("--json", action="store_true")
    w.add_argument("--seed")
    w.add_argument("--report")
    w.add_argument("--jobs", type=int, default=3)
    w.set_defaults(func=cmd_sweep)

    d = sub.add_parser("disasm", help="print a program listing")
    d.add_argument("--level", type=int, choices=(640, 976, 1344), required=True)
    d.add_argument("--phase", choices=PHASES, required=True)
    d.add_argument("--overlap", choices=("on", "off"), default="on")
    d.set_defaults(func=cmd_disasm)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"frodoproc: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
