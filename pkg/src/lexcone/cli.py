"""Command-line front end.

Subcommands:
    lclep            solve an instance file (JSON) to a solution file (JSONL)
    psd              build and solve an interaction-type problem
    sample           witness sampling only
    verify           re-check a solution file line by line
    residual-export  candidates minus witnessed, as inequality systems

Exit codes: 0 ok, 1 verification failure, 2 malformed input, 3 infeasible
or cyclic structure, 4 unsupported mode for the type.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import lclep as lc
from . import psd as ps
from . import sampler as sp
from .exact_lp import RationalVector
from .order import CyclicRefinement, LinearExtension, is_linear_extension

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_UNSUPPORTED = 4


def _write_atomic(path: str, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_manifest(path: str, payload: dict) -> None:
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _manifest_base(args: argparse.Namespace, command: str) -> dict:
    return {
        "command": command,
        "argv": sys.argv[1:],
        "started_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }


# ---------------------------------------------------------------------------
# lclep
# ---------------------------------------------------------------------------


def _solution_text(pairs, witnesses: bool) -> str:
    lines = [
        lc.solution_line(word, wit if witnesses else None) for word, wit in pairs
    ]
    return "".join(line + "\n" for line in lines)


def cmd_lclep(args) -> int:
    try:
        inst = lc.load_instance(args.instance)
    except CyclicRefinement as exc:
        print(f"error: cyclic order data: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    out_path = args.output or f"{args.instance}.solutions.jsonl"
    manifest = _manifest_base(args, "lclep")
    manifest.update(
        {
            "instance": os.path.abspath(args.instance),
            "witnesses": bool(args.witnesses),
            "prefix_depth": args.prefix_depth,
            "jobs": args.jobs,
            "checkpoint": args.checkpoint,
            "resume": args.resume,
            "output": os.path.abspath(out_path),
        }
    )
    t0 = time.time()

    produced: list = []
    if args.resume:
        try:
            with open(args.resume, "r", encoding="utf-8") as fh:
                ckpt = json.load(fh)
            pending = [tuple(int(x) for x in w) for w in ckpt["pending"]]
            produced = [
                (tuple(int(x) for x in w), None if wit is None else RationalVector(
                    [Fraction(v) for v in wit]
                ))
                for w, wit in ckpt.get("emitted", [])
            ]
        except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
            print(f"error: bad checkpoint: {exc}", file=sys.stderr)
            return EXIT_INPUT
        for prefix in pending:
            solver = lc.Solver(inst, args.witnesses)
            produced.extend(
                (w, RationalVector(x) if x is not None else None)
                for w, x in solver.run(prefix)
            )
    elif args.prefix_depth:
        prefixes = lc.generate_prefixes(inst, args.prefix_depth)
        if not prefixes:
            produced = []
        else:
            sols = lc.solve_partitioned(inst, prefixes, args.witnesses, jobs=args.jobs)
            produced = [
                (e.perm, sols.witnesses[e.perm] if args.witnesses else None)
                for e in sols.extensions
            ]
    else:
        solver = lc.Solver(inst, args.witnesses)
        last_ckpt = time.time()
        run = solver.run()
        while True:
            try:
                word, wit = next(run)
            except StopIteration:
                break
            produced.append(
                (word, RationalVector(wit) if wit is not None else None)
            )
            if args.checkpoint and time.time() - last_ckpt >= args.checkpoint_every:
                _write_checkpoint(args.checkpoint, solver, produced)
                last_ckpt = time.time()

    produced.sort(key=lambda p: p[0])
    if args.count:
        print(len(produced))
    else:
        _write_atomic(out_path, _solution_text(produced, args.witnesses))
    if args.checkpoint and os.path.exists(args.checkpoint):
        os.remove(args.checkpoint)
    manifest["count"] = len(produced)
    manifest["elapsed_s"] = round(time.time() - t0, 3)
    _write_manifest(f"{out_path}.manifest.json", manifest)
    return EXIT_OK


def _write_checkpoint(path: str, solver: lc.Solver, produced) -> None:
    payload = {
        "version": 1,
        "pending": [list(w) for w in solver.pending_words()],
        "emitted": [
            [list(w), None if wit is None else [str(v) for v in wit.entries]]
            for w, wit in produced
        ],
    }
    _write_atomic(path, json.dumps(payload, separators=(",", ":")) + "\n")


# ---------------------------------------------------------------------------
# psd / sample
# ---------------------------------------------------------------------------


def _parse_type(text: str) -> ps.InteractionType:
    return ps.InteractionType.parse(text)


def cmd_psd(args) -> int:
    try:
        itype = _parse_type(args.type)
    except ps.WrongType as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    mode = args.mode
    prefix = args.output or f"psd-{itype}-{mode}".replace(",", "_")
    t0 = time.time()
    try:
        report = ps.solve_psd(
            itype,
            mode,
            emit_witnesses=args.witnesses,
            sample_count=args.samples,
            seed=args.seed,
            radius=args.radius,
            bootstrap=args.bootstrap,
            jobs=args.jobs,
        )
    except ps.UnsupportedMode as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except CyclicRefinement as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE

    outputs = {}
    sols = report.solutions or report.candidates
    if not args.count and sols is not None:
        pairs = [
            (
                e.perm,
                sols.witnesses.get(e.perm) if sols.witnesses else None,
            )
            for e in sols.extensions
        ]
        path = f"{prefix}.solutions.jsonl"
        _write_atomic(path, _solution_text(pairs, args.witnesses))
        outputs["solutions"] = os.path.abspath(path)
    if report.sample_report is not None and not args.count:
        pairs = [
            (
                w,
                RationalVector(
                    tuple(report.sample_report.first_witness[w].ell.entries)
                    + tuple(report.sample_report.first_witness[w].delta.entries)
                ),
            )
            for w in sorted(report.sample_report.witnessed)
        ]
        path = f"{prefix}.witnessed.jsonl"
        _write_atomic(path, _solution_text(pairs, True))
        outputs["witnessed"] = os.path.abspath(path)
    if report.residual is not None and not args.count:
        path = f"{prefix}.residual.txt"
        sp.export_residual(ps.build_psd(itype), report.residual, path)
        outputs["residual"] = os.path.abspath(path)

    summary = report.summary()
    path = f"{prefix}.summary.json"
    _write_atomic(path, json.dumps(summary, indent=2) + "\n")
    outputs["summary"] = os.path.abspath(path)

    manifest = _manifest_base(args, "psd")
    manifest.update(
        {
            "type": str(itype),
            "mode": mode,
            "seed": args.seed,
            "samples": args.samples,
            "radius": args.radius,
            "jobs": args.jobs,
            "witnesses": bool(args.witnesses),
            "bootstrap": bool(args.bootstrap),
            "outputs": outputs,
            "counts": summary,
            "elapsed_s": round(time.time() - t0, 3),
        }
    )
    _write_manifest(f"{prefix}.manifest.json", manifest)
    print(json.dumps(summary))
    return EXIT_OK


def cmd_sample(args) -> int:
    try:
        itype = _parse_type(args.type)
    except ps.WrongType as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    inst = ps.build_psd(itype)
    cfg = sp.SampleConfig(radius=args.radius, sample_count=args.samples, seed=args.seed)
    t0 = time.time()
    report = sp.sample(inst, cfg, jobs=args.jobs)
    out_path = args.output or f"sample-{itype}".replace(",", "_") + ".witnessed.jsonl"
    pairs = [
        (
            w,
            RationalVector(
                tuple(report.first_witness[w].ell.entries)
                + tuple(report.first_witness[w].delta.entries)
            ),
        )
        for w in sorted(report.witnessed)
    ]
    if args.count:
        print(len(pairs))
    else:
        _write_atomic(out_path, _solution_text(pairs, True))
    manifest = _manifest_base(args, "sample")
    manifest.update(
        {
            "type": str(itype),
            "seed": args.seed,
            "samples": args.samples,
            "radius": args.radius,
            "jobs": args.jobs,
            "output": os.path.abspath(out_path),
            "witnessed": len(report.witnessed),
            "tie_discards": report.tie_discards,
            "drawn": report.drawn,
            "elapsed_s": round(time.time() - t0, 3),
        }
    )
    _write_manifest(f"{out_path}.manifest.json", manifest)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _verify_instance_for(args):
    if args.instance:
        return lc.load_instance(args.instance), None
    itype = _parse_type(args.type)
    mode = args.mode
    if mode == "exact-special":
        return ps.exact_instance(itype), itype
    lin = ps.linearize(ps.build_psd(itype))
    if mode == "linearized-plain":
        return lin.to_lclep(), itype
    if mode == "linearized-constrained":
        return lin.to_lclep(ps.quad_constraints(itype)), itype
    raise ps.UnsupportedMode(f"mode {mode!r} has no verification instance")


def cmd_verify(args) -> int:
    try:
        inst, itype = _verify_instance_for(args)
        records = lc.read_solution_lines(args.solutions)
    except ps.UnsupportedMode as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (OSError, ValueError, json.JSONDecodeError, ps.WrongType) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    psd_inst = ps.build_psd(itype) if itype is not None else None
    for lineno, (word, witness) in enumerate(records, start=1):
        label = f"line {lineno} sigma={list(word)}"
        if sorted(word) != list(range(inst.size)):
            print(f"FAIL {label}: not a permutation of 0..{inst.size - 1}")
            return EXIT_VERIFY
        if not is_linear_extension(LinearExtension(word), inst.po):
            print(f"FAIL {label}: violates the partial order")
            return EXIT_VERIFY
        if witness is not None and psd_inst is not None and witness.dim == 2 * itype.n:
            n = itype.n
            try:
                point = ps.ParameterPoint(witness.entries[:n], witness.entries[n:])
            except ps.NonPositiveParameter as exc:
                print(f"FAIL {label}: {exc}")
                return EXIT_VERIFY
            values = [psd_inst.value(i, point) for i in word]
            if not all(a < b for a, b in zip(values, values[1:])):
                print(f"FAIL {label}: witness does not realise the order")
                return EXIT_VERIFY
            continue
        if witness is not None:
            if witness.dim != inst.dim:
                print(f"FAIL {label}: witness dimension {witness.dim} != {inst.dim}")
                return EXIT_VERIFY
            ok = all(f(witness) > 0 for f in inst.domain_forms)
            values = [inst.forms[i](witness) for i in word]
            ok = ok and all(a < b for a, b in zip(values, values[1:]))
            if not ok:
                print(f"FAIL {label}: witness does not realise the order")
                return EXIT_VERIFY
            continue
        res = lc.check_sigma(inst, word)
        if not res.admissible:
            print(f"FAIL {label}: order is not admissible")
            return EXIT_VERIFY
    print(f"OK {len(records)} lines verified")
    return EXIT_OK


# ---------------------------------------------------------------------------
# residual export
# ---------------------------------------------------------------------------


def cmd_residual_export(args) -> int:
    try:
        itype = _parse_type(args.type)
        cand = lc.read_solution_lines(args.candidates)
        witnessed = lc.read_solution_lines(args.witnessed)
    except (OSError, ValueError, json.JSONDecodeError, ps.WrongType) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cand_words = {w for w, _ in cand}
    wit_words = {w for w, _ in witnessed}
    stray = wit_words - cand_words
    if stray:
        print(
            f"error: {len(stray)} witnessed orders outside the candidate set",
            file=sys.stderr,
        )
        return EXIT_VERIFY
    orders = sorted(cand_words - wit_words)
    sp.export_residual(ps.build_psd(itype), orders, args.output)
    print(f"{len(orders)} residual systems written to {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexcone",
        description="exact enumeration of admissible orders of linear and "
        "interaction-product polynomial families",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("lclep", help="solve an instance file")
    p.add_argument("instance")
    p.add_argument("--output")
    p.add_argument("--witnesses", action="store_true")
    p.add_argument("--count", action="store_true")
    p.add_argument("--prefix-depth", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--checkpoint")
    p.add_argument("--checkpoint-every", type=float, default=60.0)
    p.add_argument("--resume")
    p.set_defaults(func=cmd_lclep)

    p = sub.add_parser("psd", help="solve an interaction-type problem")
    p.add_argument("--type", required=True)
    p.add_argument("--mode", choices=ps.MODES, default="exact-special")
    p.add_argument("--output")
    p.add_argument("--witnesses", action="store_true")
    p.add_argument("--count", action="store_true")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--bootstrap", action="store_true")
    p.set_defaults(func=cmd_psd)

    p = sub.add_parser("sample", help="witness sampling only")
    p.add_argument("--type", required=True)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output")
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="re-check a solution file")
    p.add_argument("solutions")
    p.add_argument("--instance")
    p.add_argument("--type")
    p.add_argument("--mode", choices=ps.MODES[:3], default="exact-special")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("residual-export", help="export unresolved orders")
    p.add_argument("--type", required=True)
    p.add_argument("--candidates", required=True)
    p.add_argument("--witnessed", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_residual_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cmd == "verify" and not (args.instance or args.type):
        parser.error("verify needs --instance or --type")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
