"""Command-line driver: experiments, gadget demonstrations, audits.

Every command reads its bit source from ``--seed``, ``--hex`` or
``--bits-file``, prints (or writes to ``--out``) a JSON document with
sorted keys, and exits nonzero with a JSON error object on failure.
Options may also come from a JSON ``--config`` file; flags on the
command line take precedence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .brownian import path_enclosure, path_max, phi_reduction_transducer, greater_nat
from .cantor import BitStream, CylinderUnion
from .choice import bound_to_lay_transducer, kol_padding_gadget
from .dyadic import pow2
from .hitting import (avoid_set_gadget, block_encode, hit_clopen,
                      hit_closed_mindchange, hit_open)
from .limits import (HarmonicGadget, alternating_tail_bound, birkhoff_average, birkhoff_transducer,
                     birkhoff_verify, exceeds_lil_margin, harmonic_partial, lil_table, lil_transducer,
                     lil_verify, reaches_deviation, sum_apr, targets_from_bound, walk_sums)
from .mltests import DilutionTest, FiniteMLTest, audit_test, k_deficiency_upper, lay_exclusions
from .oracles import run_checks
from .rigor import Precision
from .transducer import OpenNatSet

GADGETS = ("lay", "kol", "phi", "lil", "birkhoff", "harmonic", "hitting-open", "hitting-closed")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# shared plumbing


def bit_source(args) -> BitStream:
    if args.hex is not None:
        return BitStream.from_hex(args.hex, tail=BitStream.constant(0))
    if args.bits_file is not None:
        return BitStream.from_file(args.bits_file, tail=BitStream.constant(0))
    return BitStream.from_seed(args.seed)


def source_label(args) -> str:
    if args.hex is not None:
        return f"hex:{args.hex}"
    if args.bits_file is not None:
        return f"file:{args.bits_file}"
    return f"seed:{args.seed}"


def digest(bits: str) -> str:
    return hashlib.sha256(bits.encode()).hexdigest()


def parse_set(text: Optional[str]) -> OpenNatSet:
    if not text:
        return OpenNatSet()
    try:
        return OpenNatSet(tuple(int(x) for x in text.split(",") if x.strip()))
    except ValueError as exc:
        raise UsageError(f"--bound-set expects comma-separated naturals, got {text!r}") from exc


def dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def report(operator: str, args, bits: str, parameters: dict, events: list, verdict: dict) -> dict:
    return {"operator": operator, "input": source_label(args), "input_digest": digest(bits),
            "parameters": parameters, "events": events, "verdict": verdict}


# ---------------------------------------------------------------------------
# commands


def cmd_brownian_path(args) -> str:
    p = bit_source(args)
    h0_offset = args.h0_offset

    def policy(d):
        return pow2(-(d + h0_offset))

    P = path_enclosure(p, args.grid, args.stage, args.layer_bound, Precision(args.precision), policy)
    if args.format == "csv":
        return P.to_csv()
    if args.format == "svg":
        return P.to_svg()
    doc = {
        "grid_level": P.grid_level, "stage": P.stage_used, "layer_bound": P.layer_bound,
        "policy": f"h0(d) = 2^-(d+{h0_offset}); policy, not theorem",
        "values": [{"t": str(t), "lo": str(v.lo), "hi": str(v.hi)} for t, v in P.values],
        "tube_radius": None if P.tube_radius is None else [str(P.tube_radius.lo), str(P.tube_radius.hi)],
    }
    if P.tube_radius is not None:
        m = path_max(P)
        doc["path_max"] = [str(m.lo), str(m.hi)]
        doc["greater_nat"] = greater_nat(m)
    return dump(doc)


def cmd_lil_run(args) -> str:
    bits = bit_source(args).prefix(args.horizon)
    if args.format == "csv":
        return lil_table(bits, args.n_min, args.horizon)
    v = lil_verify(bits, args.n_min, args.horizon)
    sums = walk_sums(bits)
    events = [] if v.holds else [{"n": v.at, "S_n": sums[v.at]}]
    return dump(report("lil", args, bits, {"N": args.n_min, "horizon": args.horizon}, events, v.as_dict()))


def cmd_birkhoff_run(args) -> str:
    bits = bit_source(args).prefix(args.horizon + 1)
    if args.format == "csv":
        rows = ["n,average,deviation"]
        for n in range(args.n_min, args.horizon + 1):
            a = birkhoff_average(bits, n)
            rows.append(f"{n},{a},{abs(a - Fraction(1, 2))}")
        return "\r\n".join(rows) + "\r\n"
    v = birkhoff_verify(bits, args.k, args.n_min, args.horizon)
    events = [] if v.holds else [{"n": v.at, "average": str(birkhoff_average(bits, v.at))}]
    return dump(report("birkhoff", args, bits, {"k": args.k, "N": args.n_min, "horizon": args.horizon},
                       events, v.as_dict()))


def cmd_harmonic_run(args) -> str:
    p = bit_source(args)
    bits = p.prefix(args.terms)
    checkpoints = sorted({n for n in (1, 10, 100, 1000, 10_000, args.terms) if n <= args.terms})
    partials = [(n, harmonic_partial(bits, n).sum) for n in checkpoints]
    if args.format == "csv":
        rows = ["N,partial_float,partial_exact"] + [f"{n},{float(s)!r},{s}" for n, s in partials]
        return "\r\n".join(rows) + "\r\n"
    tail = None
    if args.alternating_tail:
        if bits != ("01" * args.terms)[:args.terms]:
            raise UsageError("--alternating-tail needs the source 0101... (signs +,-,+,...)")
        tail = alternating_tail_bound(args.terms)
    answer = sum_apr(bits, Fraction(args.q), args.k, args.terms, tail)
    events = [{"N": n, "partial": str(s), "partial_float": float(s)} for n, s in partials]
    verdict = {"sum_apr": "unknown" if answer is None else answer}
    return dump(report("harmonic", args, bits, {"terms": args.terms, "q": args.q, "k": args.k},
                       events, verdict))


def cmd_hitting_demo(args) -> str:
    p = bit_source(args)
    words = tuple(w for w in (args.words or "").split(",") if w) or ("11",)
    U = CylinderUnion(words)
    h = hit_open(p, U, args.fuel)
    members = parse_set(args.bound_set).denoted() or {1}
    b = max(1, max(members))
    bc = block_encode(b, members, p)
    hb = hit_open(bc.q, bc.V, args.fuel)
    avoid = avoid_set_gadget(p, range(args.avoid_n + 1))
    stream = hit_closed_mindchange(p, avoid.A, args.fuel)
    doc = {
        "hit_open": {"words": list(words), **h.as_dict()},
        "block_encode": {**bc.export(), "members": sorted(members), "hit": hb.n, "decoded": bc.decode(hb.n)},
        "avoid_set": avoid.as_dict(),
        "mind_change": json.loads(stream.to_json()),
        "clopen": {"words": list(words), "n": hit_clopen(p, U, args.fuel)
                   if len({len(w) for w in words}) == 1 else None},
    }
    return dump(doc)


def _check_tail(tr, p: BitStream, span: int = 256) -> bool:
    N, M = tr.tail_alignment()
    return tr.output.bits(N, N + span) == p.bits(M, M + span)


def run_gadget(which: str, I: OpenNatSet, p: BitStream, fuel: int, prec: Precision) -> dict:
    top = max(I.denoted(), default=None)
    if which == "lay":
        red = bound_to_lay_transducer(I, p)
        verdict = lay_exclusions(red.output, fuel=fuel)
        ok = I.denoted() <= set(verdict.excluded) and (top is None or verdict.candidate_rd > top)
        return {"trace": red.trace.events, "tail_ok": _check_tail(red.transducer, p),
                "layers": verdict.as_dict(), "answer": red.decode(verdict), "pass": ok}
    if which == "kol":
        red = kol_padding_gadget(I, p)
        N, _ = red.transducer.tail_alignment()
        d = k_deficiency_upper(red.output.prefix(N))
        ok = top is None or d > top
        return {"trace": red.trace.events, "tail_ok": _check_tail(red.transducer, p),
                "deficiency_upper": d, "answer": red.decode(d), "pass": ok}
    if which == "phi":
        red = phi_reduction_transducer(I, p, prec=prec)
        red.transducer.settle()
        answer = red.readout(prec)
        ok = top is None or answer > top
        return {"trace": red.trace.events, "tail_ok": _check_tail(red.transducer, p),
                "certificates": [c.as_dict() for c in red.certificates], "answer": answer, "pass": ok}
    if which in ("lil", "birkhoff"):
        tr = lil_transducer(I, p) if which == "lil" else birkhoff_transducer(I, p, 2)
        checks = []
        for ins in tr.insertions():
            end = ins["out_pos"] + ins["length"]
            bits = tr.output.prefix(end)
            if which == "lil":
                n = end
                good = n > ins["consumed"] and exceeds_lil_margin(walk_sums(bits)[n], n)
            else:
                n = end - 1
                good = n >= ins["consumed"] and reaches_deviation(bits.count("1"), end, 2)
            checks.append({"N": ins["consumed"], "violation_at": n, "certified": good})
        return {"trace": tr.trace.events, "tail_ok": _check_tail(tr, p), "checks": checks,
                "pass": all(c["certified"] for c in checks)}
    if which == "harmonic":
        g = HarmonicGadget(p, targets_from_bound(I)).run(max(2000, fuel // 5))
        ok = all(t.increase_lo > 1 and t.exact_increase() > 1 for t in g.triggers)
        return {"trace": g.trace.events, "hamming_distance": g.hamming_distance,
                "triggers": len(g.triggers), "pass": ok}
    if which == "hitting-open":
        members = I.denoted()
        if not members:
            raise UsageError("hitting-open needs a nonempty --bound-set")
        bc = block_encode(max(1, top), members, p)
        h = hit_open(bc.q, bc.V, fuel)
        return {**bc.export(), "hit": h.as_dict(), "answer": bc.decode(h.n) if h.found else None,
                "pass": h.found and bc.decode(h.n) == min(members)}
    if which == "hitting-closed":
        g = avoid_set_gadget(p, I)
        stream = hit_closed_mindchange(p, g.A, fuel)
        wit_ok = all(g.A.excluded_by(p, v) is not None for v in g.witnesses)
        brute = next((n for n in range(fuel) if g.A.excluded_by(p, n) is None), None)
        ok = wit_ok and g.measure_lower > 0 and stream.stable and stream.final_claim == brute
        return {**g.as_dict(), "mind_change": json.loads(stream.to_json()), "brute_force": brute, "pass": ok}
    raise UsageError(f"unknown gadget {which!r}")


def cmd_gadget_run(args) -> str:
    p = bit_source(args)
    doc = run_gadget(args.which, parse_set(args.bound_set), p, args.fuel, Precision(args.precision))
    doc.update({"gadget": args.which, "bound_set": args.bound_set or "", "input": source_label(args)})
    return dump(doc)


def cmd_test_audit(args) -> str:
    if args.test_file:
        T = FiniteMLTest.from_json(Path(args.test_file).read_text())
    else:
        T = DilutionTest()
    rep = audit_test(T, args.depth, args.max_len, strict=False)
    if args.format == "csv":
        rows = ["level,measure,bound,pass"] + [
            f"{a.level},{a.measure},{a.bound},{'PASS' if a.ok else 'FAIL'}" for a in rep.levels]
        return "\r\n".join(rows) + "\r\n"
    return dump(json.loads(rep.to_json()))


def cmd_oracle_suite(args) -> str:
    rows = run_checks()
    if args.format == "csv":
        return "\r\n".join(["check,result"] + [f"\"{r['check']}\",{'PASS' if r['pass'] else 'FAIL'}"
                                               for r in rows]) + "\r\n"
    return dump({"checks": rows, "pass": all(r["pass"] for r in rows)})


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--seed", type=int, default=0, help="u64 seed for the SHA-256 bit generator")
    src.add_argument("--hex", help="bit source as hex digits (most significant bit first), zeros after")
    src.add_argument("--bits-file", help="bit source read from a binary file, zeros after")
    common.add_argument("--fuel", type=int, default=10_000)
    common.add_argument("--precision", type=int, default=40, help="fractional bits for enclosures")
    common.add_argument("--out", help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    common.add_argument("--config", help="JSON file of option defaults")

    parser = _Parser(prog="layerwise", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("brownian-path", parents=[common], help="certified Brownian path enclosure")
    sp.add_argument("--grid", type=int, default=5)
    sp.add_argument("--stage", type=int, default=7)
    sp.add_argument("--layer-bound", type=int, default=None)
    sp.add_argument("--h0-offset", type=int, default=10, help="tube policy h0(d) = 2^-(d+offset)")
    sp.set_defaults(func=cmd_brownian_path)

    sp = sub.add_parser("lil-run", parents=[common], help="iterated-logarithm bound on a prefix")
    sp.add_argument("--n-min", type=int, default=4)
    sp.add_argument("--horizon", type=int, default=1000)
    sp.set_defaults(func=cmd_lil_run)

    sp = sub.add_parser("birkhoff-run", parents=[common], help="ergodic averages on a prefix")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--n-min", type=int, default=16)
    sp.add_argument("--horizon", type=int, default=1000)
    sp.set_defaults(func=cmd_birkhoff_run)

    sp = sub.add_parser("harmonic-run", parents=[common], help="random harmonic series partial sums")
    sp.add_argument("--terms", type=int, default=1000)
    sp.add_argument("--q", default="0", help="rational threshold for the approximation query")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--alternating-tail", action="store_true",
                    help="bound the remainder as an alternating series (source must be 0101...)")
    sp.set_defaults(func=cmd_harmonic_run)

    sp = sub.add_parser("hitting-demo", parents=[common], help="open, closed and clopen hitting times")
    sp.add_argument("--words", help="comma-separated target words (default 11)")
    sp.add_argument("--bound-set", help="members for the block coding (default 1)")
    sp.add_argument("--avoid-n", type=int, default=3)
    sp.set_defaults(func=cmd_hitting_demo)

    sp = sub.add_parser("gadget-run", parents=[common], help="run a reduction transducer and verify it")
    sp.add_argument("--which", choices=GADGETS, required=True)
    sp.add_argument("--bound-set", default="", help="comma-separated enumeration, e.g. 0,1,2")
    sp.set_defaults(func=cmd_gadget_run)

    sp = sub.add_parser("test-audit", parents=[common], help="exact measure audit of a test")
    sp.add_argument("--depth", type=int, default=10)
    sp.add_argument("--max-len", type=int, default=10)
    sp.add_argument("--test-file", help="JSON finite test (default: the dilution test)")
    sp.set_defaults(func=cmd_test_audit)

    sp = sub.add_parser("oracle-suite", parents=[common], help="independent oracle checks of the examples")
    sp.set_defaults(func=cmd_oracle_suite)
    return parser


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(config, dict):
            raise UsageError("config must be a JSON object")
        # config values become defaults; flags given on the command line win
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(k.replace("-", "_") for k in config) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in config.items()})
        args = parser.parse_args(argv)
    return args


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        if args.seed < 0 or args.seed >= 1 << 64:
            raise UsageError("--seed must be a u64")
        text = args.func(args)
        emit(args, text)
        if text.lstrip().startswith("{"):
            doc = json.loads(text)
            if doc.get("pass") is False:
                return 1
        return 0
    except Exception as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
