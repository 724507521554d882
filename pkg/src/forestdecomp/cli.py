"""Command line entry point.

Exit codes are a stable contract: 0 success, 1 parse or verification
failure, 2 infeasible input with a density certificate, 3 internal check
failure (with a state dump on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import InfeasibleDensity, InternalCheckError, ParseError, \
    compute_params
from .instances import (FAMILIES, GenSpec, certificate_to_json, generate,
                        parse_edge_list, result_from_json, result_to_json,
                        write_edge_list)
from .solver import run_decompose
from .verify import verify_certificate, verify_partition

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INFEASIBLE = 2
EXIT_INTERNAL = 3


def _read_graph(path: str):
    if path == "-":
        return parse_edge_list(sys.stdin.read())
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _cmd_decompose(args) -> int:
    g = _read_graph(args.input)
    params = compute_params(args.k, args.d)
    try:
        outcome = run_decompose(g, params, checked=not args.fast,
                                max_iters=args.max_iters)
    except InfeasibleDensity as exc:
        _write(args.output,
               certificate_to_json(params, sorted(exc.witness.vertices)))
        return EXIT_INFEASIBLE
    if args.trace:
        _write(args.trace, "\n".join(outcome.trace_rows) + ("\n" if outcome.trace_rows else ""))
    if not outcome.succeeded:
        cert = outcome.certificate
        _write(args.output, certificate_to_json(params, sorted(cert.vertices)))
        return EXIT_INFEASIBLE
    _write(args.output, result_to_json(params, outcome.classes,
                                       special_index=params.k))
    return EXIT_OK


def _cmd_gamma(args) -> int:
    from .arboricity import fractional_arboricity
    g = _read_graph(args.input)
    if g.m == 0:
        print("no edges")
        return EXIT_PARSE
    gamma, witness = fractional_arboricity(g)
    print(f"{gamma.numerator}/{gamma.denominator}")
    print(" ".join(str(v) for v in sorted(witness.vertices)))
    return EXIT_OK


def _cmd_verify(args) -> int:
    g = _read_graph(args.input)
    with open(args.result, "r", encoding="utf-8") as fh:
        data = result_from_json(fh.read())
    params = compute_params(int(data["k"]), int(data["d"]))
    if "certificate" in data:
        ok = verify_certificate(g, params, data["certificate"]["vertices"])
        if not ok:
            print("certificate rejected")
            return EXIT_PARSE
        print("certificate accepted")
        return EXIT_OK
    report = verify_partition(g, params, data["forests"],
                              special_index=int(data["special_forest_index"]))
    if not report.ok:
        for line in report.to_lines():
            print(line)
        return EXIT_PARSE
    print("decomposition verified")
    return EXIT_OK


def _cmd_gen(args) -> int:
    spec = GenSpec(family=args.family, n=args.n, m=args.m, k=args.k,
                   d=args.d, seed=args.seed)
    g = generate(spec)
    _write(args.output, write_edge_list(g))
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest
    failures = run_selftest(seed=args.seed)
    for line in failures:
        print("FAIL", line)
    if failures:
        return EXIT_INTERNAL
    print("selftest ok")
    return EXIT_OK


def _cmd_report(args) -> int:
    from .report import render_trace_report
    written = render_trace_report(args.trace, args.out_dir)
    for path in written:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="forestdecomp")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="split a graph into k+1 forests")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--trace", default=None)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--checked", dest="fast", action="store_false",
                      default=False)
    mode.add_argument("--fast", dest="fast", action="store_true")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("gamma", help="exact fractional arboricity")
    p.add_argument("--input", required=True)
    p.set_defaults(func=_cmd_gamma)

    p = sub.add_parser("verify", help="re-check a result file")
    p.add_argument("--input", required=True)
    p.add_argument("--result", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("gen", help="write a generated instance")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("selftest", help="run the built-in oracle suites")
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(func=_cmd_selftest)

    p = sub.add_parser("report", help="render figures from a trace file")
    p.add_argument("--trace", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"cannot read {exc.filename}", file=sys.stderr)
        return EXIT_PARSE
    except InternalCheckError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        json.dump(exc.dump, sys.stderr, default=str)
        sys.stderr.write("\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
