"""Command-line entry point ``cgl-quantizer``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence, Tuple

from .cli_io import (
    EXIT_INPUT,
    EXIT_OK,
    PipelineOptions,
    analysis_json,
    exit_code_for,
    fixture_names,
    load_fixture,
    parse_epsilon,
    parse_presentation,
    parse_spec,
    run_pipeline,
    validation_json,
)
from .errors import CGLError, InvalidInput
from .ore import DEFAULT_MAX_PEEL
from .verifier import DEFAULT_SEED


def _emit(doc, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cgl-quantizer",
        description="Quantize symmetric integral Poisson-CGL extensions over Q[q, q^-1] and verify the result.")
    sub = ap.add_subparsers(dest="command", required=True)

    def spec_args(p):
        p.add_argument("spec", nargs="?", help="spec JSON file")
        p.add_argument("--fixture", help="use a bundled fixture instead of a file")

    def run_args(p):
        p.add_argument("--seed", type=_u64, default=DEFAULT_SEED, help="seed for randomized checks")
        p.add_argument("--max-peel", type=_positive, default=DEFAULT_MAX_PEEL,
                       help="cap on torus-to-normal-form peeling steps")

    p = sub.add_parser("validate", help="check the symmetric integral Poisson-CGL conditions")
    spec_args(p)

    p = sub.add_parser("analyze", help="y-sequence, level sets, kappa and b monomials")
    spec_args(p)

    p = sub.add_parser("quantize", help="build the preferred quantization")
    spec_args(p)
    run_args(p)
    p.add_argument("--verify", action="store_true", help="run the full verifier suite")
    p.add_argument("--audit", metavar="PATH", help="write the per-step audit log to PATH")
    p.add_argument("--epsilon", help="scale the final step's delta table by this scalar")

    p = sub.add_parser("verify", help="quantize (or load a presentation) and run the verifier suite")
    spec_args(p)
    run_args(p)
    p.add_argument("--presentation", metavar="PATH", help="verify this presentation instead of quantizing")
    p.add_argument("--epsilon", help="verify the scaled variant with this scalar")

    p = sub.add_parser("fixtures", help="bundled fixtures")
    fsub = p.add_subparsers(dest="action", required=True)
    fsub.add_parser("list", help="list bundled fixtures")
    fr = fsub.add_parser("run", help="quantize, verify and compare every bundled fixture to its golden output")
    fr.add_argument("names", nargs="*", help="fixtures to run (default: all)")
    fr.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    run_args(fr)
    return ap


def _load_spec(args):
    if args.fixture and args.spec:
        raise InvalidInput("give either a spec file or --fixture, not both")
    if args.fixture:
        return load_fixture(args.fixture).spec
    if not args.spec:
        raise InvalidInput("a spec file or --fixture is required")
    return parse_spec(args.spec)


def _run_fixture(job: Tuple[str, int, int]) -> Tuple[str, int, dict]:
    name, seed, max_peel = job
    fx = load_fixture(name)
    report, code = run_pipeline(fx.spec, PipelineOptions(verify=True, seed=seed, max_peel=max_peel,
                                                         expected=fx.expected))
    return name, code, report


def _fixtures(args) -> int:
    if args.action == "list":
        _emit([{"name": n, "description": load_fixture(n).description} for n in fixture_names()])
        return EXIT_OK
    names = args.names or fixture_names()
    for n in names:
        load_fixture(n)
    jobs = [(n, args.seed, args.max_peel) for n in names]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_run_fixture, jobs))
    else:
        results = [_run_fixture(j) for j in jobs]
    summary = []
    code = EXIT_OK
    for name, c, report in results:
        entry = {"name": name, "exit": c,
                 "verification": report.get("verification", {}).get("ok"),
                 "golden": report.get("golden", {}).get("ok")}
        if "error" in report:
            entry["error"] = report["error"]
        failed = [ch for ch in report.get("verification", {}).get("checks", []) if ch["status"] == "fail"]
        if failed:
            entry["failed_checks"] = failed
        if report.get("golden", {}).get("mismatches"):
            entry["mismatches"] = report["golden"]["mismatches"]
        summary.append(entry)
        code = max(code, c)
    _emit({"seed": args.seed, "fixtures": summary})
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fixtures":
            return _fixtures(args)
        spec = _load_spec(args)
        if args.command == "validate":
            doc = validation_json(spec)
            _emit(doc)
            return EXIT_OK if doc["ok"] else EXIT_INPUT
        if args.command == "analyze":
            doc = validation_json(spec)
            if not doc["ok"]:
                _emit({"validation": doc})
                return EXIT_INPUT
            _emit(analysis_json(spec))
            return EXIT_OK
        eps = parse_epsilon(args.epsilon) if getattr(args, "epsilon", None) else None
        pres = parse_presentation(args.presentation) if getattr(args, "presentation", None) else None
        if pres is not None and eps is not None:
            raise InvalidInput("--epsilon applies to a constructed quantization, not to --presentation")
        verify = args.command == "verify" or args.verify
        report, code = run_pipeline(spec, PipelineOptions(verify=verify, seed=args.seed,
                                                          max_peel=args.max_peel, epsilon=eps), pres)
        if args.command == "quantize":
            audit = report.pop("audit", None)
            if args.audit and audit is not None:
                with open(args.audit, "w") as fh:
                    json.dump(audit, fh, indent=2, ensure_ascii=False)
                    fh.write("\n")
            out = dict(report.get("presentation", {}))
            if audit is not None:
                out["audit"] = audit
            for key in ("error", "verification", "validation"):
                if key in report and (key != "validation" or "error" in report):
                    out[key] = report[key]
            _emit(out)
        else:
            _emit(report)
        return code
    except CGLError as exc:
        sys.stderr.write(f"cgl-quantizer: {type(exc).__name__}: {exc}\n")
        return exit_code_for(exc)
    except OSError as exc:
        sys.stderr.write(f"cgl-quantizer: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
