"""Command-line interface: ``plagrange <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from . import markoff, search
from .exact import Surd
from .factor import is_prime
from .transducer import build_fast, build_slow, to_dot, validate
from .words import cut_quality_periodic, format_cf, lambda_periodic, parse_cf

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAILED = 3
EXIT_NOT_TERMINATED = 4

CHECKPOINT_ENV = "LAGRANGE_CHECKPOINT_DIR"

log = logging.getLogger("plagrange")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# transducer ---------------------------------------------------------------------

def cmd_transducer(args) -> int:
    if args.n < 2:
        raise UsageError("level must be at least 2")
    t = build_slow(args.n) if args.kind == "slow" else build_fast(args.n)
    problems = validate(t)
    if problems:
        for msg in problems:
            print(f"violation: {msg}", file=sys.stderr)
        return EXIT_FAILED
    text = to_dot(t) if args.format == "dot" else t.to_json() + "\n"
    _emit(text, args.output)
    return EXIT_OK


# minlp ---------------------------------------------------------------------------

def _checkpoint_path(args) -> str | None:
    if args.checkpoint:
        return args.checkpoint
    base = os.environ.get(CHECKPOINT_ENV)
    if base:
        return os.path.join(base, f"minlp-{args.p}.json")
    return None


def run_minlp(p: int, max_k: int, threads: int, checkpoint: str | None = None, resume: str | None = None,
              every: int = 0, budget: float | None = None):
    if not is_prime(p):
        raise search.NotPrime(p)
    t = build_fast(p)
    state = search.load_checkpoint(resume, t) if resume else None
    start = time.monotonic()

    def progress(st):
        if checkpoint and every and st.k % every == 0:
            search.save_checkpoint(st, t, checkpoint)
        if budget is not None and time.monotonic() - start > budget:
            raise TimeoutError(f"p={p}: budget of {budget:g}s exceeded at k={st.k}")

    result = search.min_lagrange(p, k_max=max_k, threads=threads, state=state, transducer=t, progress=progress)
    if isinstance(result, search.NotTerminated) and checkpoint:
        search.save_checkpoint(result.state, t, checkpoint)
    return result


def cmd_minlp(args) -> int:
    path = _checkpoint_path(args)
    resume = None
    if args.resume:
        resume = args.resume if isinstance(args.resume, str) else path
        if not resume:
            raise UsageError("--resume needs a checkpoint path")
        if not os.path.exists(resume):
            raise UsageError(f"no checkpoint at {resume}")
        path = path or resume
    result = run_minlp(args.p, args.max_k, args.threads, path, resume, args.checkpoint_every)
    if isinstance(result, search.NotTerminated):
        out = result.to_json()
        out["checkpoint"] = path
        _emit(_dump(out), args.output)
        return EXIT_NOT_TERMINATED
    _emit(result.dumps(), args.output)
    return EXIT_OK


# verify-table ----------------------------------------------------------------------

def _primes_for(args, table) -> list[int]:
    if args.primes:
        return args.primes
    if args.range:
        lo, hi = args.range
        return [p for p in range(lo, hi + 1) if is_prime(p)]
    return sorted(table)


def cmd_verify_table(args) -> int:
    from .table import Verdict, load_table, verify_report

    table = load_table(args.table_file)
    primes = _primes_for(args, table)
    rows = []
    failed = 0
    for p in primes:
        if not is_prime(p):
            raise UsageError(f"{p} is not prime")
        start = time.monotonic()
        try:
            result = run_minlp(p, args.max_k, args.threads, budget=args.budget)
        except TimeoutError as exc:
            verdict = Verdict(p, False, "budget", str(exc))
            result = None
        else:
            if isinstance(result, search.NotTerminated):
                verdict = Verdict(p, False, "search", f"not terminated by k={result.k_max}")
            else:
                verdict = verify_report(result, table)
        took = time.monotonic() - start
        failed += not verdict.ok
        print(f"{verdict.line()} ({took:.1f}s)", flush=True)
        if result is not None and not isinstance(result, search.NotTerminated):
            sym = "M" if verdict.source == "markoff" else result.witnesses[0].symmetry
            rows.append(f"{p}, {result.alpha.decimal_str(15)}, {sym}\n")
    print(f"{len(primes) - failed}/{len(primes)} rows passed")
    if args.plot_data:
        with open(args.plot_data, "w") as fh:
            fh.write("# p, alpha_decimal, symmetry\n")
            fh.writelines(rows)
    return EXIT_OK if failed == 0 else EXIT_FAILED


# markoff ---------------------------------------------------------------------------

def cmd_markoff(args) -> int:
    if args.enumerate is not None:
        pts = [markoff.MarkoffPoint.of(t) for t in markoff.enumerate_triples(args.enumerate)]
        _emit(_dump([pt.to_json() for pt in pts]), args.output)
        return EXIT_OK
    if args.uniqueness is not None:
        rep = markoff.strong_uniqueness_check(args.uniqueness)
        _emit(_dump(rep.to_json()), args.output)
        return EXIT_OK if rep.ok else EXIT_FAILED
    if args.p is None:
        raise UsageError("markoff needs a prime, --enumerate or --uniqueness")
    cases = markoff.corollary_cases(args.p)
    points = {str(markoff.lambda_z(t[2])): cases[label] for label, t, _ in markoff.CASES}
    fired = markoff.corollary_filter(args.p)
    out = {
        "p": args.p,
        "cases": cases,
        "points": points,
        "min": str(fired[0].value) if fired else None,
    }
    _emit(_dump(out), args.output)
    return EXIT_OK


# quality ---------------------------------------------------------------------------

def cmd_quality(args) -> int:
    try:
        period = parse_cf(args.period)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not period or any(b < 1 for b in period):
        raise UsageError("period terms must be positive")
    lam = lambda_periodic(period)
    cuts = []
    for i in range(1, len(period) + 1):
        q: Surd = cut_quality_periodic(period, i)
        cuts.append({"index": i, "term": period[i - 1], "quality": str(q), "decimal": q.decimal_str(15)})
    out = {
        "period": format_cf(period),
        "lambda": str(lam),
        "lambda_decimal": lam.decimal_str(15),
        "cuts": cuts,
    }
    _emit(_dump(out), args.output)
    return EXIT_OK


# parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="plagrange", description="Minimum of the p-Lagrange spectrum via Raney transducers.")
    ap.add_argument("--log-level", default="WARNING", help="logging level (default WARNING)")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("transducer", help="export a slow or fast Raney transducer")
    s.add_argument("n", type=int)
    s.add_argument("kind", nargs="?", choices=("slow", "fast"), default="fast")
    s.add_argument("format", nargs="?", choices=("dot", "json"), default="json")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_transducer)

    s = sub.add_parser("minlp", help="compute min L_p with an isolation bound")
    s.add_argument("p", type=int)
    s.add_argument("--max-k", type=int, default=400)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--checkpoint", help=f"checkpoint file (default ${CHECKPOINT_ENV}/minlp-<p>.json)")
    s.add_argument("--checkpoint-every", type=int, default=0, metavar="K", help="also save every K generations")
    s.add_argument("--resume", nargs="?", const=True, help="resume from the checkpoint (or the given file)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_minlp)

    s = sub.add_parser("verify-table", help="recompute reference rows and compare exactly")
    s.add_argument("primes", nargs="*", type=int)
    s.add_argument("--range", nargs=2, type=int, metavar=("LO", "HI"))
    s.add_argument("--table-file")
    s.add_argument("--max-k", type=int, default=400)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--budget", type=float, help="seconds allowed per prime")
    s.add_argument("--plot-data", help="write 'p, alpha_decimal, symmetry' lines here")
    s.set_defaults(func=cmd_verify_table)

    s = sub.add_parser("markoff", help="Markoff congruence cases, enumeration, uniqueness")
    s.add_argument("p", nargs="?", type=int)
    s.add_argument("--enumerate", type=int, metavar="Z")
    s.add_argument("--uniqueness", type=int, metavar="Z")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_markoff)

    s = sub.add_parser("quality", help="approximability of a periodic continued fraction")
    s.add_argument("period", help='e.g. "2211", "[3,3,2,1,1,1,1,2]" or "221^{7}"')
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_quality)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be positive")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (search.NotPrime, markoff.NotPrime) as exc:
        print(f"error: {exc} is not prime", file=sys.stderr)
        return EXIT_USAGE
    except search.CorruptCheckpoint as exc:
        print(f"error: corrupt checkpoint: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (search.VerificationFailed, search.EmptyCycleSet) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
