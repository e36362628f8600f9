"""Command-line front end.

Every subcommand is a thin client of the HTTP service: by default the
requests run against an in-process app instance (no daemon involved), and
--server URL points them at a running `ppl serve` instead.  Exit codes
are a CI contract: 0 all bound expectations hold, 1 a bound expectation
failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .jsonio import canonical_json_bytes, read_json, write_csv_lines

EXIT_OK = 0
EXIT_BOUND_FAILED = 1
EXIT_USAGE = 2

_CONSTRUCTIONS = ("modular", "valuation-parity", "legendre")


class CliError(Exception):
    """Configuration problem; message names the offending field."""


class ServiceClient:
    """POSTs against a remote server, or the in-process app when server is None."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                # fastapi's own testclient import trips a starlette deprecation
                warnings.filterwarnings(
                    "ignore", message="Using `httpx` with `starlette.testclient`"
                )
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise CliError(detail)
        return resp.json()


def _parse_int_list(text: str, flag: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise CliError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _parse_s_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        return int(lo), int(hi)
    except ValueError:
        raise CliError(f"--s-range expects LO..HI (e.g. -2..2), got {text!r}") from None


def cmd_construct(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    payload = {
        "construction": args.construction,
        "k": args.k,
        "primes": _parse_int_list(args.primes, "--primes"),
    }
    data = client.post("/partitions/construct", payload)
    Path(args.out).write_bytes(canonical_json_bytes(data["partition"]))
    summary = data["summary"]
    bits = [f"{summary['construction']} k={summary['k']} primes={summary['primes']}"]
    if "exponents" in summary:
        bits.append(f"exponents={summary['exponents']} table={summary['table_size']} entries")
    else:
        bits.append(f"base_parts={summary['base_parts']}")
        if "refinement_pieces" in summary:
            bits.append(f"refinement_pieces={summary['refinement_pieces']}")
    print(" ".join(bits))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    spec_path = Path(args.spec)
    if not spec_path.is_file():
        raise CliError(f"--spec file not found: {spec_path}")
    try:
        partition_doc = read_json(spec_path)
    except ValueError as exc:
        raise CliError(f"--spec file is not valid JSON: {exc}") from None
    mode = "qp-ratio" if args.mode == "qp" else args.mode
    s_lo, s_hi = _parse_s_range(args.s_range)
    payload = {
        "partition": partition_doc,
        "config": {
            "mode": mode,
            "prime_bound": args.primes_upto,
            "window": args.window,
            "depth": args.depth,
            "w": args.w,
            "s_lo": s_lo,
            "s_hi": s_hi,
        },
    }
    client = ServiceClient(args.server)
    data = client.post("/scan", payload)
    report = data["report"]
    Path(args.out).write_bytes(canonical_json_bytes(report))
    if args.csv:
        write_csv_lines(args.csv, data["csv"])
    print(
        f"mode={mode} k={report['partition']['k']} "
        f"exceptional={report['exceptional']} "
        f"bound={report['bound']} ({report['bound_kind']}) holds={report['bound_holds']}"
    )
    if report["window_limited"]:
        print(f"window-limited primes (no certificate, nothing covered): {report['window_limited']}")
    print(f"wrote {args.out}" + (f" and {args.csv}" if args.csv else ""))
    return EXIT_OK if data["bound_holds"] else EXIT_BOUND_FAILED


def _require(args: argparse.Namespace, names: list[str]) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise CliError(f"check-lemma needs {', '.join(missing)} in this mode")


def cmd_check_lemma(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    if args.random is not None:
        for name in ("p", "w", "t", "c", "m", "elements", "full_window"):
            if getattr(args, name) is not None:
                raise CliError(f"--random draws its own parameters; drop --{name.replace('_', '-')}")
        payload = {"trials": args.random, "seed": args.seed, "window": args.window}
        data = client.post("/lemma/random", payload)
        suite = data["suite"]
        print(
            f"trials={suite['trials']} seed={suite['seed']} window={suite['window']} "
            f"hypothesis_true={suite['hypothesis_true']} violations={len(suite['violations'])}"
        )
        if args.out:
            Path(args.out).write_bytes(canonical_json_bytes(suite))
            print(f"wrote {args.out}")
        return EXIT_OK if data["clean"] else EXIT_BOUND_FAILED

    _require(args, ["p", "w", "t", "c", "m"])
    if (args.elements is None) == (args.full_window is None):
        raise CliError("check-lemma needs exactly one of --elements or --full-window")
    try:
        c = Fraction(args.c)
    except (ValueError, ZeroDivisionError):
        raise CliError(f"--c expects a rational like 3/4 or 0.75, got {args.c!r}") from None
    payload = {"p": args.p, "w": args.w, "t": args.t, "c": str(c), "m": args.m}
    if args.full_window is not None:
        payload["full_window"] = args.full_window
    else:
        payload["elements"] = _parse_int_list(args.elements, "--elements")
    data = client.post("/lemma/check", payload)
    verdict = data["verdict"]
    print(
        f"p={verdict['p']} w={verdict['w']} t={verdict['t']} c={verdict['c']} m={verdict['m']} "
        f"cells_hit={verdict['v_count']} threshold={verdict['threshold']}"
    )
    if not verdict["hypothesis"]:
        print("hypothesis ✗ (conclusion skipped)")
    elif verdict["conclusion"]:
        print("hypothesis ✓  conclusion ✓")
    else:
        bad = verdict["counterexample"]
        print(f"hypothesis ✓  conclusion ✗  counterexample cell {bad}")
    if args.out:
        Path(args.out).write_bytes(canonical_json_bytes(verdict))
        print(f"wrote {args.out}")
    return EXIT_BOUND_FAILED if data["violated"] else EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppl",
        description="Construct partitions of the naturals and scan their p-adic denseness.",
    )
    parser.add_argument(
        "--server", default=None, help="URL of a running service; in-process if omitted"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a pre-subcommand --server from being clobbered by the default
    common.add_argument(
        "--server",
        default=argparse.SUPPRESS,
        help="URL of a running service; in-process if omitted",
    )

    pc = sub.add_parser("construct", parents=[common], help="build a partition and write its JSON spec")
    pc.add_argument("construction", choices=_CONSTRUCTIONS)
    pc.add_argument("--k", type=int, required=True, help="number of parts")
    pc.add_argument("--primes", default="", help="comma-separated construction primes, e.g. 2,3")
    pc.add_argument("--out", default="partition.json")

    ps = sub.add_parser("scan", parents=[common], help="sweep primes and check the exceptional bound")
    ps.add_argument("--mode", required=True, choices=["zp", "qp", "qp-ratio"])
    ps.add_argument("--spec", required=True, help="partition JSON written by construct")
    ps.add_argument("--primes-upto", type=int, default=50)
    ps.add_argument("--window", type=int, default=100_000)
    ps.add_argument("--depth", type=int, default=2, help="residue depth j for zp mode")
    ps.add_argument("--w", type=int, default=2, help="unit precision for qp-ratio mode")
    ps.add_argument("--s-range", default="-2..2", help="valuation range LO..HI for qp-ratio mode")
    ps.add_argument("--out", default="report.json")
    ps.add_argument("--csv", default=None, help="also write a flat prime,part,verdict,certificate CSV")

    pl = sub.add_parser("check-lemma", parents=[common], help="run the counting-criterion checker")
    pl.add_argument("--p", type=int)
    pl.add_argument("--w", type=int)
    pl.add_argument("--t", type=int)
    pl.add_argument("--c", help="rational in (1/2, 1], e.g. 3/4")
    pl.add_argument("--m", type=int)
    pl.add_argument("--elements", help="explicit window, comma-separated")
    pl.add_argument("--full-window", type=int, dest="full_window", help="use X = 1..N")
    pl.add_argument("--random", type=int, metavar="TRIALS", help="seeded randomized suite")
    pl.add_argument("--seed", type=int, default=0)
    pl.add_argument("--window", type=int, default=10_000, help="sampling bound for --random")
    pl.add_argument("--out", default=None)

    pv = sub.add_parser("serve", help="run the HTTP service")
    pv.add_argument("--host", default="127.0.0.1")
    pv.add_argument("--port", type=int, default=8000)
    return parser


def _normalize_argv(argv: list[str]) -> list[str]:
    """Fold `--s-range -2..2` into one token; argparse reads a leading dash as a flag."""
    out = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == "--s-range" and i + 1 < len(argv):
            out.append(f"--s-range={argv[i + 1]}")
            skip = True
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_normalize_argv(list(argv)))
    handlers = {
        "construct": cmd_construct,
        "scan": cmd_scan,
        "check-lemma": cmd_check_lemma,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
