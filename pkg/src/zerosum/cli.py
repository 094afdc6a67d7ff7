"""Command-line entry point: ``zerosum <command> ...``.

Exit codes: 0 success, 1 a verification failed or a violation was found,
2 usage error.  ``--json`` output always carries ``"schema": 1``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

from .bounds import bound_report, cross_validate
from .cache import InvariantCache
from .congruences import IDENTITIES, SCALAR_IDENTITIES, exhaustive, fuzz, identity_ids
from .errors import CacheVerificationError, CapExceeded, NotAPGroup, ZeroSumError
from .groups import as_pgroup, classify_rank_two_like, davenport_formula, parse_group, parse_pgroup
from .lengths import LengthSet, parse_length_set
from .search import compute_s_L, sample_probe, verify_witness
from .sequences import read_sequence_file, write_sequence_file
from .zscount import profile

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

KIND_CHOICES = ("D", "eta", "s", "interval", "interval-plus-N", "custom")


class UsageError(Exception):
    pass


def _emit(args, payload: dict, human: list[str] | None = None, rows: list[dict] | None = None) -> None:
    if getattr(args, "csv", False) and rows is not None:
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        sys.stdout.write(buf.getvalue())
    elif args.json or human is None:
        sys.stdout.write(json.dumps({"schema": 1, **payload}, sort_keys=True) + "\n")
    else:
        sys.stdout.write("\n".join(human) + "\n")


def _kv_lines(d: dict) -> list[str]:
    width = max((len(k) for k in d), default=0)
    return [f"{k.ljust(width)}  {v}" for k, v in d.items()]


def _parse_params(items: Sequence[str] | None) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k] = int(v)
        except ValueError as exc:
            raise UsageError(f"parameter {k} must be an integer") from exc
    return out


# -- group ---------------------------------------------------------------------------


def cmd_group(args) -> int:
    if args.action == "classify":
        spec = parse_pgroup(args.spec) if args.spec.startswith("p=") else as_pgroup(parse_group(args.spec))
        info = classify_rank_two_like(spec).to_dict()
        _emit(args, info, _kv_lines(info))
        return EXIT_OK
    G = parse_group(args.spec)
    info = {
        "group": G.canonical(),
        "factors": list(G.factors),
        "rank": G.rank,
        "order": G.order,
        "exp": G.exponent,
    }
    try:
        spec = as_pgroup(G)
        info.update({"p_group": True, "spec": spec.canonical(), "D": davenport_formula(spec)})
    except NotAPGroup:
        info.update({"p_group": False})
    _emit(args, info, _kv_lines(info))
    return EXIT_OK


# -- count -----------------------------------------------------------------------------


def cmd_count(args) -> int:
    G, seqs = read_sequence_file(args.file)
    if args.mode == "mod" and args.modulus is None:
        raise UsageError("--mode mod needs --modulus")
    profiles = [profile(S, args.mode, args.modulus) for S in seqs]
    payload = {"group": G.canonical(), "profiles": [p.to_dict() for p in profiles]}
    rows = [{"sequence": i, "k": k, "N_k": c} for i, p in enumerate(profiles) for k, c in enumerate(p.counts)]
    human = [f"group {G.canonical()}"] + [f"[{i}] " + " ".join(str(c) for c in p.counts) for i, p in enumerate(profiles)]
    _emit(args, payload, human, rows)
    return EXIT_OK


# -- invariant -------------------------------------------------------------------------


def _lengths_from_args(args, G) -> LengthSet:
    n = G.exponent
    if args.kind == "D":
        return LengthSet.all()
    if args.kind == "eta":
        return LengthSet.interval(1, n)
    if args.kind == "s":
        return LengthSet.singleton(n)
    if args.kind in ("interval", "interval-plus-N"):
        if args.j is None:
            raise UsageError(f"--kind {args.kind} needs --j")
        return LengthSet.interval(args.j, n) if args.kind == "interval" else LengthSet.interval_plus_N(args.j, n)
    if not args.lengths:
        raise UsageError("--kind custom needs --lengths")
    return parse_length_set(args.lengths)


def cmd_invariant(args) -> int:
    G = parse_group(args.group)
    L = _lengths_from_args(args, G)
    if args.sample is not None:
        res = sample_probe(G, L, args.sample, args.samples, args.seed)
        d = res.to_dict()
        _emit(args, d, _kv_lines(d))
        return EXIT_OK

    def progress(nodes: int) -> None:
        print(f"[search] {nodes} nodes", file=sys.stderr, flush=True)

    try:
        result = compute_s_L(G, L, cap=args.cap, budget=args.budget, threads=args.threads, progress=None if args.quiet else progress)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    ok = verify_witness(result)
    d = result.to_dict(timing=not args.no_timing)
    d["witness_verified"] = ok
    if args.witness_out and result.witness is not None:
        write_sequence_file(args.witness_out, G, [result.witness])
        d["witness_file"] = args.witness_out
    if ok and result.found and not args.no_store:
        cache = InvariantCache(args.cache_path)
        cache.store(result)
        cache.save()
    _emit(args, d, _kv_lines(d))
    return EXIT_OK if ok else EXIT_FAIL


# -- congruence ----------------------------------------------------------------------


def cmd_congruence(args) -> int:
    if args.list:
        d = {"identities": identity_ids()}
        human = [f"{k}  {IDENTITIES[k].description}" for k in IDENTITIES] + [f"{k}  (scalar)" for k in SCALAR_IDENTITIES]
        _emit(args, d, human)
        return EXIT_OK
    if not args.id or not args.group:
        raise UsageError("congruence needs --id and --group (or --list)")
    if args.id not in identity_ids():
        raise UsageError(f"unknown identity {args.id!r}; try --list")
    G = parse_group(args.group)
    params = _parse_params(args.param)
    if args.exhaustive is not None:
        if args.id not in IDENTITIES:
            raise UsageError("--exhaustive applies to sequence identities only")
        report = exhaustive(args.id, G, args.exhaustive, params)
    else:
        report = fuzz(
            args.id,
            G,
            args.trials,
            args.seed,
            max_attempts=args.max_attempts,
            exact_fraction=args.exact_fraction,
            fixed=params or None,
            threads=args.threads,
        )
    d = report.to_dict()
    d.pop("schema")
    human = _kv_lines({k: v for k, v in d.items() if k != "violations"})
    human += [f"violation: {v}" for v in d["violations"]]
    _emit(args, d, human)
    return EXIT_OK if report.passed else EXIT_FAIL


# -- bounds ------------------------------------------------------------------------


def cmd_bounds(args) -> int:
    H = parse_pgroup(args.spec) if args.spec.startswith("p=") else as_pgroup(parse_group(args.spec))
    report = bound_report(H, args.a, args.j)
    d = report.to_dict()
    d.pop("schema")
    ok = report.consistent
    if args.validate:
        check = cross_validate(report, InvariantCache(args.cache_path))
        d["validation"] = check.to_dict()
        ok = ok and check.status != "mismatch"
    human = [f"group {d['group']}  (H={H.canonical()}, a={args.a})"]
    for inv, info in d["invariants"].items():
        human.append(f"{inv}: lower={info['lower']} upper={info['upper']} exact={info['exact']}")
        human += [f"    {e['kind']:5} {e['value']:>6}  {e['provenance']} {e['detail']}".rstrip() for e in info["entries"]]
    if args.validate:
        human.append(f"validation: {d['validation']['status']}")
    _emit(args, d, human, report.rows())
    return EXIT_OK if ok else EXIT_FAIL


# -- cache -------------------------------------------------------------------------


def cmd_cache(args) -> int:
    try:
        cache = InvariantCache(args.cache_path, verify=args.action == "list")
    except CacheVerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.action == "list":
        rows = [{"key": k, "value": cache.entries[k].value, "status": cache.entries[k].status} for k in cache.keys()]
        _emit(args, {"path": str(cache.path), "entries": rows}, [f"{r['key']}  {r['value']}  {r['status']}" for r in rows], rows)
        return EXIT_OK
    bad = cache.verify()
    d = {"path": str(cache.path), "entries": len(cache), "failed": bad, "ok": not bad}
    _emit(args, d, _kv_lines(d))
    return EXIT_OK if not bad else EXIT_FAIL


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker processes")
    common.add_argument("--cache-path", default=None, help="invariant cache file (default: $ZEROSUM_CACHE or ~/.cache/zerosum/invariants.json)")

    parser = argparse.ArgumentParser(prog="zerosum", description="Zero-sum invariants of finite abelian groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group", parents=[common], help="group info or rank-two-like classification")
    p.add_argument("action", choices=("info", "classify"))
    p.add_argument("spec", help="C3*C9 or p=3;a=1,2")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("count", parents=[common], help="zero-sum counts N_k of sequences in a file")
    p.add_argument("file")
    p.add_argument("--mode", choices=("exact", "mod"), default="exact")
    p.add_argument("--modulus", type=int)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("invariant", parents=[common], help="exhaustive s_L search with witness")
    p.add_argument("--group", required=True)
    p.add_argument("--kind", choices=KIND_CHOICES, default="s")
    p.add_argument("--j", type=int)
    p.add_argument("--lengths", help="length-set descriptor for --kind custom, e.g. {3,6}")
    p.add_argument("--cap", type=int)
    p.add_argument("--budget", type=int, default=10**8, help="node budget")
    p.add_argument("--witness-out")
    p.add_argument("--no-store", action="store_true", help="do not append the result to the invariant cache")
    p.add_argument("--sample", type=int, metavar="LENGTH", help="sampling probe at one length instead of a search")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-timing", action="store_true", help="omit wall time from the output")
    p.add_argument("--quiet", action="store_true", help="no progress on stderr")
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("congruence", parents=[common], help="fuzz or exhaustively check a congruence")
    p.add_argument("--id")
    p.add_argument("--group")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-attempts", type=int, default=10**5)
    p.add_argument("--exact-fraction", type=float, default=0.01)
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="pin a parameter, e.g. gamma=1")
    p.add_argument("--exhaustive", type=int, metavar="LENGTH", help="check every multiset of this length")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_congruence)

    p = sub.add_parser("bounds", parents=[common], help="rule-based bounds for H + C_a")
    p.add_argument("spec", help="p-group H, e.g. p=3;a=1,1,1,2")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--j", type=int)
    p.add_argument("--validate", action="store_true", help="compare with the invariant cache")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("cache", parents=[common], help="inspect the invariant cache")
    p.add_argument("action", choices=("list", "verify"))
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_cache)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CacheVerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, ZeroSumError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
