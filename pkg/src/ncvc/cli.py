"""Command-line front end.

Exit codes: 0 success, 1 invariant violation, 2 invalid arguments or I/O
problems.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from collections import Counter

import numpy as np

from .errors import DecodeFailure, InfeasibleConfig
from .header import Scheme, decode_header, make_config, overhead_for, random_combination
from .listdec import brute_force_list, gs_radius, list_error_patterns, ListDecodeParams
from .netsim import (
    Enforcement,
    SimConfig,
    Topology,
    TopologyParams,
    diamond_topology,
    line_topology,
    reports_to_csv,
    run_trials,
    summarize,
)
from .rs import build_code, syndrome

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

# (n, m) pairs shown when `overhead` is called without --n/--m
REFERENCE_CASES = [(50, 15), (255, 150), (255, 86)]


class UsageError(Exception):
    pass


# --- output helpers --------------------------------------------------------


def _table(rows: list[dict], columns: list[str]) -> str:
    cells = [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(wd) for c, wd in zip(columns, widths)).rstrip()]
    lines += ["  ".join(v.ljust(wd) for v, wd in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc


def _schemes(value: str) -> list[Scheme]:
    if value == "all":
        return list(Scheme)
    return [Scheme.parse(value)]


def _single(values, name: str, default: int) -> int:
    if not values:
        return default
    if len(values) != 1:
        raise UsageError(f"--{name} takes a single value for this command")
    return values[0]


# --- overhead --------------------------------------------------------------

OVERHEAD_COLUMNS = ["n", "m", "w", "pf", "scheme", "k", "syndrome_symbols", "extra_bits", "exact_bits", "bytes", "note"]


def overhead_rows(pairs, w: int, p_f: float, l_max: int, schemes) -> list[dict]:
    rows = []
    for n, m in pairs:
        for scheme in schemes:
            row = {"n": n, "m": m, "w": w, "pf": p_f, "scheme": scheme.name}
            try:
                o = overhead_for(scheme, n, m, w=w, p_f=p_f, l_max=l_max)
            except (InfeasibleConfig, ValueError) as exc:
                row.update(k="", syndrome_symbols="", extra_bits="", exact_bits="", bytes="", feasible=False, note=f"invalid: {exc}")
                rows.append(row)
                continue
            row.update(
                k=o.k if o.k is not None else "",
                syndrome_symbols=o.syndrome_symbols,
                extra_bits=o.id_bits + o.side_info_bits,
                exact_bits=o.exact_bits,
                bytes=o.total_bytes,
                feasible=o.feasible,
                note=o.note if o.feasible else f"infeasible (h={o.total_bytes})",
            )
            rows.append(row)
    return rows


def cmd_overhead(args) -> int:
    ns, ms = args.n or [], args.m or []
    if not ns and not ms:
        pairs = REFERENCE_CASES
    elif not ns or not ms:
        raise UsageError("give both --n and --m (or neither for the reference cases)")
    elif len(ns) == len(ms):
        pairs = list(zip(ns, ms))
    elif len(ns) == 1:
        pairs = [(ns[0], m) for m in ms]
    elif len(ms) == 1:
        pairs = [(n, ms[0]) for n in ns]
    else:
        raise UsageError("--n and --m must have equal length or one of them a single value")
    rows = overhead_rows(pairs, args.w, args.pf, args.lmax, _schemes(args.scheme or "all"))
    if args.format == "json":
        text = _json(rows)
    elif args.format == "csv":
        text = _csv(rows, OVERHEAD_COLUMNS)
    else:
        text = _table(rows, OVERHEAD_COLUMNS)
    _emit(text, args.out)
    return EXIT_OK


# --- roundtrip -------------------------------------------------------------


def roundtrip(scheme, n: int, m: int, w: int, trials: int, seed: int, weight: int | None = None, p_f: float = 1e-4, l_max: int = 64) -> dict:
    """Random sparse vectors through random combining trees, then decode.

    Vectors of weight <= m must come back exactly for ERROR and ERASURE; a
    LIST failure is a side-information miss and counts against P_f.  A
    wrong vector returned for an in-bound input is an invariant violation.
    """
    cfg = make_config(scheme, n, m, w=w, p_f=p_f, l_max=l_max)
    rng = np.random.default_rng(seed)
    causes: Counter = Counter()
    ok = miscorrect = violations = 0
    start = time.perf_counter()
    for _ in range(trials):
        wt = weight if weight is not None else int(rng.integers(1, m + 1))
        if not 1 <= wt <= n:
            raise UsageError(f"weight must be in [1, n], got {wt}")
        support = rng.choice(n, size=wt, replace=False)
        header, vec = random_combination(cfg, rng, support)
        true_wt = int(np.count_nonzero(vec))
        try:
            got = decode_header(header, cfg)
        except DecodeFailure as exc:
            causes[exc.cause] += 1
            if true_wt <= m and cfg.scheme is not Scheme.LIST:
                violations += 1
            continue
        if np.array_equal(got, vec):
            ok += 1
        else:
            miscorrect += 1
            if true_wt <= m:
                violations += 1
    return {
        "scheme": cfg.scheme.name,
        "n": n,
        "k": cfg.code.k,
        "m": m,
        "w": w,
        "weight": weight if weight is not None else "1..m",
        "trials": trials,
        "seed": seed,
        "recovered": ok,
        "recovery_rate": ok / trials if trials else 0.0,
        "failures": sum(causes.values()),
        "failure_rate": sum(causes.values()) / trials if trials else 0.0,
        "failure_causes": dict(sorted(causes.items())),
        "miscorrections": miscorrect,
        "violations": violations,
        "seconds": round(time.perf_counter() - start, 3),
    }


ROUNDTRIP_COLUMNS = ["scheme", "n", "k", "m", "weight", "trials", "recovered", "recovery_rate", "failures", "miscorrections", "violations"]


def cmd_roundtrip(args) -> int:
    n = _single(args.n, "n", 50)
    m = _single(args.m, "m", 15)
    rows = [
        roundtrip(s, n, m, args.w, args.trials, args.seed, weight=args.weight, p_f=args.pf, l_max=args.lmax)
        for s in _schemes(args.scheme or "erasure")
    ]
    if args.format == "json":
        text = _json(rows)
    elif args.format == "csv":
        text = _csv(rows, ROUNDTRIP_COLUMNS)
    else:
        text = _table(rows, ROUNDTRIP_COLUMNS)
    _emit(text, args.out)
    return EXIT_VIOLATION if any(r["violations"] for r in rows) else EXIT_OK


# --- simulate --------------------------------------------------------------


def cmd_simulate(args) -> int:
    n = _single(args.n, "n", 50)
    m = _single(args.m, "m", 15)
    scheme = Scheme.parse(args.scheme or "erasure")
    scfg = make_config(scheme, n, m, w=args.w, p_f=args.pf, l_max=args.lmax)
    enforcement = Enforcement.parse(args.enforcement)
    topology, params = None, None
    if args.edgelist:
        try:
            with open(args.edgelist, encoding="utf-8") as fh:
                topology = Topology.from_edgelist(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {args.edgelist}: {exc}") from exc
    elif args.topology == "diamond":
        topology = diamond_topology()
    elif args.topology == "line":
        topology = line_topology()
    else:
        params = TopologyParams(n, args.locality, layers=args.layers, density=args.density)
    cfg = SimConfig(scfg, seed=args.seed, enforcement=enforcement, payload_len=args.payload_len, retry_cap=args.retry_cap, topology=params)
    reports = run_trials(cfg, args.trials, topology=topology)
    summary = summarize(reports)
    if args.format == "csv":
        text = reports_to_csv(reports)
    elif args.format == "json":
        text = _json({"summary": summary, "reports": [r.to_dict() for r in reports]})
    else:
        rows = [{"key": k, "value": json.dumps(v, sort_keys=True) if isinstance(v, dict) else v} for k, v in summary.items()]
        text = _table(rows, ["key", "value"])
    _emit(text, args.out)
    bad = summary["invariant_violations"] + summary["decode_failures"].get("mis-decode", 0)
    if enforcement is Enforcement.ID_POPCOUNT:
        bad += summary["popcount_over_m"]
    return EXIT_VIOLATION if bad else EXIT_OK


# --- oracle-check ----------------------------------------------------------


def oracle_check(n: int, k: int, w: int, t: int | None, trials: int, seed: int) -> dict:
    """GS list versus codeword enumeration on planted and uniformly random syndromes."""
    code = build_code(n, k, w, verify="exhaustive" if n <= 20 else "sample")
    t = gs_radius(n, k) if t is None else t
    params = ListDecodeParams(t=t, max_list_size=1 << 20)
    rng = np.random.default_rng(seed)
    gf = code.field
    mismatches, sizes = [], Counter()
    start = time.perf_counter()
    for trial in range(trials):
        if trial % 2 == 0:
            e = np.zeros(n, dtype=np.int64)
            wt = int(rng.integers(0, t + 1))
            pos = rng.choice(n, size=wt, replace=False)
            e[pos] = gf.random(rng, wt, nonzero=True)
            s = syndrome(e, code)
        else:
            s = gf.random(rng, code.redundancy)
        fast = list_error_patterns(s, code, params).as_set()
        slow = brute_force_list(s, code, t).as_set()
        sizes[len(slow)] += 1
        if fast != slow:
            mismatches.append(trial)
    return {
        "n": n,
        "k": k,
        "w": w,
        "t": t,
        "trials": trials,
        "seed": seed,
        "equal": trials - len(mismatches),
        "mismatched_trials": mismatches,
        "list_sizes": {str(key): v for key, v in sorted(sizes.items())},
        "seconds": round(time.perf_counter() - start, 3),
    }


def cmd_oracle_check(args) -> int:
    n = _single(args.n, "n", 15)
    result = oracle_check(n, args.k, args.w, args.t, args.trials, args.seed)
    cols = ["n", "k", "w", "t", "trials", "equal", "mismatched_trials"]
    if args.format == "json":
        text = _json(result)
    elif args.format == "csv":
        text = _csv([result], cols)
    else:
        text = _table([result], cols)
    _emit(text, args.out)
    return EXIT_VIOLATION if result["mismatched_trials"] else EXIT_OK


# --- argument parsing ------------------------------------------------------


def _common(p: argparse.ArgumentParser, w: int = 8, trials: int = 100):
    p.add_argument("--n", type=int, nargs="+", help="number of sources (generation size)")
    p.add_argument("--m", type=int, nargs="+", help="maximum number of combined sources")
    p.add_argument("--w", type=int, default=w, help="field bits per symbol")
    p.add_argument("--scheme", help="error, erasure, list or all")
    p.add_argument("--pf", type=float, default=1e-4, help="target side-information failure probability")
    p.add_argument("--lmax", type=int, default=64, help="list size bound used to size the side information")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")
    p.add_argument("--json", dest="format", action="store_const", const="json", help="same as --format json")
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncvc", description="Compressed coding-vector headers for network coding.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("overhead", help="header length per scheme")
    _common(p)
    p.set_defaults(func=cmd_overhead)

    p = sub.add_parser("roundtrip", help="encode, combine and decode random sparse vectors")
    _common(p)
    p.add_argument("--weight", type=int, help="fixed source count per vector (default: uniform in 1..m)")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("simulate", help="seeded multicast over a DAG")
    _common(p, trials=10)
    p.add_argument("--topology", choices=["random", "diamond", "line"], default="random")
    p.add_argument("--edgelist", help="read the DAG from an edge-list file instead")
    p.add_argument("--locality", type=int, default=15)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--enforcement", choices=[e.value for e in Enforcement], default=Enforcement.ID_POPCOUNT.value)
    p.add_argument("--payload-len", type=int, default=4)
    p.add_argument("--retry-cap", type=int, default=8)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle-check", help="list decoder against brute-force enumeration")
    _common(p, w=4, trials=100)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--t", type=int, help="decoding radius (default: the GS radius)")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.trials is not None and args.trials < 0:
        parser.error("--trials must be non-negative")
    try:
        return args.func(args)
    except (UsageError, InfeasibleConfig, ValueError) as exc:
        print(f"ncvc {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
