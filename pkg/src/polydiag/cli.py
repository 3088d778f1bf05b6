"""Command-line front end.

Exit codes: 0 success or PASS, 1 verification FAIL (or a partition preserved
by no system class, a quotient precondition failure, eigen/brute
disagreement), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .core import Network, NetworkFormatError, format_rational, is_regular, load_network, row_sum
from .dynamics import certify_flow_invariance
from .invariance import CLASS_ORDER, SystemClass, classification_report, sorted_classes
from .lattice import (
    LatticeSizeError,
    default_jobs,
    hasse_dot,
    lattice_bruteforce,
    lattice_eigen,
    synchrony_antisynchrony_report,
)
from .partition import PartitionError, TaggedPartition, parse_partition
from .quotient import QuotientError, quotient, quotient_to_dot

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad input detected after argument parsing."""


def _emit(payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def _matrix_text(M) -> str:
    cells = [[format_rational(v) for v in row] for row in M]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join("  " + " ".join(c.rjust(width) for c in row) for row in cells)


def _load(args) -> Network:
    return load_network(args.network)


def _partition(args, net: Network) -> TaggedPartition:
    return parse_partition(args.partition, net.n)


def _jobs(args) -> int:
    return default_jobs() if args.jobs is None else max(1, args.jobs)


# -- subcommands ----------------------------------------------------------


def cmd_laplacian(args) -> int:
    net = _load(args)
    L = net.L
    v = is_regular(net.W)
    if args.out == "json":
        _emit({
            "command": "laplacian",
            "n": net.n,
            "valencies": [format_rational(x) for x in row_sum(net.W)],
            "regular_valency": None if v is None else format_rational(v),
            "laplacian": [[format_rational(x) for x in row] for row in L],
        })
    else:
        print(f"n = {net.n}")
        print("valencies: " + " ".join(format_rational(x) for x in row_sum(net.W)))
        print("regular: " + ("no" if v is None else f"yes, valency {format_rational(v)}"))
        print("L = D - W:")
        print(_matrix_text(L))
    return EXIT_OK


def cmd_classify(args) -> int:
    net = _load(args)
    P = _partition(args, net)
    rep = classification_report(net, P)
    preserving = rep["flags"]["preserving_system_classes"]
    if args.out == "json":
        _emit({"command": "classify", **rep})
    else:
        print(f"partition [{P}]  p={P.p} q={P.q} r={P.r}  {'standard' if P.is_standard else 'non-standard'}")
        for k, val in rep["flags"].items():
            if k != "preserving_system_classes":
                print(f"  {k:24s} {'yes' if val else 'no'}")
        print("  preserved by: " + (", ".join(preserving) if preserving else "none"))
        for key in ("conditions_W", "conditions_L_via_W", "conditions_odd"):
            if key in rep and not rep[key]["passed"]:
                fails = [c for c in rep[key]["conditions"] if not c["passed"]]
                print(f"  {key}: {len(fails)} failing, first: {fails[0]['rule']} ({fails[0]['i']},{fails[0]['j']})")
    return EXIT_OK if preserving else EXIT_FAIL


def _lattice_payload(lat) -> dict:
    return {
        "size": len(lat),
        "elements": [{"labels": list(P.labels), "dim": P.p} for P in lat.elements],
        "hasse_edges": [[list(a.labels), list(b.labels)] for a, b in lat.hasse_edges()],
    }


def cmd_lattice(args) -> int:
    net = _load(args)
    tags = ["W", "L"] if args.matrix == "both" else [args.matrix]
    mats = {"W": net.W, "L": net.L}
    lattices, agreement = {}, {}
    for t in tags:
        if args.method in ("brute", "both"):
            lattices[t] = lattice_bruteforce(mats[t], args.max_n, tag=t, jobs=_jobs(args))
        if args.method in ("eigen", "both"):
            eig = lattice_eigen(mats[t], args.tol, tag=t)
            if args.method == "eigen":
                lattices[t] = eig
            else:
                agreement[t] = eig.elements == lattices[t].elements
    union = sorted(set().union(*(set(l.elements) for l in lattices.values())))
    ok = all(agreement.values())
    if args.out == "json":
        payload = {
            "command": "lattice",
            "n": net.n,
            "method": args.method,
            "lattices": {t: _lattice_payload(l) for t, l in lattices.items()},
            "union_size": len(union),
        }
        if agreement:
            payload["agreement"] = agreement
        _emit(payload)
    elif args.out == "dot":
        for t, l in lattices.items():
            sys.stdout.write(hasse_dot(l, f"lattice_{t}"))
    else:
        for t, l in lattices.items():
            print(f"L_{t}: {len(l)} elements")
            for P in l.elements:
                print(f"  [{P}]  dim {P.p}")
        if len(lattices) > 1:
            print(f"union: {len(union)} elements")
        for t, a in agreement.items():
            print(f"eigen vs brute on {t}: {'agree' if a else 'DISAGREE'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_quotient(args) -> int:
    net = _load(args)
    P = _partition(args, net)
    try:
        Qn = quotient(net, P, args.kind)
    except QuotientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out == "json":
        _emit({"command": "quotient", **Qn.to_dict()})
    elif args.out == "dot":
        sys.stdout.write(quotient_to_dot(Qn))
    else:
        print(f"{Qn.kind} quotient of [{P}]")
        for c, t, m in zip(Qn.cells, Qn.tags, Qn.members):
            print(f"  {c:8s} {t:9s} cells {','.join(map(str, m))}")
        for s, t, w in Qn.edges():
            print(f"  {s} -> {t}  weight {format_rational(w)}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    net = _load(args)
    P = _partition(args, net)
    if args.dt <= 0 or args.steps < 1 or args.trials < 1:
        raise UsageError("need --dt > 0, --steps >= 1 and --trials >= 1")
    rep = certify_flow_invariance(
        net, P, args.cls, trials=args.trials, horizon=args.dt * args.steps, tol=args.tol,
        dt=args.dt, seed=args.seed, degree_bound=args.degree, jobs=_jobs(args),
    )
    if args.out == "json":
        _emit({"command": "simulate", "seed": args.seed, **rep.to_dict()})
    else:
        print(f"{rep.cls.value} on [{P}]: {'PASS' if rep.passed else 'FAIL'}"
              f"  max residual {rep.max_residual:.3e}  tol {rep.tol:g}")
        for t in rep.trials:
            flag = "  blew up" if t.blew_up else ""
            print(f"  trial {t.trial}: residual {t.residual:.3e}  retries {t.retries}  redraws {t.redraws}{flag}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_report(args) -> int:
    net = _load(args)
    rep = synchrony_antisynchrony_report(net, args.method, n_limit=args.max_n, tol=args.tol, jobs=_jobs(args))
    ok = all(rep.agreement.values()) if rep.agreement else True
    if args.out == "json":
        _emit({"command": "report", **rep.to_dict()})
    else:
        print(f"|L_W| = {len(rep.lattice_W)}  |L_L| = {len(rep.lattice_L)}  union = {len(rep.union)}")
        for r in rep.rows:
            P, f = r["partition"], r["flags"]
            where = ("W" if r["in_W"] else "-") + ("L" if r["in_L"] else "-")
            cls = ", ".join(c.value for c in sorted_classes(f.preserving)) or "none"
            print(f"  [{P}]  dim {P.p}  {where}  {cls}")
        for k, v in rep.counts().items():
            print(f"  {k}: {v}")
        for t, a in rep.agreement.items():
            print(f"eigen vs brute on {t}: {'agree' if a else 'DISAGREE'}")
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polydiag",
        description="Synchrony and anti-synchrony subspaces of weighted networks.",
    )
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, outs=("json", "text")):
        p.add_argument("--network", required=True, help="network JSON file")
        p.add_argument("--out", choices=outs, default="text", help="output format (default text)")

    def jobs(p):
        p.add_argument("--jobs", type=int, default=None,
                       help="worker processes (default from POLYDIAG_JOBS, else 1)")

    p = sub.add_parser("laplacian", help="valencies, regularity and Laplacian")
    common(p)
    p.set_defaults(func=cmd_laplacian)

    p = sub.add_parser("classify", help="balance flags and preserving system classes of a partition")
    common(p)
    p.add_argument("--partition", required=True, help='signed labels, e.g. "1,1,-1,-1"')
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("lattice", help="enumerate the invariant lattices")
    common(p, ("json", "dot", "text"))
    p.add_argument("--matrix", choices=("W", "L", "both"), default="both")
    p.add_argument("--method", choices=("brute", "eigen", "both"), default="brute")
    p.add_argument("--max-n", type=int, default=8, help="brute-force size limit (default 8)")
    p.add_argument("--tol", type=float, default=1e-9, help="eigen method tolerance")
    jobs(p)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("quotient", help="quotient or symbolic quotient network")
    common(p, ("json", "dot", "text"))
    p.add_argument("--partition", required=True)
    p.add_argument("--kind", required=True,
                   choices=("balanced", "exo", "odd_symbolic", "linear_symbolic", "eo_symbolic",
                            "odd", "linear", "eo"))
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("simulate", help="certify flow invariance with sampled systems")
    common(p)
    p.add_argument("--partition", required=True)
    p.add_argument("--class", dest="cls", required=True, choices=[c.value for c in CLASS_ORDER])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--degree", type=int, default=3, help="polynomial degree bound (default 3)")
    jobs(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="union of both lattices with per-element classification")
    common(p)
    p.add_argument("--method", choices=("brute", "eigen", "both"), default="brute")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-9)
    jobs(p)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (OSError, NetworkFormatError, PartitionError, LatticeSizeError, UsageError, ValueError) as exc:
        print(f"polydiag {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
