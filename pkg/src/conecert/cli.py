"""Command-line interface.

Exit codes: 0 success / certified, 2 input error, 3 not certified (also used
for NOT_POSITIVE and failed classification).  Every report file echoes the
fully resolved configuration; output paths are left out of the echo so runs
that differ only in destination stay byte-identical.
"""

import argparse
import os
import sys

from .errors import ClassificationError, ConecertError, EncodingError
from .exposedness import (
    CertifyParams,
    Verdict,
    certify_exposed,
    classify,
    conjugate_obstruction_space,
)
from .linalg import DEFAULT_TOL, TolerancePolicy
from .maps import SearchParams, SeparableElement, is_positive, pairing
from .sampling import derive_seed, random_operator, random_psd, random_unit_vector, rng_from
from .serialization import (
    format_complex,
    load_json,
    map_from_json,
    map_to_json,
    matrix_from_json,
    matrix_to_json,
    report_to_dict,
    vector_to_json,
    write_json_atomic,
)

SOFT_DIM_CAP = 4


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("CONECERT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise EncodingError(f"CONECERT_SEED must be an integer, got {env!r}") from exc


def _tolerances(args) -> TolerancePolicy:
    rel = getattr(args, "rel_eps", None)
    floor = getattr(args, "abs_floor", None)
    if rel is None and floor is None:
        return DEFAULT_TOL
    return TolerancePolicy(
        rel_eps=DEFAULT_TOL.rel_eps if rel is None else rel,
        abs_floor=DEFAULT_TOL.abs_floor if floor is None else floor,
    )


def _tol_dict(tol: TolerancePolicy) -> dict:
    return {"rel_eps": tol.rel_eps, "abs_floor": tol.abs_floor}


def cmd_pairing(args) -> int:
    map_rep = map_from_json(load_json(args.map))
    obj = load_json(args.operator)
    if not isinstance(obj, dict):
        raise EncodingError("operator file must hold a JSON object")
    kind = obj.get("kind", "full" if "w" in obj else "product")
    if kind == "product":
        for key in ("x", "y"):
            if key not in obj:
                raise EncodingError("product operator needs 'x' and 'y' matrices")
        w = SeparableElement(
            x_factor=matrix_from_json(obj["x"]), y_factor=matrix_from_json(obj["y"])
        )
    elif kind == "full":
        if "w" not in obj:
            raise EncodingError("full operator needs a 'w' matrix")
        w = matrix_from_json(obj["w"])
    else:
        raise EncodingError(f"unknown operator kind {obj.get('kind')!r}")
    print(format_complex(pairing(map_rep, w)))
    return 0


def cmd_expose(args) -> int:
    a = matrix_from_json(load_json(args.A))
    seed = _resolve_seed(args.seed)
    tol = _tolerances(args)
    report = certify_exposed(
        a, transposed=args.transposed, params=CertifyParams(seed=seed, tol=tol)
    )
    payload = report_to_dict(report, include_timing=not args.no_timing)
    payload["config"] = {
        "command": "expose",
        "seed": seed,
        "transposed": bool(args.transposed),
        "tolerances": _tol_dict(tol),
    }
    if args.report:
        write_json_atomic(args.report, payload)
    print(f"verdict: {report.verdict.value}")
    print(f"nullspace dim: {report.nullspace.dim}")
    print(f"overlap with phi: {report.overlap_with_phi:.12f}")
    if report.verdict in (Verdict.EXPOSED_LINEAR, Verdict.EXPOSED_CONE_EVIDENCE):
        return 0
    return 2 if report.verdict is Verdict.INPUT_REJECTED else 3


def cmd_sweep(args) -> int:
    if args.n < 1 or args.m < 1:
        raise EncodingError("dimensions must be positive")
    if args.count < 0:
        raise EncodingError("count must be >= 0")
    if max(args.n, args.m) > SOFT_DIM_CAP:
        print(
            f"warning: dimensions above {SOFT_DIM_CAP} can be slow", file=sys.stderr
        )
    seed = _resolve_seed(args.seed)
    tol = _tolerances(args)
    os.makedirs(args.report, exist_ok=True)
    rng = rng_from(seed)
    ranks = range(1, min(args.n, args.m) + 1)
    verdict_counts: dict[str, int] = {}
    dim_hist: dict[str, int] = {}
    files = []
    not_certified = 0
    counter = 0
    for rank in ranks:
        for i in range(args.count):
            a = random_operator(rng, args.n, args.m, rank)
            for transposed in (False, True):
                run_seed = derive_seed(seed, 1000 + counter)
                counter += 1
                report = certify_exposed(
                    a, transposed=transposed, params=CertifyParams(seed=run_seed, tol=tol)
                )
                payload = report_to_dict(report, include_timing=not args.no_timing)
                payload["config"] = {
                    "command": "sweep",
                    "seed": seed,
                    "instance_seed": run_seed,
                    "n": args.n,
                    "m": args.m,
                    "rank": rank,
                    "instance": i,
                    "transposed": transposed,
                    "tolerances": _tol_dict(tol),
                }
                name = (
                    f"n{args.n}_m{args.m}_rank{rank}_i{i:03d}_"
                    f"{'T' if transposed else 'N'}.json"
                )
                write_json_atomic(os.path.join(args.report, name), payload)
                files.append(name)
                v = report.verdict.value
                verdict_counts[v] = verdict_counts.get(v, 0) + 1
                key = str(report.nullspace.dim)
                dim_hist[key] = dim_hist.get(key, 0) + 1
                if report.verdict is Verdict.NOT_CERTIFIED:
                    not_certified += 1
    summary = {
        "config": {
            "command": "sweep",
            "seed": seed,
            "n": args.n,
            "m": args.m,
            "count": args.count,
            "tolerances": _tol_dict(tol),
        },
        "reports": files,
        "verdict_counts": verdict_counts,
        "dimension_histogram": dim_hist,
        "not_certified": not_certified,
    }
    write_json_atomic(os.path.join(args.report, "summary.json"), summary)
    total = len(files)
    print(f"{total} runs ({args.count} per rank class, both flags)")
    for v in sorted(verdict_counts):
        print(f"  {v}: {verdict_counts[v]}")
    for d in sorted(dim_hist, key=int):
        print(f"  dim {d}: {dim_hist[d]}")
    return 0


def cmd_classify(args) -> int:
    map_rep = map_from_json(load_json(args.map))
    result = classify(map_rep, tol=args.tol)
    payload = {
        "case": result.case.value,
        "b": None if result.b is None else matrix_to_json(result.b),
        "r": None if result.r_matrix is None else matrix_to_json(result.r_matrix),
        "zeta": None if result.zeta is None else vector_to_json(result.zeta),
        "phase_convention": "largest-magnitude entry real positive",
        "config": {"command": "classify", "tol": args.tol},
    }
    if args.report:
        write_json_atomic(args.report, payload)
    print(f"case: {result.case.value}")
    return 0


def cmd_positivity(args) -> int:
    map_rep = map_from_json(load_json(args.map))
    seed = _resolve_seed(args.seed)
    search = SearchParams(
        restarts=args.restarts, max_iters=args.iters, seed=seed, backend=args.backend
    )
    result = is_positive(map_rep, search)
    payload = {
        "verdict": result.verdict,
        "min_value": result.min_value,
        "restarts_used": result.restarts_used,
        "xi": vector_to_json(result.xi),
        "eta": vector_to_json(result.eta),
        "config": {
            "command": "positivity",
            "seed": seed,
            "restarts": args.restarts,
            "iters": args.iters,
        },
    }
    if args.report:
        write_json_atomic(args.report, payload)
    print(f"verdict: {result.verdict}")
    print(f"min block value: {result.min_value:.6e}")
    return 0 if result.positive else 3


def cmd_obstruction(args) -> int:
    a = matrix_from_json(load_json(args.A))
    result = conjugate_obstruction_space(a, tol=_tolerances(args))
    payload = {
        "dim": result.dim,
        "singular_values": [float(s) for s in result.singular_values],
        "basis": [matrix_to_json(b) for b in result.basis],
        "config": {"command": "obstruction"},
    }
    if args.report:
        write_json_atomic(args.report, payload)
    print(f"solution dim: {result.dim}")
    return 0


def cmd_random_map(args) -> int:
    seed = _resolve_seed(args.seed)
    rng = rng_from(seed)
    if args.kind == "ad":
        a = random_operator(rng, args.n, args.m, args.rank)
        obj = map_to_json("ad", A=a, transposed=args.transposed)
    else:
        r = random_psd(rng, args.m, args.rank)
        zeta = random_unit_vector(rng, args.n)
        obj = map_to_json("omega_q", R=r, zeta=zeta)
    write_json_atomic(args.out, obj)
    print(args.out)
    return 0


def _add_tol_flags(p) -> None:
    p.add_argument("--rel-eps", dest="rel_eps", type=float, default=None,
                   help="relative singular value cutoff (default 1e-12)")
    p.add_argument("--abs-floor", dest="abs_floor", type=float, default=None,
                   help="absolute singular value floor (default 1e-14)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conecert",
        description="Numerical exposedness certificates for conjugation-type positive maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pairing", help="evaluate the duality pairing <map, W>")
    p.add_argument("map", help="map JSON file")
    p.add_argument("operator", help="operator JSON: product {x,y} or full {w}")
    p.set_defaults(func=cmd_pairing)

    p = sub.add_parser("expose", help="certify that ad_A spans an exposed ray")
    p.add_argument("A", help="matrix JSON file for A")
    p.add_argument("--transposed", action="store_true",
                   help="certify X -> A X^T A* instead of X -> A X A*")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--report", default=None, help="write the report JSON here")
    p.add_argument("--no-timing", action="store_true",
                   help="omit wall_time_ms for byte-identical reruns")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_expose)

    p = sub.add_parser("sweep", help="batch certification across rank classes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--count", type=int, default=5, help="instances per rank class")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--report", required=True, help="output directory")
    p.add_argument("--no-timing", action="store_true")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("classify", help="sort a map into AD / AD_TRANSPOSE / OMEGA_Q")
    p.add_argument("map", help="map JSON file")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("positivity", help="evidence-based block positivity search")
    p.add_argument("map", help="map JSON file")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--backend", choices=("auto", "numba", "numpy"), default=None)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_positivity)

    p = sub.add_parser("obstruction", help="solution space of the kernel-implication system")
    p.add_argument("A", help="matrix JSON file for A")
    p.add_argument("--report", default=None)
    _add_tol_flags(p)
    p.set_defaults(func=cmd_obstruction)

    p = sub.add_parser("random-map", help="generate a seeded random map JSON")
    p.add_argument("--kind", choices=("ad", "omega_q"), default="ad")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--transposed", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_random_map)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ClassificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConecertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
