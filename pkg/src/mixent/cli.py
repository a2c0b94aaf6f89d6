"""Command-line entry point.

Exit codes: 0 success, 2 invalid flags, 3 hypothesis violation, 4 failed
verification.  Errors are reported on stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path


from . import __version__
from .besov import (FLAVORS, SmoothnessParams, besov_upper_pipeline, fit_slope,
                    geometric_grid, minimal_m0, pipeline_hypotheses, route)
from .core import INF, ExponentTuple, as_exponent, format_exponent
from .covering import (CoveringCertificate, CoveringError, check_covering, covering_certificates,
                       covering_upper_curve, cuboid_covering, default_provider, et_sparse_covering,
                       klss_budgets, klss_curve, verify_covering, zero_covering)
from .designs import ConstructionError, build_gv_code, build_subset_family
from .grid import MAX_ENUM_DIM, enumerate_grid, max_l1_mass, transform_grid
from .oracle import MAX_CELLS, OracleCapExceeded, empirical_entropy_curve
from .packing import (PackingCertificate, PackingError, antipodal_packing, cube_vertex_packing,
                      default_witness, packing_lower_curve, row_replication_packing,
                      two_level_sparse_packing, verify_packing)
from .rates import (HypothesisError, matching_rate, proof_scan_curve, regime_boundaries,
                    schuett_rate)

OUTPUT_ENV = "MIXENT_OUTPUT_DIR"
EXIT_OK, EXIT_FLAGS, EXIT_HYPOTHESIS, EXIT_VERIFY = 0, 2, 3, 4

log = logging.getLogger("mixent")


class FlagError(ValueError):
    pass


class VerificationFailed(RuntimeError):
    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise FlagError(message)


# ---------------------------------------------------------------- flag helpers


def _exponent(text: str) -> float:
    try:
        return as_exponent(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _add_exponents(p, names=("p", "q", "r", "u"), required=True):
    for name in names:
        p.add_argument(f"--{name}", type=_exponent, required=required,
                       help=f"exponent {name} in (0, inf]")


def _add_shape(p, d=True):
    p.add_argument("--b", type=_positive_int, required=True, help="outer dimension")
    if d:
        p.add_argument("--d", type=_positive_int, required=True, help="inner dimension")


def _add_output(p):
    p.add_argument("--out", help=f"output file (relative paths resolve under ${OUTPUT_ENV})")
    p.add_argument("--seed", type=_nonneg_int, default=0, help="random seed")


def _params(args) -> ExponentTuple:
    return ExponentTuple(args.p, args.q, args.r, args.u)


def _resolve(path: str) -> Path:
    out = Path(path)
    base = os.environ.get(OUTPUT_ENV)
    if base and not out.is_absolute():
        out = Path(base) / out
    out.parent.mkdir(parents=True, exist_ok=True)
    return out


def _emit(args, text: str):
    if getattr(args, "out", None):
        _resolve(args.out).write_text(text)
        print(f"wrote {_resolve(args.out)}")
    else:
        sys.stdout.write(text)


def _csv(header_comment: str, columns: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(f"# {header_comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        if math.isnan(v):
            return "nan"
        return repr(v)
    return v


def _ratio(a: float, b: float) -> float:
    if b == 0:
        return INF if a > 0 else float("nan")
    return a / b


def _header(args, **extra) -> str:
    parts = [f"mixent {__version__}", f"command={args.command}", f"seed={getattr(args, 'seed', 0)}"]
    parts += [f"{k}={format_exponent(v) if isinstance(v, float) else v}" for k, v in extra.items()]
    return " ".join(parts)


# ---------------------------------------------------------------- grid / designs


def cmd_grid(args):
    if args.b > MAX_ENUM_DIM:
        raise FlagError(f"--b must be <= {MAX_ENUM_DIM}")
    grid = enumerate_grid(args.b)
    lines = [f"# {_header(args, b=args.b)}"]
    if args.p is None:
        lines += [" ".join(v.as_strings()) for v in grid]
    else:
        lines += [" ".join(repr(x) for x in row) for row in transform_grid(grid, args.p)]
    mass = max_l1_mass(args.b)
    lines.append(f"# cardinality={len(grid)} max_l1_mass={mass.numerator}/{mass.denominator}"
                 f" ({float(mass):.6f})")
    _emit(args, "\n".join(lines) + "\n")


def cmd_designs(args):
    if args.kind == "gv":
        code = build_gv_code(args.m, args.s)
        data = code.as_dict()
    else:
        fam = build_subset_family(args.n, args.s, seed=args.seed)
        data = fam.as_dict()
    data["seed"] = args.seed
    _emit(args, json.dumps(data, indent=1) + "\n")


# ---------------------------------------------------------------- packing


def _build_packing(args) -> PackingCertificate:
    params = _params(args)
    c = args.construction
    if c == "two_level":
        return two_level_sparse_packing(params, args.b, args.d, args.s, args.t,
                                        max_points=args.max_points, seed=args.seed)
    if c == "row_replication":
        witness = default_witness(args.d, params.q, params.u)
        return row_replication_packing(witness, args.b, args.s, params.p, params.r,
                                       params.q, params.u, seed=args.seed)
    if c == "antipodal":
        return antipodal_packing(params, args.b, args.d)
    if c == "cube_vertices":
        return cube_vertex_packing(params, args.b, args.d)
    raise FlagError(f"unknown construction {c!r}")


def _packing_report(cert: PackingCertificate) -> dict:
    report = verify_packing(cert)
    if not report.ok:
        raise VerificationFailed("packing verification failed", report.as_dict())
    return report.as_dict()


def cmd_pack(args):
    if args.action == "build":
        cert = _build_packing(args)
        cert = PackingCertificate.from_json(cert.to_json())
        _packing_report(cert)
        _emit(args, cert.to_json() + "\n")
    else:
        cert = PackingCertificate.from_json(Path(args.file).read_text())
        print(json.dumps(_packing_report(cert), indent=1))


# ---------------------------------------------------------------- covering


def cmd_cover(args):
    if args.action == "verify":
        cert = CoveringCertificate.from_json(Path(args.file).read_text())
        report = check_covering(cert, args.samples, args.seed)
        if not report["ok"]:
            raise VerificationFailed("covering verification failed", report)
        print(json.dumps(report, indent=1))
        return
    params = _params(args)
    c = args.construction
    if c == "klss":
        curve = klss_curve(params, args.b, args.d, [args.k])
        budgets = klss_budgets(args.k, args.b, args.alpha) if args.alpha else None
        data = {"construction": "klss", "params": params.as_dict(),
                "shape": {"b": args.b, "d": args.d}, "budget": args.k, "seed": args.seed,
                "alpha": args.alpha, "budgets": budgets,
                "bound": [{"index": k, "value": v} for k, v, _ in curve.points]}
        _emit(args, json.dumps(data, indent=1) + "\n")
        return
    provider = default_provider(params, args.d)
    if c == "cuboid":
        cert = cuboid_covering(provider, params.p, params.r, args.b, args.k, params=params,
                               seed=args.seed)
    elif c in ("et", "edne"):
        cert = et_sparse_covering(provider, params.p, params.r, args.b, args.k, args.d,
                                  mode=c, params=params, seed=args.seed)
    elif c == "zero":
        cert = zero_covering(params, args.b, args.d)
    else:
        raise FlagError(f"unknown construction {c!r}")
    evidence = verify_covering(cert, args.samples, args.seed)
    cert = cert.with_coverage(evidence)
    if evidence.misses:
        raise VerificationFailed("sampled coverage failed", evidence.as_dict())
    _emit(args, cert.to_json() + "\n")


# ---------------------------------------------------------------- oracle / rates


def _oracle(params, b, d, kmax, mesh, max_points):
    n = None if mesh is None else max(1, int(round(1.0 / mesh)))
    return empirical_entropy_curve(params, b, d, kmax, n=n, max_points=max_points)


def cmd_oracle(args):
    params = _params(args)
    if args.b * args.d > MAX_CELLS:
        raise FlagError(f"oracle needs b*d <= {MAX_CELLS}")
    res = _oracle(params, args.b, args.d, args.kmax, args.mesh, args.max_points)
    rows = [(k, lo, up) for k, lo, up in zip(res.lower.ks, res.lower.values, res.upper.values)]
    head = _header(args, mesh=res.mesh_step, points=res.mesh_points, slack=res.slack)
    _emit(args, _csv(head, ["k", "lower", "upper"], rows))


def cmd_rates(args):
    params = _params(args)
    if args.kmin > args.kmax:
        raise FlagError("--kmin must not exceed --kmax")
    ks = list(range(args.kmin, args.kmax + 1))
    formula = [matching_rate(params, args.b, args.d, k) for k in ks]
    comp = [float("nan")] * len(ks)
    if args.compare == "scan":
        comp = [float(v) for v in proof_scan_curve(params, args.b, args.d, ks)]
    elif args.compare == "oracle":
        if args.b * args.d > MAX_CELLS:
            raise FlagError(f"oracle comparison needs b*d <= {MAX_CELLS}")
        res = _oracle(params, args.b, args.d, args.kmax, None, 4000)
        comp = [math.sqrt(res.lower.value_at(k) * res.upper.value_at(k)) for k in ks]
    elif args.compare == "certificates":
        curve = covering_upper_curve(params, args.b, args.d, args.kmax)
        comp = [curve.value_at(k) for k in ks]
    rows = []
    for k, f, c in zip(ks, formula, comp):
        rows.append((k, f.value, f.regime, c, _ratio(f.value, c) if not math.isnan(c) else c))
    head = _header(args, compare=args.compare or "none",
                   boundaries=";".join(f"{x:g}" for x in regime_boundaries(params, args.b, args.d)))
    _emit(args, _csv(head, ["k", "formula", "regime", "comparator", "ratio"], rows))


def cmd_schuett(args):
    rows = []
    for k in range(args.kmin, args.kmax + 1):
        res = schuett_rate(args.p, args.q, k, args.b)
        rows.append((k, res.value, res.regime, int(res.boundary)))
    _emit(args, _csv(_header(args), ["k", "value", "regime", "boundary"], rows))


# ---------------------------------------------------------------- besov


def _smoothness(args) -> SmoothnessParams:
    return SmoothnessParams(args.r0, args.r1, args.p0, args.p1, args.q0, args.q1, args.n)


def cmd_besov(args):
    params = _smoothness(args)
    if args.action == "check-hypotheses":
        rt = route(params, args.flavor)
        checks = pipeline_hypotheses(params, args.m, args.flavor)
        data = {"params": params.as_dict(), "flavor": args.flavor, "routing": rt.diagram,
                "small_smoothness": params.is_small_smoothness, "compact": params.is_compact,
                "m": args.m, "checks": [{"part": a, "name": b, "ok": c} for a, b, c in checks]}
        try:
            data["m0"] = minimal_m0(params, args.flavor)
        except HypothesisError as exc:
            data["m0"] = None
            data["m0_error"] = str(exc)
        print(json.dumps(data, indent=1))
        failed = [c for c in checks if not c[2]]
        if failed:
            raise HypothesisError(failed[0][1], f"{failed[0][0]} part fails {failed[0][1]}")
        return
    if args.mmin > args.mmax:
        raise FlagError("--mmin must not exceed --mmax")
    ms = geometric_grid(args.mmin, args.mmax, args.per_octave)
    results = [besov_upper_pipeline(params, m, args.flavor) for m in ms]
    slope = fit_slope(ms, [r.value for r in results]) if len(ms) >= 4 else float("nan")
    rows = [(r.m, r.index, r.value, r.low, r.middle, r.tail) for r in results]
    head = _header(args, flavor=args.flavor, n=args.n, slope=slope, expected=-params.gap)
    _emit(args, _csv(head, ["m", "index", "value", "low", "middle", "tail"], rows))
    print(f"slope {slope:.6f} expected {-params.gap:.6f}", file=sys.stderr)


# ---------------------------------------------------------------- verify / crosscheck


def cmd_verify(args):
    data = json.loads(Path(args.file).read_text())
    if "rowsets" in data:
        cert = CoveringCertificate.from_json_dict(data)
        report = check_covering(cert, args.samples, args.seed)
        if not report["ok"]:
            raise VerificationFailed("covering verification failed", report)
    elif "points" in data:
        report = _packing_report(PackingCertificate.from_json_dict(data))
    else:
        raise FlagError("file is neither a packing nor a covering certificate")
    print(json.dumps(report, indent=1))


def crosscheck_rows(params: ExponentTuple, b: int, d: int, kmax: int, seed: int = 0,
                    samples: int = 20_000, max_points: int = 4000):
    """Per-k formula, scan, covering upper, packing lower and oracle bracket."""
    ks = list(range(1, kmax + 1))
    formula = [matching_rate(params, b, d, k).value for k in ks]
    scan = [float(v) for v in proof_scan_curve(params, b, d, ks)]
    certs = covering_certificates(params, b, d, kmax)
    used = {}
    cover = covering_upper_curve(params, b, d, kmax, certs)
    for cert in certs:
        if cert.claimed_radius in cover.values and id(cert) not in used:
            ev = verify_covering(cert, samples, seed)
            if ev.misses:
                raise VerificationFailed("covering certificate failed sampling",
                                         {"construction": cert.construction, **ev.as_dict()})
            used[id(cert)] = True
    pack = packing_lower_curve(params, b, d, kmax, seed=seed)
    oracle = None
    if b * d <= MAX_CELLS:
        oracle = empirical_entropy_curve(params, b, d, kmax, max_points=max_points)
    rows = []
    for i, k in enumerate(ks):
        lo = oracle.lower.value_at(k) if oracle else float("nan")
        up = oracle.upper.value_at(k) if oracle else float("nan")
        cu, pl = cover.value_at(k), pack.value_at(k)
        rows.append({
            "k": k, "formula": formula[i], "scan": scan[i], "covering_upper": cu,
            "packing_lower": pl, "oracle_lower": lo, "oracle_upper": up,
            "formula/scan": _ratio(formula[i], scan[i]),
            "covering/formula": _ratio(cu, formula[i]),
            "formula/packing": _ratio(formula[i], pl),
            "oracle_upper/oracle_lower": _ratio(up, lo),
            "chain_ok": bool(oracle) and pl <= lo * (1 + 1e-9) and lo <= up and up <= cu * (1 + 1e-9),
        })
    return rows


def cmd_crosscheck(args):
    params = _params(args)
    rows = crosscheck_rows(params, args.b, args.d, args.kmax, args.seed, args.samples)
    cols = list(rows[0])
    text = _csv(_header(args, b=args.b, d=args.d), cols, [[r[c] for c in cols] for r in rows])
    _emit(args, text)
    if args.strict and not all(r["chain_ok"] for r in rows):
        bad = [r["k"] for r in rows if not r["chain_ok"]]
        raise VerificationFailed("bound chain violated", {"k": bad})


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mixent", description="Entropy numbers of mixed-norm embeddings.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("grid", help="dyadic grid enumeration")
    g.add_argument("action", choices=["enum"])
    g.add_argument("--b", type=_positive_int, required=True)
    g.add_argument("--p", type=_exponent, default=None, help="print v^(1/p) instead of v")
    _add_output(g)
    g.set_defaults(func=cmd_grid)

    d = sub.add_parser("designs", help="codes and subset families")
    d.add_argument("kind", choices=["gv", "subsets"])
    d.add_argument("--m", type=_positive_int, help="alphabet size (gv)")
    d.add_argument("--n", type=_positive_int, help="ground set size (subsets)")
    d.add_argument("--s", type=_positive_int, required=True)
    _add_output(d)
    d.set_defaults(func=cmd_designs)

    p = sub.add_parser("pack", help="packing certificates")
    psub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    pb = psub.add_parser("build")
    pb.add_argument("--construction", required=True,
                    choices=["two_level", "row_replication", "antipodal", "cube_vertices"])
    _add_exponents(pb)
    _add_shape(pb)
    pb.add_argument("--s", type=_positive_int, default=1)
    pb.add_argument("--t", type=_positive_int, default=1)
    pb.add_argument("--max-points", type=_positive_int, default=256)
    _add_output(pb)
    pv = psub.add_parser("verify")
    pv.add_argument("file")
    p.set_defaults(func=cmd_pack)

    c = sub.add_parser("cover", help="covering certificates")
    csub = c.add_subparsers(dest="action", required=True, parser_class=_Parser)
    cb = csub.add_parser("build")
    cb.add_argument("--construction", required=True, choices=["cuboid", "et", "edne", "klss", "zero"])
    _add_exponents(cb)
    _add_shape(cb)
    cb.add_argument("--k", type=_positive_int, required=True, help="budget index")
    cb.add_argument("--samples", type=_positive_int, default=100_000)
    cb.add_argument("--alpha", type=_positive_float, default=None, help="klss budget decay")
    _add_output(cb)
    cv = csub.add_parser("verify")
    cv.add_argument("file")
    cv.add_argument("--samples", type=_positive_int, default=100_000)
    cv.add_argument("--seed", type=_nonneg_int, default=0)
    c.set_defaults(func=cmd_cover)

    o = sub.add_parser("oracle", help="brute-force bracket on tiny instances")
    o.add_argument("action", choices=["sweep"])
    _add_exponents(o)
    _add_shape(o)
    o.add_argument("--kmax", type=_positive_int, required=True)
    o.add_argument("--mesh", type=_positive_float, default=None, help="mesh step (default: finest within cap)")
    o.add_argument("--max-points", type=_positive_int, default=4000)
    _add_output(o)
    o.set_defaults(func=cmd_oracle)

    r = sub.add_parser("rates", help="closed-form rates")
    rsub = r.add_subparsers(dest="action", required=True, parser_class=_Parser)
    rt = rsub.add_parser("table")
    _add_exponents(rt)
    _add_shape(rt)
    rt.add_argument("--kmin", type=_positive_int, default=1)
    rt.add_argument("--kmax", type=_positive_int, required=True)
    rt.add_argument("--compare", choices=["oracle", "scan", "certificates"], default=None)
    _add_output(rt)
    rt.set_defaults(func=cmd_rates)
    rs = rsub.add_parser("schuett")
    _add_exponents(rs, ("p", "q"))
    rs.add_argument("--b", type=_positive_int, required=True)
    rs.add_argument("--kmin", type=_positive_int, default=1)
    rs.add_argument("--kmax", type=_positive_int, required=True)
    _add_output(rs)
    rs.set_defaults(func=cmd_schuett)

    bz = sub.add_parser("besov", help="sequence-space pipeline")
    bz.add_argument("action", choices=["slope", "check-hypotheses"])
    for name in ("r0", "r1"):
        bz.add_argument(f"--{name}", type=float, required=True)
    _add_exponents(bz, ("p0", "p1", "q0", "q1"))
    bz.add_argument("--n", type=_positive_int, default=2)
    bz.add_argument("--flavor", choices=list(FLAVORS), default="b->b")
    bz.add_argument("--mmin", type=_positive_int, default=64)
    bz.add_argument("--mmax", type=_positive_int, default=16384)
    bz.add_argument("--per-octave", type=_positive_int, default=1)
    bz.add_argument("--m", type=_positive_int, default=1024, help="m for check-hypotheses")
    _add_output(bz)
    bz.set_defaults(func=cmd_besov)

    v = sub.add_parser("verify", help="verify any certificate file")
    v.add_argument("file")
    v.add_argument("--samples", type=_positive_int, default=100_000)
    v.add_argument("--seed", type=_nonneg_int, default=0)
    v.set_defaults(func=cmd_verify)

    x = sub.add_parser("crosscheck", help="all bounds side by side")
    _add_exponents(x)
    _add_shape(x)
    x.add_argument("--kmax", type=_positive_int, required=True)
    x.add_argument("--samples", type=_positive_int, default=20_000)
    x.add_argument("--strict", action="store_true", help="exit 4 if the bound chain breaks")
    _add_output(x)
    x.set_defaults(func=cmd_crosscheck)
    return parser


def _validate(args):
    if args.command == "designs":
        if args.kind == "gv" and args.m is None:
            raise FlagError("designs gv needs --m")
        if args.kind == "subsets" and args.n is None:
            raise FlagError("designs subsets needs --n")
    if args.command == "besov" and args.action == "slope" and args.mmin < 1:
        raise FlagError("--mmin must be positive")


def _fail(code: int, kind: str, message: str, **details) -> int:
    payload = {"error": kind, "message": message, "exit_code": code}
    if details:
        payload["details"] = details
    print(json.dumps(payload, default=str), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
    except FlagError as exc:
        return _fail(EXIT_FLAGS, "flag_validation", str(exc))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except FlagError as exc:
        return _fail(EXIT_FLAGS, "flag_validation", str(exc))
    except HypothesisError as exc:
        return _fail(EXIT_HYPOTHESIS, "hypothesis_violation", str(exc), hypothesis=exc.hypothesis)
    except VerificationFailed as exc:
        return _fail(EXIT_VERIFY, "verification_failed", str(exc), **exc.details)
    except (PackingError, CoveringError, ConstructionError, OracleCapExceeded) as exc:
        return _fail(EXIT_FLAGS, "precondition", str(exc))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        return _fail(EXIT_FLAGS, "input", f"{type(exc).__name__}: {exc}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
