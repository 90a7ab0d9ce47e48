"""Command-line entry point: ``heightlab <group> <command> [options]``.

Output is JSON with sorted keys and floats printed to 17 significant
digits, so identical arguments (including ``--seed``) give byte-identical
output.  Exit status is 0 on success, 1 on a domain error (reported as
``{"error": ..., "detail": ...}``) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from . import arakelov, archimedean, elliptic, heights, northcott, polyring
from .archimedean import MCParams
from .errors import HeightlabError, ParseError

SEED_ENV = "HEIGHTLAB_SEED"


@dataclass(frozen=True)
class Config:
    params: MCParams
    output: str = "json"
    budget: int = northcott.DEFAULT_BUDGET


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == int(x) and abs(x) < 1e17:
        return str(int(x))
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and 17-significant-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _text(obj, prefix="") -> str:
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            v = obj[k]
            if isinstance(v, (dict, list)):
                lines.append(f"{prefix}{k}:")
                lines.append(_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)):
                lines.append(f"{prefix}[{i}]")
                lines.append(_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}- {_scalar(v)}")
    else:
        lines.append(prefix + _scalar(obj))
    return "\n".join(lines)


def _scalar(v):
    return _fmt_float(v) if isinstance(v, float) else str(v)


# ---------------------------------------------------------------------------
# argument helpers


def _parse_point(text: str, nvars: int):
    entries = polyring.split_list(text)
    if not entries:
        raise ParseError("a point needs at least one coordinate", 0)
    return polyring.normalize_projective(
        [polyring.parse_rational(e, nvars) for e in entries])


def _parse_caps(text: str, d: int):
    s = text.strip()
    if s.startswith("["):
        parts = polyring.split_list(s)
    else:
        parts = [p for p in s.split(",") if p.strip()]
    try:
        caps = [int(p) for p in parts]
    except ValueError as exc:
        raise ParseError(f"bad degree caps {text!r}") from exc
    if len(caps) == 1 and d > 1:
        caps = caps * d
    return caps


def _curve_vars(args) -> int:
    if args.vars is not None:
        return args.vars
    blob = args.curve + (getattr(args, "point", "") or "")
    return 1 if ("t" in blob or "z1" in blob) else 0


def _parse_ec_point(E, text: str):
    entries = polyring.split_list(text, "(", ")")
    if len(entries) != 2:
        raise ParseError("expected a point (x, y)", 0)
    return E.point(*(polyring.parse_rational(e, E.nvars) for e in entries))


def _curve(args):
    nvars = _curve_vars(args)
    coeffs = [polyring.parse_rational(e, nvars)
              for e in polyring.split_list(args.curve)]
    return elliptic.EllipticCurve.from_coeffs(coeffs, nvars)


# ---------------------------------------------------------------------------
# commands


def cmd_poly_parse(args, cfg):
    if args.rational:
        r = polyring.parse_rational(args.poly, args.vars)
        return {"num": str(r.num), "den": str(r.den), "nvars": args.vars}
    f = polyring.parse_poly(args.poly, args.vars)
    out = {
        "poly": str(f),
        "nvars": args.vars,
        "terms": [[list(e), c] for e, c in f.items()],
        "coeff_norm": f.coeff_norm(),
    }
    if f and args.vars:
        out["degrees"] = list(f.degrees())
    return out


def cmd_measure_v(args, cfg):
    f = polyring.parse_poly(args.poly, args.vars)
    est = archimedean.v_measure(f, cfg.params)
    if args.vars <= 1 and f:
        v = archimedean.jensen_v1(f)
    else:
        v = math.exp(est.mean)
    return {
        "v": v,
        "log_v": est.mean,
        "stderr": est.stderr,
        "samples": est.samples_used,
        "seed": est.seed,
    }


def cmd_height_point(args, cfg):
    point = _parse_point(args.point, args.vars)
    pol = heights.PolarizationChoice.parse(args.pol)
    h = heights.naive_height(point, pol, cfg.params)
    out = h.as_dict()
    out["point"] = [str(f) for f in point.coords]
    out["polarization"] = str(pol)
    return out


def cmd_height_enumerate(args, cfg):
    caps = _parse_caps(args.caps, args.vars)
    spec = northcott.EnumSpec(
        M=args.M, n=args.dim, d=args.vars, deg_caps=caps, params=cfg.params,
        classify_band=args.band, budget=cfg.budget, bound=args.bound,
        polarization=heights.PolarizationChoice.parse(args.pol))
    return [r.as_dict() for r in northcott.enumerate_bounded(spec)]


def cmd_ec_canonical_height(args, cfg):
    E = _curve(args)
    P = _parse_ec_point(E, args.point)
    pol = heights.PolarizationChoice.parse(args.pol)
    ch = elliptic.canonical_height(E, P, pol, args.tol, args.ncap, cfg.params)
    return ch.as_dict()


def cmd_ec_is_torsion(args, cfg):
    E = _curve(args)
    P = _parse_ec_point(E, args.point)
    pol = heights.PolarizationChoice.parse(args.pol)
    v = elliptic.is_torsion(E, P, pol, args.mcap, cfg.params, args.tol, args.ncap)
    return v.as_dict()


def cmd_arakelov_constants(args, cfg):
    sigma = arakelov.fs_self_intersection(cfg.params if args.verify else None)
    out = {
        "sigma": sigma,
        "e": {str(d): arakelov.e_d(d) for d in range(1, 7)},
    }
    if args.verify:
        est = arakelov.verify_fs_self_intersection(cfg.params)
        out["sigma_numeric"] = {"mean": est.mean, "stderr": est.stderr,
                                "samples": est.samples_used, "seed": est.seed}
    if args.c is not None or args.d is not None:
        if args.c is None or args.d is None:
            raise HeightlabError("--c and --d must be given together")
        out["lemma42_e"] = {"c": args.c, "d": args.d,
                            "value": arakelov.lemma42_e(args.c, args.d)}
    return out


def cmd_nevanlinna_T(args, cfg):
    f = polyring.parse_rational(args.f, 1)
    params = cfg.params
    counting, prox = heights.nevanlinna_parts(f, args.r, params)
    return {
        "T": counting + prox.mean,
        "counting": counting,
        "proximity": prox.mean,
        "proximity_error": prox.stderr,
        "nodes": prox.samples_used,
    }


# ---------------------------------------------------------------------------
# parser


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("sampling and output")
    g.add_argument("--seed", type=int, default=None,
                   help=f"u64 seed (default: ${SEED_ENV} or 0)")
    g.add_argument("--samples", type=int, default=1_000_000)
    g.add_argument("--batch", type=int, default=10_000)
    g.add_argument("--target-stderr", type=float, default=None)
    g.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    g.add_argument("--budget", type=int, default=northcott.DEFAULT_BUDGET,
                   help="largest search space the enumerator will scan")
    mode = g.add_mutually_exclusive_group()
    mode.add_argument("--json", dest="output", action="store_const", const="json")
    mode.add_argument("--text", dest="output", action="store_const", const="text")
    p.set_defaults(output="json")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="heightlab",
        description="Arithmetic heights over finitely generated fields Q(z1..zd).")
    groups = parser.add_subparsers(dest="group", required=True)

    poly = groups.add_parser("poly", help="integer polynomials").add_subparsers(
        dest="command", required=True)
    p = poly.add_parser("parse", parents=[common],
                        help="expand a polynomial in Z[z1..zd] to canonical form")
    p.add_argument("--poly", required=True)
    p.add_argument("--vars", type=int, required=True)
    p.add_argument("--rational", action="store_true",
                   help="accept 'poly / poly' and reduce it")
    p.set_defaults(func=cmd_poly_parse)

    measure = groups.add_parser("measure", help="Mahler-type measures").add_subparsers(
        dest="command", required=True)
    p = measure.add_parser(
        "v", parents=[common],
        help="v(f) = exp of the average of log|f| over the product "
             "Fubini-Study measure")
    p.add_argument("--poly", required=True)
    p.add_argument("--vars", type=int, required=True)
    p.set_defaults(func=cmd_measure_v)

    height = groups.add_parser("height", help="naive heights").add_subparsers(
        dest="command", required=True)
    p = height.add_parser(
        "point", parents=[common],
        help="naive height of a point of P^n over Q(z1..zd) for the "
             "polarization arith, geom, nf or aux:i:c")
    p.add_argument("--pol", default="arith")
    p.add_argument("--point", required=True, help='e.g. "[z1^2 + 1, 3]"')
    p.add_argument("--vars", type=int, required=True)
    p.set_defaults(func=cmd_height_point)
    p = height.add_parser(
        "enumerate", parents=[common],
        help="all points of arithmetic height <= M within degree caps "
             "(Northcott finiteness)")
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--vars", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--caps", required=True, help='per-variable degree caps, "[1, 0]"')
    p.add_argument("--pol", default="arith")
    p.add_argument("--band", type=float, default=3.0,
                   help="borderline band in standard errors")
    p.add_argument("--bound", type=int, default=None,
                   help="override the coefficient bound")
    p.set_defaults(func=cmd_height_enumerate, samples=20_000, batch=20_000)

    ec = groups.add_parser("ec", help="elliptic curves").add_subparsers(
        dest="command", required=True)
    for name, func, text in (
        ("canonical-height", cmd_ec_canonical_height,
         "canonical height lim 4^-n h(x(2^n P)) by the Tate limit"),
        ("is-torsion", cmd_ec_is_torsion,
         "torsion test: exact order search, then canonical height vs error"),
    ):
        p = ec.add_parser(name, parents=[common], help=text)
        p.add_argument("--curve", required=True, help='"[a1, a2, a3, a4, a6]"')
        p.add_argument("--point", required=True, help='"(x, y)"')
        p.add_argument("--vars", type=int, default=None,
                       help="0 for Q, 1 for Q(t) (default: inferred)")
        p.add_argument("--pol", default="arith")
        p.add_argument("--tol", type=float, default=1e-3)
        p.add_argument("--ncap", type=int, default=None)
        if name == "is-torsion":
            p.add_argument("--mcap", type=int, default=16)
        p.set_defaults(func=func)

    ar = groups.add_parser("arakelov", help="intersection numbers").add_subparsers(
        dest="command", required=True)
    p = ar.add_parser(
        "constants", parents=[common],
        help="self-intersection sigma of (O(1), FS), e_d = d!(d-1)/4 at the "
             "divisors at infinity, and the auxiliary constant for (c, d)")
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--verify", action="store_true",
                   help="recompute sigma by Monte Carlo")
    p.set_defaults(func=cmd_arakelov_constants)

    nev = groups.add_parser("nevanlinna", help="Nevanlinna theory").add_subparsers(
        dest="command", required=True)
    p = nev.add_parser(
        "T", parents=[common],
        help="characteristic function T_f(r) = counting term + proximity term")
    p.add_argument("--f", required=True, help='rational function of z1 (or t)')
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_nevanlinna_T, samples=1 << 16, batch=1 << 16)
    return parser


def dispatch(argv=None) -> int:
    """Run one subcommand and return its exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        params = MCParams(samples=args.samples, seed=seed,
                          batch_size=min(args.batch, args.samples),
                          target_stderr=args.target_stderr,
                          threads=max(1, args.threads))
    except ValueError as exc:
        parser.error(str(exc))
    cfg = Config(params, args.output, args.budget)
    try:
        result = args.func(args, cfg)
        code = 0
    except HeightlabError as exc:
        result = {"error": type(exc).__name__, "detail": str(exc)}
        code = 1
    except (ValueError, ZeroDivisionError, IndexError) as exc:
        result = {"error": type(exc).__name__, "detail": str(exc)}
        code = 1
    out = dumps(result) if cfg.output == "json" else _text(result)
    stream = sys.stdout if code == 0 else sys.stderr
    if code and cfg.output == "json":
        stream = sys.stdout
    print(out, file=stream)
    return code


main = dispatch


def main_exit():
    sys.exit(dispatch())


if __name__ == "__main__":
    main_exit()
