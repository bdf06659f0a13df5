"""Command-line front end: sweep orchestration and machine-checkable JSON
reports.

Reports are deterministic byte for byte for a fixed configuration: summation
orders are fixed, JSON keys are sorted, exact rationals are rendered as p/q
strings and floating values as hex-significand strings.

Exit codes: 0 success, 1 tolerance or certification failure, 2 bad
configuration.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from . import __version__
from .exact import QQ, qq, qq_str
from .eisenstein import (
    LatticeParams,
    e_fourier,
    elliptic_maass_fourier,
    eval_fourier,
    g_fourier,
    lattice_sum,
    maass_fourier,
    raw_scale,
)
from .cocycle import (
    build_induced,
    certify_parameter,
    period_S,
    period_T,
    verify_relations,
)
from .invariant import (
    IdealClassTerm,
    QuadLatticeData,
    psi_gamma_shift,
    psi_value_ratio,
    hecke_assemble,
)
from .lseries import LFunctionSpec, lvalue_closed, lvalue_lerch_product, lvalue_numeric
from .modgroup import S, T, ResiduePair, in_index_set, index_set
from .numerics import mpc_json, mpf_hex, rational_reconstruct

MAX_WEIGHT = 16
MAX_LEVEL = 12
MAX_ORDER = 6

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2


@dataclass
class RunConfig:
    prec: int
    trunc: int
    radius: int
    tol: mpf
    out: str | None

    def validate(self, parser: argparse.ArgumentParser):
        if self.prec < 32:
            parser.error("--prec must be at least 32 bits")
        if self.trunc < 1 or self.radius < 1:
            parser.error("--trunc and --radius must be positive")
        if self.tol < mpf(2) ** (16 - self.prec):
            parser.error("--tol below what --prec supports (need tol >= 2^(16-prec))")
        return self


def _parse_lambda(text: str):
    try:
        l1, l2 = (int(t) for t in text.split(","))
        return (l1, l2)
    except Exception:
        raise argparse.ArgumentTypeError(f"expected 'l1,l2', got {text!r}")


def _parse_tau(text: str) -> mpc:
    try:
        re_s, im_s = text.split(",")
        tau = mpc(mpf(re_s), mpf(im_s))
    except Exception:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")
    if tau.imag <= 0:
        raise argparse.ArgumentTypeError("tau must have positive imaginary part")
    return tau


def _check_weight(parser, k, N, m=None):
    if not 2 <= k <= MAX_WEIGHT:
        parser.error(f"weight k must be in [2, {MAX_WEIGHT}]")
    if not 1 <= N <= MAX_LEVEL:
        parser.error(f"level N must be in [1, {MAX_LEVEL}]")
    if m is not None and not 2 <= m <= MAX_ORDER:
        parser.error(f"order m must be in [2, {MAX_ORDER}]")


def _emit(report: dict, config: RunConfig) -> None:
    text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _num(z) -> dict:
    out = mpc_json(z)
    out["dec"] = mp.nstr(mpc(z), 30)
    return out


GAMMAS = {"T": T, "S": S, "ST": S * T}


# ---------------------------------------------------------------------------


def cmd_fourier(args, config: RunConfig, parser) -> int:
    _check_weight(parser, args.k, args.N)
    lam = ResiduePair(args.N, *args.lam)
    kind = args.kind
    if kind is None:
        kind = "maass" if args.l is not None else "e"
    l = args.l or 0
    with mp.workprec(config.prec + 16):
        if kind == "e":
            series = e_fourier(args.k, lam, args.N, config.trunc)
            mode = "elliptic"
            scale = raw_scale(args.k, config.prec)
        elif kind == "g":
            series = g_fourier(args.k, lam, args.N, config.trunc, config.prec)
            mode = "congruence"
            scale = mpc(1)
        elif kind == "maass":
            series = maass_fourier(args.k, l, lam, args.N, config.trunc, config.prec)
            mode = "congruence"
            scale = mpc(1)
        elif kind == "elliptic":
            series = elliptic_maass_fourier(args.k, l, lam, args.N, config.trunc, config.prec)
            mode = "elliptic"
            scale = mpc(1)
        else:
            parser.error(f"unknown series kind {kind!r}")
        report = {"series": series.to_json(), "config": _config_json(config)}
        status = EXIT_OK
        if args.check_lattice:
            tau = args.tau if args.tau is not None else mpc(0, 1)
            value = eval_fourier(series, tau, config.prec) * scale
            oracle = lattice_sum(
                LatticeParams(args.k, l, args.N, lam, mode, config.radius), tau, config.prec
            )
            residual = abs(value - oracle)
            report["lattice_check"] = {
                "tau": _num(tau),
                "fourier_value": _num(value),
                "lattice_value": _num(oracle),
                "residual": mpf_hex(residual),
                "residual_dec": mp.nstr(residual, 8),
                "tolerance": mp.nstr(config.tol, 8),
                "pass": bool(residual < config.tol),
            }
            if residual >= config.tol:
                status = EXIT_TOLERANCE
    _emit(report, config)
    return status


def cmd_lvalues(args, config: RunConfig, parser) -> int:
    _check_weight(parser, args.k, args.N)
    lam = ResiduePair(args.N, *args.lam)
    if not in_index_set(lam, args.k):
        parser.error(f"parameter {lam} not admissible for weight {args.k}")
    rs = [args.r] if args.r is not None else list(range(1, args.k))
    records = []
    status = EXIT_OK
    with mp.workprec(config.prec + 16):
        spec = LFunctionSpec.for_e_series(args.k, lam, args.N, config.trunc)
        scale = raw_scale(args.k, config.prec)
        for r in rs:
            closed = lvalue_closed(args.k, lam, args.N, r)
            c_num = closed.numeric(config.prec)
            v_num = lvalue_numeric(spec, r, config.prec)
            v_ler = lvalue_lerch_product(args.k, lam, args.N, r, config.prec) / scale
            spread = max(abs(c_num - v_num), abs(c_num - v_ler), abs(v_num - v_ler))
            records.append(
                {
                    "r": r,
                    "closed": {
                        "one": closed.value.one.to_json(),
                        "i": closed.value.ipart.to_json(),
                    },
                    "closed_numeric": _num(c_num),
                    "mellin_numeric": _num(v_num),
                    "lerch_numeric": _num(v_ler),
                    "max_pairwise_diff": mp.nstr(spread, 8),
                    "pass": bool(spread < config.tol),
                }
            )
            if spread >= config.tol:
                status = EXIT_TOLERANCE
    _emit(
        {
            "k": args.k,
            "N": args.N,
            "lambda": list(args.lam),
            "values": records,
            "config": _config_json(config),
        },
        config,
    )
    return status


def cmd_periods(args, config: RunConfig, parser) -> int:
    _check_weight(parser, args.k, args.N)
    lam = ResiduePair(args.N, *args.lam)
    if not in_index_set(lam, args.k):
        parser.error(f"parameter {lam} not admissible for weight {args.k}")
    report = {
        "k": args.k,
        "N": args.N,
        "lambda": list(args.lam),
        "period_T": period_T(args.k, lam, args.N).to_json(),
        "period_S": period_S(args.k, lam, args.N).to_json(),
    }
    _emit(report, config)
    return EXIT_OK


def _sweep_cells(args, parser):
    if args.k is not None:
        ks = [args.k]
    else:
        ks = list(range(2, args.k_max + 1))
    if args.N is not None:
        ns = [args.N]
    else:
        ns = list(range(1, args.N_max + 1))
    for k in ks:
        for N in ns:
            _check_weight(parser, k, N)
    return ks, ns


def cmd_rationality(args, config: RunConfig, parser) -> int:
    ks, ns = _sweep_cells(args, parser)
    records = []
    failures = 0
    cells = 0
    for N in ns:
        for k in ks:
            lams = index_set(N, k)
            for lam in lams:
                original, modified, report = certify_parameter(k, lam, N)
                cells += 1
                if not report.certified:
                    failures += 1
                records.append(
                    report.to_json(
                        include_values=args.values, modified=modified, original=original
                    )
                )
    out = {
        "records": records,
        "summary": {"cells": cells, "certified": cells - failures, "failed": failures},
        "config": _config_json(config),
    }
    if cells == 0:
        out["warning"] = "empty sweep: no admissible parameters in the requested range"
    _emit(out, config)
    return EXIT_TOLERANCE if failures else EXIT_OK


def cmd_relations(args, config: RunConfig, parser) -> int:
    ks, ns = _sweep_cells(args, parser)
    records = []
    bad = 0
    for N in ns:
        for k in ks:
            lams = [ResiduePair(N, *args.lam)] if args.lam else index_set(N, k)
            for lam in lams:
                if not in_index_set(lam, k):
                    parser.error(f"parameter {lam} not admissible for weight {k}")
                ok = verify_relations(build_induced(k, lam, N))
                records.append(
                    {"k": k, "N": N, "lambda": [lam.l1, lam.l2], "relations_hold": ok}
                )
                if not ok:
                    bad += 1
    _emit({"records": records, "failed": bad, "config": _config_json(config)}, config)
    return EXIT_TOLERANCE if bad else EXIT_OK


def _load_lattice(args, parser) -> QuadLatticeData:
    if args.preset:
        return QuadLatticeData.preset(args.preset)
    if not args.data:
        parser.error("need --preset or --data")
    if not os.path.exists(args.data):
        parser.error(f"data file not found: {args.data}")
    with open(args.data, "r", encoding="utf-8") as fh:
        return QuadLatticeData.from_json(json.load(fh))


def cmd_invariant(args, config: RunConfig, parser) -> int:
    _check_weight(parser, 2 * args.m, 1, m=args.m)
    data = _load_lattice(args, parser)
    gammas = [args.gamma] if args.gamma else ["T", "S", "ST"]
    den_bound = 10 ** 6
    records = []
    failed = 0
    with mp.workprec(config.prec + 24):
        for name in gammas:
            gamma = GAMMAS.get(name)
            if gamma is None:
                parser.error(f"unknown generator {name!r} (choose from T, S, ST)")
            shift = psi_gamma_shift(args.m, data, gamma, M=config.trunc, prec=config.prec)
            rec = rational_reconstruct(shift, den_bound, config.tol, config.prec)
            records.append(
                {
                    "check": "gamma_shift",
                    "gamma": name,
                    "value": _num(shift),
                    "reconstructed": qq_str(rec) if rec is not None else None,
                }
            )
            if rec is None:
                failed += 1
        ratio = psi_value_ratio(args.m, data, data.lam, M=config.trunc, prec=config.prec)
        rec = rational_reconstruct(ratio, den_bound, config.tol, config.prec)
        records.append(
            {
                "check": "value_ratio",
                "value": _num(ratio),
                "reconstructed": qq_str(rec) if rec is not None else None,
            }
        )
        if rec is None:
            failed += 1
    _emit(
        {
            "m": args.m,
            "lattice": data.to_json(),
            "checks": records,
            "failed": failed,
            "config": _config_json(config),
        },
        config,
    )
    return EXIT_TOLERANCE if failed else EXIT_OK


def cmd_hecke(args, config: RunConfig, parser) -> int:
    _check_weight(parser, 2 * args.m, 1, m=args.m)
    if args.data:
        if not os.path.exists(args.data):
            parser.error(f"data file not found: {args.data}")
        with open(args.data, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        classes = [
            IdealClassTerm(
                QuadLatticeData.from_json(entry["lattice"]),
                qq(entry.get("norm_b", "1/1")),
                mpc(mpf(entry.get("chi", {}).get("re", "1")), mpf(entry.get("chi", {}).get("im", "0"))),
            )
            for entry in payload["classes"]
        ]
        w_f = payload.get("w_f", 1)
    elif args.preset:
        data = QuadLatticeData.preset(args.preset)
        classes = [IdealClassTerm(data, QQ(1), mpc(1))]
        w_f = {"gaussian": 4, "eisenstein": 6}[args.preset]
    else:
        parser.error("need --preset or --data")
    with mp.workprec(config.prec + 24):
        value = hecke_assemble(
            args.m, args.delta, classes, w_f, prec=config.prec, M=config.trunc
        )
    _emit(
        {
            "m": args.m,
            "delta": args.delta,
            "w_f": w_f,
            "classes": len(classes),
            "value": _num(value),
            "config": _config_json(config),
        },
        config,
    )
    return EXIT_OK


def _config_json(config: RunConfig) -> dict:
    return {
        "prec": config.prec,
        "trunc": config.trunc,
        "radius": config.radius,
        "tol": mpf_hex(config.tol),
    }


def _add_global_options(parser: argparse.ArgumentParser, suppress: bool):
    """Global flags are accepted both before and after the subcommand; the
    after-subcommand copies use SUPPRESS so they only override when given."""

    def default(value):
        return argparse.SUPPRESS if suppress else value

    default_prec = int(os.environ.get("EISP_PREC", "192"))
    parser.add_argument("--prec", type=int, default=default(default_prec), help="working precision in bits")
    parser.add_argument("--trunc", type=int, default=default(None), help="Fourier truncation order M")
    parser.add_argument("--radius", type=int, default=default(400), help="lattice-sum radius R")
    parser.add_argument("--tol", type=str, default=default(None), help="tolerance (default 2^-128)")
    parser.add_argument("--out", type=str, default=default(None), help="write the JSON report to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eisp",
        description="Eisenstein-series Fourier expansions, L-values, period "
        "cocycles and lattice invariants with exact certification.",
    )
    parser.add_argument("--version", action="version", version=f"eisp {__version__}")
    _add_global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fourier", help="Fourier coefficients, optionally checked against the lattice oracle")
    _add_global_options(p, suppress=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=_parse_lambda, required=True)
    p.add_argument("--kind", choices=["e", "g", "maass", "elliptic"], default=None)
    p.add_argument("--tau", type=_parse_tau, default=None)
    p.add_argument("--check-lattice", action="store_true")
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("lvalues", help="special L-values by all three routes")
    _add_global_options(p, suppress=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=_parse_lambda, required=True)
    p.add_argument("--r", type=int, default=None)
    p.set_defaults(func=cmd_lvalues)

    p = sub.add_parser("periods", help="period polynomials at T and S")
    _add_global_options(p, suppress=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=_parse_lambda, required=True)
    p.set_defaults(func=cmd_periods)

    p = sub.add_parser("rationality", help="coboundary modification and exact rationality certification")
    _add_global_options(p, suppress=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--N-max", type=int, default=6)
    p.add_argument("--values", action="store_true", help="include modified polynomial values")
    p.set_defaults(func=cmd_rationality)

    p = sub.add_parser("relations", help="exact cocycle-relation verification")
    _add_global_options(p, suppress=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--N-max", type=int, default=6)
    p.add_argument("--lambda", dest="lam", type=_parse_lambda, default=None)
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("invariant", help="lattice-invariant rationality certification")
    _add_global_options(p, suppress=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--preset", choices=["gaussian", "eisenstein"], default=None)
    p.add_argument("--data", type=str, default=None)
    p.add_argument("--gamma", type=str, default=None)
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("hecke", help="class-by-class L-value assembly")
    _add_global_options(p, suppress=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--preset", choices=["gaussian", "eisenstein"], default=None)
    p.add_argument("--data", type=str, default=None)
    p.set_defaults(func=cmd_hecke)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    prec = args.prec
    if args.command in ("invariant", "hecke") and prec < 256:
        prec = 256  # reconstruction thresholds are calibrated to 256 bits
    trunc = args.trunc
    if trunc is None:
        trunc = 400 if args.command in ("invariant", "hecke") else 200
    if args.tol is not None:
        tol = mpf(args.tol)
    elif args.command == "invariant":
        tol = mpf(10) ** -30
    else:
        tol = max(mpf(2) ** -128, mpf(2) ** (16 - prec))
    config = RunConfig(
        prec=prec, trunc=trunc, radius=args.radius, tol=tol, out=args.out
    ).validate(parser)
    return args.func(args, config, parser)


if __name__ == "__main__":
    sys.exit(main())
