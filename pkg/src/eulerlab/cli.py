"""Command-line surface.

Every subcommand loads a curve record from the fixture dataset, runs the
corresponding computation, writes CSV (and a JSON summary) into --out, and
prints progress to stderr only. Exit codes: 0 success, 1 validation or
usage failure, 2 numerical-check failure. Runs are deterministic: the same
arguments produce byte-identical files for any --workers value, and no
randomness is used anywhere (--seedless exists to assert that).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .config import DEFAULT, Config, default_checkpoints
from .curves import ap_table
from .dataset import (
    default_dataset_path,
    find_record,
    load_dataset,
    write_ap_table_csv,
    write_csv,
    write_json,
    write_zero_json,
)
from .errors import EulerLabError, NumericalError
from .eulerprod import (
    explicit_formula_residual,
    log_partial_euler_product,
    np_product_log,
    psi_e,
    theorem_a_rhs,
)
from .lfunction import dirichlet_coeffs, find_zeros, l_derivatives_at_1, required_n_max

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK = 2


def _progress(msg: str) -> None:
    print(f"[eulerlab] {msg}", file=sys.stderr)


def _add_common(p: argparse.ArgumentParser, needs_curve: bool = True) -> None:
    p.add_argument("--data", help="fixture dataset path (default: $EULERLAB_DATA or bundled)")
    if needs_curve:
        p.add_argument("--curve", required=True, help="curve label, e.g. 37a1")
    p.add_argument("--out", default="out", help="output directory (default: ./out)")
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads for prime sweeps (default: machine parallelism)")
    p.add_argument("--seedless", action="store_true",
                   help="assert that the run uses no randomness (always true)")


def _load(args) -> tuple:
    records = load_dataset(default_dataset_path(args.data))
    rec = find_record(records, args.curve)
    for flag in rec.flags:
        _progress(f"warning: {flag}")
    return rec, rec.to_model()


def _workers(args) -> int:
    return args.workers if args.workers else (os.cpu_count() or 1)


def _table(model, x_max, args, cfg=DEFAULT):
    _progress(f"building reduction table for {model.label} up to {x_max}")
    return ap_table(model, int(x_max), workers=_workers(args), cfg=cfg)


def _coeffs_for(model, args, cfg=DEFAULT, eps=None):
    need = required_n_max(model, eps or cfg.afe_eps, cfg)
    table = _table(model, max(need, 2), args, cfg)
    return dirichlet_coeffs(model, table, max(need, 2))


def _out_path(args, name: str) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def _cmd_ap_table(args, cfg: Config) -> int:
    rec, model = _load(args)
    table = _table(model, args.limit, args, cfg)
    path = _out_path(args, f"{rec.label}_ap_table_{args.limit}.csv")
    write_ap_table_csv(path, table)
    write_json(path.with_suffix(".json"), {
        "curve": rec.label, "limit": args.limit, "rows": len(table),
        "bad_primes": [rd.p for rd in table if rd.kind != "good"],
    })
    _progress(f"wrote {path} ({len(table)} rows)")
    return EXIT_OK


def _cmd_euler_product(args, cfg: Config) -> int:
    rec, model = _load(args)
    table = _table(model, args.xmax, args, cfg)
    xs = default_checkpoints(cfg, args.xmax)
    rows = []
    for x in xs:
        rows.append((x, args.s, log_partial_euler_product(model, table, x, args.s),
                     np_product_log(model, table, x)))
    path = _out_path(args, f"{rec.label}_euler_product_{int(args.xmax)}.csv")
    write_csv(path, ["x", "s", "log_partial_product", "np_product_log"], rows)
    write_json(path.with_suffix(".json"), {
        "curve": rec.label, "x_max": args.xmax, "s": args.s,
        "checkpoints": len(rows), "final_np_product_log": rows[-1][3],
    })
    _progress(f"wrote {path}")
    return EXIT_OK


def _cmd_psi(args, cfg: Config) -> int:
    rec, model = _load(args)
    table = _table(model, args.xmax, args, cfg)
    rows = []
    for x in default_checkpoints(cfg, args.xmax):
        pt = psi_e(model, table, x)
        rows.append((pt.x, pt.psi, pt.bound_ratio if pt.bound_ratio is not None else ""))
    path = _out_path(args, f"{rec.label}_psi_{int(args.xmax)}.csv")
    write_csv(path, ["x", "psi", "bound_ratio"], rows)
    write_json(path.with_suffix(".json"), {
        "curve": rec.label, "x_max": args.xmax, "checkpoints": len(rows),
        "final_psi": rows[-1][1],
    })
    _progress(f"wrote {path}")
    return EXIT_OK


def _cmd_zeros(args, cfg: Config) -> int:
    rec, model = _load(args)
    coeffs = _coeffs_for(model, args, cfg)
    _progress(f"scanning critical line up to t = {args.tmax}")
    values = l_derivatives_at_1(model, coeffs, cfg=cfg)
    zeros = find_zeros(model, coeffs, args.tmax, values=values, cfg=cfg)
    path = _out_path(args, f"{rec.label}_zeros_{args.tmax:g}.json")
    write_zero_json(path, rec, zeros, values)
    csv_path = _out_path(args, f"{rec.label}_zeros_{args.tmax:g}.csv")
    write_csv(csv_path, ["gamma", "multiplicity"],
              [(g, m) for g, m in zip(zeros.gammas, zeros.mults)])
    _progress(f"wrote {path} ({sum(zeros.mults)} zeros with multiplicity)")
    return EXIT_OK


def _cmd_explicit_check(args, cfg: Config) -> int:
    rec, model = _load(args)
    table = _table(model, max(args.x, 2), args, cfg)
    coeffs = _coeffs_for(model, args, cfg)
    zeros = rec.zero_list()
    chk = explicit_formula_residual(model, table, zeros, args.x, args.s, args.tmax,
                                    coeffs, cfg)
    path = _out_path(args, f"{rec.label}_explicit_{args.x:g}_{args.s:g}.csv")
    write_csv(path, ["x", "s", "t_cut", "lhs", "pole_term", "log_deriv",
                     "zero_sum", "trivial", "residual"],
              [(chk.x, chk.s, chk.t_cut, chk.lhs, chk.pole_term, chk.log_deriv,
                chk.zero_sum, chk.trivial, chk.residual)])
    threshold = cfg.explicit_residual_threshold if args.s <= 1.5 else cfg.strong_regime_threshold
    ok = abs(chk.residual) < threshold
    write_json(path.with_suffix(".json"), {
        "curve": rec.label, "x": args.x, "s": args.s, "t_cut": args.tmax,
        "residual": chk.residual, "threshold": threshold, "pass": bool(ok),
    })
    _progress(f"residual {chk.residual:+.6e} (threshold {threshold:g})")
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_theorem_a(args, cfg: Config) -> int:
    rec, model = _load(args)
    xs = sorted(args.x or [1e3, 1e4, 1e5])
    table = _table(model, max(xs), args, cfg)
    coeffs = _coeffs_for(model, args, cfg)
    values = rec.special_values()
    zeros = rec.zero_list()
    rows = []
    gaps = []
    for x in xs:
        bd = theorem_a_rhs(model, table, coeffs, values, zeros, x, args.s, args.tmax, cfg)
        lhs = log_partial_euler_product(model, table, x, args.s)
        gap = abs(lhs - bd.total)
        gaps.append((x, gap, bd.err_bound + bd.r_tail))
        rows.append((bd.x, bd.s, bd.log_l, bd.li_term, bd.r_term, bd.u_term,
                     bd.total, lhs, bd.err_bound))
    path = _out_path(args, f"{rec.label}_theorem_a_{args.s:g}.csv")
    write_csv(path, ["x", "s", "logL", "li_term", "r_term", "u_term",
                     "total", "lhs", "err_bound"], rows)
    ok = all(g <= band for _, g, band in gaps) and gaps[-1][1] < gaps[0][1]
    write_json(path.with_suffix(".json"), {
        "curve": rec.label, "s": args.s, "t_cut": args.tmax,
        "gaps": [{"x": x, "gap": g, "band": b} for x, g, b in gaps],
        "pass": bool(ok),
    })
    _progress(f"gaps: {', '.join(f'{g:.4f}@{x:g}' for x, g, _ in gaps)}")
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_verify_bsd(args, cfg: Config) -> int:
    rec, model = _load(args)
    table = _table(model, args.xmax, args, cfg)
    conv = experiments.bsd_product_scan(model, table, rec.special_values(),
                                        default_checkpoints(cfg, args.xmax), cfg=cfg)
    path = _out_path(args, f"{rec.label}_bsd_{int(args.xmax)}.csv")
    write_csv(path, ["x", "observed", "predicted", "deviation", "s_path_gap"],
              [(r.x, r.observed, r.predicted, r.deviation, r.s_path_gap)
               for r in conv.rows])
    if conv.rank == 0:
        ok = abs(conv.rows[-1].deviation) <= cfg.bsd_deviation_ceiling
        trend = None
    else:
        # the oscillation-robust trend: pooled decade medians on a dense grid
        lo = max(100.0, args.xmax / 1000.0)
        n = max(2, int(round(64 * math.log10(args.xmax / lo)))) + 1
        dense = [float(v) for v in np.geomspace(lo, args.xmax, n)]
        fine = experiments.bsd_product_scan(model, table, rec.special_values(),
                                            dense, cfg=cfg)
        first = [abs(r.deviation) for r in fine.rows if r.x <= lo * 10.0]
        last = [abs(r.deviation) for r in fine.rows if r.x > args.xmax / 10.0]
        trend = {"first_decade_median": float(np.median(first)),
                 "last_decade_median": float(np.median(last))}
        ok = trend["last_decade_median"] < trend["first_decade_median"]
    write_json(path.with_suffix(".json"), {
        "curve": rec.label, "rank": conv.rank, "log_c": conv.log_c,
        "final_deviation": conv.rows[-1].deviation,
        "trend": trend,
        "pass": bool(ok),
    })
    _progress(f"final deviation {conv.rows[-1].deviation:+.4f}")
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_mertens(args, cfg: Config) -> int:
    rec, model = _load(args)
    table = _table(model, args.xmax, args, cfg)
    xs = [x for x in default_checkpoints(cfg, args.xmax) if x >= 3.0]
    rows = [(x, experiments.mertens_b_estimate(model, table, x)) for x in xs]
    path = _out_path(args, f"{rec.label}_mertens_{int(args.xmax)}.csv")
    write_csv(path, ["x", "b_hat"], rows)
    b_hi = experiments.mertens_b_estimate(model, table, args.xmax)
    b_lo = experiments.mertens_b_estimate(model, table, args.xmax / 10.0)
    ok = abs(b_hi - b_lo) < cfg.mertens_stability
    write_json(path.with_suffix(".json"), {
        "curve": rec.label, "b_hat_final": b_hi, "b_hat_decade_earlier": b_lo,
        "drift": b_hi - b_lo, "tolerance": cfg.mertens_stability, "pass": bool(ok),
    })
    _progress(f"B-hat drift over last decade: {b_hi - b_lo:+.5f}")
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_u1_limit(args, cfg: Config) -> int:
    rec, model = _load(args)
    table = _table(model, args.xmax, args, cfg)
    xs = default_checkpoints(cfg, args.xmax)
    rows = experiments.u1_limit_check(model, table, xs, cfg)
    path = _out_path(args, f"{rec.label}_u1_{int(args.xmax)}.csv")
    write_csv(path, ["x", "u1", "deviation"],
              [(r.x, r.u1, r.deviation) for r in rows])
    ok = abs(rows[-1].deviation) < cfg.u1_tolerance
    write_json(path.with_suffix(".json"), {
        "curve": rec.label, "u1_final": rows[-1].u1,
        "limit": experiments.U1_LIMIT, "deviation": rows[-1].deviation,
        "tolerance": cfg.u1_tolerance, "pass": bool(ok),
    })
    _progress(f"U_1({args.xmax:g}) deviation {rows[-1].deviation:+.5f}")
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_excursions(args, cfg: Config) -> int:
    rec, model = _load(args)
    table = _table(model, args.xmax, args, cfg)
    report = experiments.psi_excursion_monitor(model, table, args.xmax, args.threshold, cfg)
    path = _out_path(args, f"{rec.label}_excursions_{int(args.xmax)}.csv")
    write_csv(path, ["x_lo", "x_hi", "log_measure"],
              [(lo, hi, math.log(hi / lo)) for lo, hi in report.intervals])
    ceiling = math.log(math.log(args.xmax))
    ok = report.total_log_measure < ceiling
    write_json(path.with_suffix(".json"), {
        "curve": rec.label, "threshold": report.threshold,
        "intervals": len(report.intervals),
        "total_log_measure": report.total_log_measure,
        "max_ratio": report.max_ratio,
        "diagnostic_ceiling": ceiling, "pass": bool(ok),
    })
    _progress(f"excursion measure {report.total_log_measure:.4f} (ceiling {ceiling:.4f})")
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_zero_fit(args, cfg: Config) -> int:
    rec, model = _load(args)
    fit = experiments.zero_count_fit(rec.zero_list(), args.tmax, cfg)
    path = _out_path(args, f"{rec.label}_zero_fit_{args.tmax:g}.json")
    envelope = cfg.zero_fit_envelope * math.log(args.tmax)
    ok = fit.alpha > 0 and fit.max_residual <= envelope
    write_json(path, {
        "curve": rec.label, "t_max": args.tmax, "alpha": fit.alpha, "c": fit.c,
        "max_residual": fit.max_residual, "zeros_used": fit.zeros_used,
        "envelope": envelope, "pass": bool(ok),
    })
    _progress(f"alpha {fit.alpha:.4f}, c {fit.c:.4f}, max residual {fit.max_residual:.3f}")
    return EXIT_OK if ok else EXIT_CHECK


# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="eulerlab",
        description="Desk-scale experiments on partial Euler products of "
                    "elliptic-curve L-functions.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ap-table", help="write the reduction table p,kind,ap,np")
    _add_common(p)
    p.add_argument("--limit", type=int, required=True)
    p.set_defaults(func=_cmd_ap_table)

    p = sub.add_parser("euler-product", help="log partial Euler product along checkpoints")
    _add_common(p)
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--s", type=float, default=1.0)
    p.set_defaults(func=_cmd_euler_product)

    p = sub.add_parser("psi", help="psi_E checkpoints")
    _add_common(p)
    p.add_argument("--xmax", type=float, required=True)
    p.set_defaults(func=_cmd_psi)

    p = sub.add_parser("zeros", help="critical-line zero scan")
    _add_common(p)
    p.add_argument("--tmax", type=float, required=True)
    p.set_defaults(func=_cmd_zeros)

    p = sub.add_parser("explicit-check", help="truncated explicit-formula residual")
    _add_common(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.set_defaults(func=_cmd_explicit_check)

    p = sub.add_parser("theorem-a", help="product-asymptotic decomposition check")
    _add_common(p)
    p.add_argument("--x", type=float, action="append",
                   help="checkpoint (repeatable; default 1e3 1e4 1e5)")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--tmax", type=float, default=25.0)
    p.set_defaults(func=_cmd_theorem_a)

    p = sub.add_parser("verify-bsd", help="product vs C (log x)^r convergence table")
    _add_common(p)
    p.add_argument("--xmax", type=float, required=True)
    p.set_defaults(func=_cmd_verify_bsd)

    p = sub.add_parser("mertens", help="Mertens-type constant stabilisation")
    _add_common(p)
    p.add_argument("--xmax", type=float, required=True)
    p.set_defaults(func=_cmd_mertens)

    p = sub.add_parser("u1-limit", help="U_1(x) against log(1/sqrt 2)")
    _add_common(p)
    p.add_argument("--xmax", type=float, required=True)
    p.set_defaults(func=_cmd_u1_limit)

    p = sub.add_parser("excursions", help="psi_E excursion monitor")
    _add_common(p)
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--threshold", type=float, default=None,
                   help="ratio threshold lambda (default from config)")
    p.set_defaults(func=_cmd_excursions)

    p = sub.add_parser("zero-fit", help="zero-counting density fit")
    _add_common(p)
    p.add_argument("--tmax", type=float, required=True)
    p.set_defaults(func=_cmd_zero_fit)

    return ap


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    cfg = DEFAULT
    try:
        return args.func(args, cfg)
    except NumericalError as exc:
        _progress(f"numerical failure: {exc}")
        return EXIT_CHECK
    except EulerLabError as exc:
        _progress(f"error: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _progress(f"i/o error: {exc}")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
