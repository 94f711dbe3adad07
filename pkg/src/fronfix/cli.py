"""Command-line front end.

Subcommands: solve, truncation-study, order-study, stability-scan,
oracle-compare. Exit code 0 on success, 1 on validation problems (bad flags,
invalid parameters, unreadable config), 2 on numerical failure (with the
failing step in the message).

Flags can also come from a JSON config file (--config); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .analysis import (
    AmplificationQuery,
    amplification_factor,
    lemma1_check,
    observed_order,
    y_truncation_study,
)
from .errors import FronfixError, ValidationError
from .model import ModelParams, build_grid, validate_params
from .oracles import binomial_american_put, european_put_closed_form, psor_american_put
from .reporting import emit_csv, emit_plot_script, emit_study_csv, emit_summary, fmt
from .scheme import price_at, run_solver

__all__ = ["run_cli", "main"]


def _add_model_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--r", type=float, default=None, help="risk-free rate per year")
    sub.add_argument("--sigma", type=float, default=None, help="volatility per sqrt-year")
    sub.add_argument("--E", type=float, default=None, help="strike price")
    sub.add_argument("--T", type=float, default=None, help="expiry in years")
    sub.add_argument("--alpha", type=float, default=None,
                     help="fractional order in (0,1]; 1 = classical scheme")
    sub.add_argument("--config", type=str, default=None,
                     help="JSON file with defaults for any flag")
    sub.add_argument("--out", type=str, default=None, help="output directory")
    sub.add_argument("--seed", type=int, default=None,
                     help="seed recorded for randomized sweeps")


def _add_grid_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--M", type=int, default=None, help="spatial node count")
    sub.add_argument("--mu", type=float, default=None, help="grid ratio dtau/dy^2")
    sub.add_argument("--Y", type=str, default=None,
                     help="truncation bound (default 4*E); comma list for studies")


_DEFAULTS = {
    "r": 0.1, "sigma": 0.2, "E": 1.0, "T": 1.0, "alpha": 1.0,
    "M": 100, "mu": 20.0, "Y": None, "out": "out", "seed": 0,
    "refinements": 2, "S0": None, "steps": 5000,
    "alphas": "0.3,0.6,0.9", "growth": "0.1,1,10",
    "history_terms": "1,10,100", "wavenumbers": 20,
    "omega": 1.4, "Ms": 400, "Nt": 400,
}


def _merge_config(args: argparse.Namespace) -> dict:
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError([f"config file unreadable: {exc}"])
        if not isinstance(loaded, dict):
            raise ValidationError(["config file must hold a JSON object"])
        merged.update(loaded)
    for key, val in vars(args).items():
        if key in ("command", "config"):
            continue
        if val is not None:
            merged[key] = val
    return merged


def _params(cfg: dict) -> ModelParams:
    p = ModelParams(
        r=float(cfg["r"]), sigma=float(cfg["sigma"]), E=float(cfg["E"]),
        T=float(cfg["T"]), alpha=float(cfg["alpha"]),
    )
    report = validate_params(p)
    if not report.valid:
        raise ValidationError(list(report.violations))
    return p


def _single_Y(cfg: dict, p: ModelParams) -> float:
    if cfg["Y"] is None:
        return 4.0 * p.E
    # studies accept comma lists; single-run modes need one value
    text = str(cfg["Y"])
    vals = [float(tok) for tok in text.split(",") if tok]
    if len(vals) != 1:
        raise ValidationError(["this mode expects a single Y"])
    return vals[0]


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_solve(cfg: dict) -> int:
    p = _params(cfg)
    out = _out_dir(cfg)
    run = run_solver(p, int(cfg["M"]), float(cfg["mu"]), _single_Y(cfg, p))
    emit_csv(run, out)
    rep = lemma1_check(p, run.grid, run.surface.xf)
    emit_summary(run, rep, out / "summary.json", extra={"seed": int(cfg["seed"])})
    emit_plot_script(run, out / "boundary_value.svg")
    print(f"solved: N={run.grid.N} xf(T)={fmt(run.surface.xf[-1])} "
          f"price(S=E)={fmt(price_at(run, p.E))}")
    print(f"outputs in {out}")
    return 0


def _cmd_truncation(cfg: dict) -> int:
    p = _params(cfg)
    out = _out_dir(cfg)
    if cfg["Y"] is None:
        ys = [1.0, 2.0, 4.0]
    else:
        ys = [float(tok) for tok in str(cfg["Y"]).split(",") if tok]
    rows = y_truncation_study(p, int(cfg["M"]), float(cfg["mu"]), ys)
    emit_study_csv(rows, out / "truncation.csv")
    for row in rows:
        print(f"Y={row.Y:g} M={row.M} xf(T)={fmt(row.xf_final)}")
    return 0


def _cmd_order(cfg: dict) -> int:
    p = _params(cfg)
    out = _out_dir(cfg)
    base = build_grid(p, int(cfg["M"]), float(cfg["mu"]), _single_Y(cfg, p))
    est = observed_order(p, base, int(cfg["refinements"]))
    payload = {
        "spatial_price_rates": list(est.spatial_price_rates),
        "spatial_xf_rates": list(est.spatial_xf_rates),
        "temporal_price_rates": list(est.temporal_price_rates),
        "temporal_xf_rates": list(est.temporal_xf_rates),
        "spatial_table": [list(r) for r in est.spatial_table],
        "temporal_table": [list(r) for r in est.temporal_table],
    }
    (out / "order.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"spatial rate (price): {est.spatial_rate:.3f}")
    print(f"temporal rate (price): {est.temporal_rate:.3f}")
    return 0


def _cmd_stability(cfg: dict) -> int:
    p_base = _params(cfg)
    out = _out_dir(cfg)
    g = build_grid(p_base, int(cfg["M"]), float(cfg["mu"]), _single_Y(cfg, p_base))
    alphas = [float(t) for t in str(cfg["alphas"]).split(",") if t]
    growths = [float(t) for t in str(cfg["growth"]).split(",") if t]
    terms = [int(t) for t in str(cfg["history_terms"]).split(",") if t]
    n_b = int(cfg["wavenumbers"])
    bs = [k * math.pi / g.dy / n_b for k in range(1, n_b + 1)]
    lines = ["alpha,a,n,b,lambda"]
    worst = 0.0
    for alpha in alphas:
        p = ModelParams(p_base.r, p_base.sigma, p_base.E, p_base.T, alpha)
        for a in growths:
            for n in terms:
                for b in bs:
                    res = amplification_factor(AmplificationQuery(b, a, n, p, g))
                    worst = max(worst, abs(res.lam))
                    lines.append(
                        f"{fmt(alpha)},{fmt(a)},{n},{fmt(b)},{fmt(res.lam)}"
                    )
    (out / "stability.csv").write_text("\n".join(lines) + "\n")
    print(f"max |lambda| over scan: {worst:.6f} ({'stable' if worst < 1 else 'UNSTABLE'})")
    return 0 if worst < 1.0 else 2


def _cmd_oracle_compare(cfg: dict) -> int:
    p = _params(cfg)
    out = _out_dir(cfg)
    s0 = float(cfg["S0"]) if cfg["S0"] is not None else p.E
    run = run_solver(p, int(cfg["M"]), float(cfg["mu"]), _single_Y(cfg, p))
    ff_price = price_at(run, s0)
    tree = binomial_american_put(p, s0, int(cfg["steps"]))
    psor = psor_american_put(p, s0, int(cfg["Ms"]), int(cfg["Nt"]), float(cfg["omega"]))
    euro = european_put_closed_form(p, s0)
    payload = {
        "S0": s0,
        "front_fixing": ff_price,
        "front_fixing_boundary": float(p.E * run.surface.xf[-1]),
        "binomial": tree.price,
        "psor": psor.price,
        "psor_boundary": psor.boundary_estimate,
        "european": euro,
    }
    (out / "oracle_compare.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )
    for key in ("front_fixing", "binomial", "psor", "european"):
        print(f"{key:>13}: {payload[key]:.6f}")
    return 0


def run_cli(argv: list[str]) -> int:
    parser = argparse.ArgumentParser(
        prog="fronfix",
        description="American put pricing by the front-fixing Crank-Nicolson scheme",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("solve", "run the solver and write surface/boundary/summary"),
        ("truncation-study", "final boundary for several truncation bounds"),
        ("order-study", "observed convergence order on nested grids"),
        ("stability-scan", "amplification-factor scan over Fourier modes"),
        ("oracle-compare", "compare against binomial/PSOR/European oracles"),
    ):
        sub = subs.add_parser(name, help=helptext)
        _add_model_flags(sub)
        _add_grid_flags(sub)
        if name == "order-study":
            sub.add_argument("--refinements", type=int, default=None)
        if name == "stability-scan":
            sub.add_argument("--alphas", type=str, default=None)
            sub.add_argument("--growth", type=str, default=None)
            sub.add_argument("--history-terms", dest="history_terms", type=str, default=None)
            sub.add_argument("--wavenumbers", type=int, default=None)
        if name == "oracle-compare":
            sub.add_argument("--S0", type=float, default=None)
            sub.add_argument("--steps", type=int, default=None)
            sub.add_argument("--omega", type=float, default=None)
            sub.add_argument("--Ms", type=int, default=None)
            sub.add_argument("--Nt", type=int, default=None)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1

    handlers = {
        "solve": _cmd_solve,
        "truncation-study": _cmd_truncation,
        "order-study": _cmd_order,
        "stability-scan": _cmd_stability,
        "oracle-compare": _cmd_oracle_compare,
    }
    try:
        cfg = _merge_config(args)
        return handlers[args.command](cfg)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except FronfixError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
