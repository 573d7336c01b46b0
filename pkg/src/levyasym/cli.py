"""Command-line driver.

Subcommands::

    coeffs    expansion coefficients and model constants
    compare   Monte Carlo vs first/second-order approximations (CSV)
    mc-price  Monte Carlo prices only (CSV)
    check     model / variance-process diagnostics
    iv        implied-volatility expansion vs implied vol of MC prices

Exit codes: 0 success, 2 validation failure, 3 Monte Carlo instability.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings

from .black_scholes import implied_vol
from .errors import DomainError, MCInstabilityError, ModelValidationError, RegimeError
from .expansions import (
    ExpansionCoefficients,
    Regime,
    approx_price,
    iv_coeffs_pure,
    iv_coeffs_sv,
    model_constants,
    pure_jump_coeffs,
    sv_coeffs,
    sv_jump_term,
)
from .levy import (
    CGMYParams,
    TemperedStableModel,
    Verdict,
    as_model,
    check_cgmy,
    exponential_moment_diagnostic,
    exponential_tempering,
    min_cond_diagnostic,
    parse_tempering,
)
from .montecarlo import FellerWarning, HestonParams, price_bm, price_pure_jump, price_sv
from .scenario import BUILTIN, Scenario, load_scenario, scenario_from_dict

EXIT_OK, EXIT_INVALID, EXIT_UNSTABLE = 0, 2, 3

COMPARE_COLUMNS = ["t", "mc_price", "mc_stderr", "approx1", "approx2", "err1", "err2",
                   "err1_over_t_exp2", "err2_over_t_exp2", "Y", "status"]


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".12g")


def _round(x):
    if isinstance(x, float) and math.isfinite(x):
        return float(format(x, ".12g"))
    return x


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help=f"JSON file or builtin name ({', '.join(BUILTIN)})")
    common.add_argument("--seed", type=int)
    common.add_argument("--paths", type=int)
    common.add_argument("--steps", type=int)
    common.add_argument("--chunk-size", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--antithetic", action="store_true", default=None)
    common.add_argument("--t", type=_float_list, help="comma-separated maturities")
    common.add_argument("--theta", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--regime", choices=[r.value for r in Regime])
    common.add_argument("--spot", type=float)
    common.add_argument("--y-values", type=_float_list, help="comma-separated Y sweep")
    common.add_argument("--out", help="write CSV here instead of stdout")
    common.add_argument("--json", action="store_true", help="JSON instead of text/CSV")

    parser = argparse.ArgumentParser(
        prog="levyasym", description="Short-maturity option price expansions for tempered stable models")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("coeffs", parents=[common], help="expansion coefficients")
    p = sub.add_parser("compare", parents=[common], help="MC vs expansions table")
    p.add_argument("--emit-plot-data", metavar="DIR",
                   help="also write one CSV per Y value into DIR")
    sub.add_parser("mc-price", parents=[common], help="Monte Carlo prices")
    sub.add_parser("check", parents=[common], help="model diagnostics")
    p = sub.add_parser("iv", parents=[common], help="implied-volatility expansion")
    p.add_argument("--no-mc", action="store_true", help="skip the Monte Carlo column")
    return parser


def apply_overrides(d: dict, args) -> dict:
    mc = d.setdefault("mc", {})
    for flag, key in (("seed", "seed"), ("paths", "n_paths"), ("steps", "n_steps"),
                      ("chunk_size", "chunk_size"), ("workers", "workers"),
                      ("antithetic", "antithetic")):
        v = getattr(args, flag, None)
        if v is not None:
            mc[key] = v
    m = d.setdefault("moneyness", {})
    if args.regime is not None:
        m["regime"] = args.regime
        if not Regime(args.regime).is_power:
            m.pop("beta", None)
    if args.theta is not None:
        m["theta"] = args.theta
    if args.beta is not None:
        m["beta"] = args.beta
    if args.t is not None:
        d["maturities"] = args.t
    if args.spot is not None:
        d["spot"] = args.spot
    if args.y_values is not None:
        d["y_values"] = args.y_values
    return d


def _scenario(args) -> Scenario:
    return scenario_from_dict(apply_overrides(load_scenario(args.scenario), args))


def _coefficients(s: Scenario) -> ExpansionCoefficients:
    if s.vol is None:
        return pure_jump_coeffs(s.model, s.moneyness)
    return sv_coeffs(s.model, s.spot_vol, s.moneyness)


def _mc(s: Scenario, t: float, kappa: float):
    if not isinstance(s.model, CGMYParams):
        raise ModelValidationError("the Monte Carlo pricer supports CGMY models only", "mc_model")
    if s.vol is None:
        return price_pure_jump(s.model, t, kappa, s.mc)
    if isinstance(s.vol, HestonParams):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", FellerWarning)
            return price_sv(s.model, s.vol, t, kappa, s.mc)
    return price_bm(s.model, s.vol, t, kappa, s.mc)


def _write_csv(rows, columns, dest):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    text = buf.getvalue()
    if dest is None:
        sys.stdout.write(text)
    else:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --- subcommands -------------------------------------------------------------

def coeffs_report(s: Scenario) -> dict:
    model, m = s.model, s.moneyness
    c = _coefficients(s)
    rep = {"regime": m.regime.value, "theta": m.theta, "beta": m.beta, "Y": model.Y,
           "d1": c.d1, "exp1": c.exp1, "d2": c.d2, "exp2": c.exp2}
    if s.vol is None:
        k = model_constants(model)
        rep.update(eta=k.eta, gamma_tilde=k.gamma_tilde, vartheta=k.vartheta,
                   prob_nonneg=k.prob_nonneg, expected_positive=k.expected_positive,
                   drift_b=as_model(model).drift_b)
        if m.regime is Regime.PURE_LINEAR:
            iv = iv_coeffs_pure(model, m.theta, k)
            rep.update(sigma1=iv.sigma1, iv_exp1=iv.exp1, sigma2=iv.sigma2, iv_exp2=iv.exp2)
    else:
        rep.update(spot_vol=s.spot_vol, jump_term=sv_jump_term(model, s.spot_vol))
        if m.regime is Regime.SV_MAIN:
            iv = iv_coeffs_sv(model, s.spot_vol, m.theta)
            rep.update(sigma1=iv.sigma1, iv_exp1=iv.exp1, sigma2=iv.sigma2, iv_exp2=iv.exp2)
    return rep


def cmd_coeffs(args) -> int:
    rep = coeffs_report(_scenario(args))
    if args.json:
        print(json.dumps({k: _round(v) for k, v in rep.items()}, indent=2))
    else:
        for k, v in rep.items():
            print(f"{k} = {fmt(v) if v is not None else '-'}")
    return EXIT_OK


def compare_rows(s: Scenario) -> list[dict]:
    c = _coefficients(s)
    rows = []
    for t in s.maturities:
        kappa = s.moneyness.log_strike(t, s.model.Y)
        a1 = s.spot * approx_price(c, t, 1)
        a2 = s.spot * approx_price(c, t, 2)
        scale = t ** c.exp2
        try:
            est = _mc(s, t, kappa)
            mc, se, status = s.spot * est.mean, s.spot * est.stderr, "ok"
        except MCInstabilityError:
            mc, se, status = math.nan, math.nan, "mc_unstable"
        rows.append({"t": t, "mc_price": mc, "mc_stderr": se, "approx1": a1, "approx2": a2,
                     "err1": a1 - mc, "err2": a2 - mc, "err1_over_t_exp2": (a1 - mc) / scale,
                     "err2_over_t_exp2": (a2 - mc) / scale, "Y": s.model.Y, "status": status})
    return rows


def _sweep(s: Scenario, args):
    ys = args.y_values
    if ys is None and getattr(args, "emit_plot_data", None):
        ys = list(s.y_values)
    if not ys:
        return [s]
    return [s.with_y(y) for y in ys]


def cmd_compare(args) -> int:
    base = _scenario(args)
    scenarios = _sweep(base, args)
    per_y = [(s, compare_rows(s)) for s in scenarios]
    rows = [r for _, rs in per_y for r in rs]
    _write_csv(rows, COMPARE_COLUMNS, args.out)
    if args.emit_plot_data:
        os.makedirs(args.emit_plot_data, exist_ok=True)
        stem = "pure_jump" if base.vol is None else base.vol_kind
        for s, rs in per_y:
            path = os.path.join(args.emit_plot_data, f"{stem}_Y{s.model.Y:g}.csv")
            _write_csv(rs, COMPARE_COLUMNS, path)
    return EXIT_UNSTABLE if any(r["status"] != "ok" for r in rows) else EXIT_OK


def cmd_mc_price(args) -> int:
    s = _scenario(args)
    rows = []
    for sc in _sweep(s, args):
        for t in sc.maturities:
            kappa = sc.moneyness.log_strike(t, sc.model.Y)
            est = _mc(sc, t, kappa)
            rows.append({"t": t, "kappa": kappa, "mc_price": sc.spot * est.mean,
                         "mc_stderr": sc.spot * est.stderr, "n_effective": est.n_effective,
                         "n_rejected": est.n_rejected, "Y": sc.model.Y})
    _write_csv(rows, ["t", "kappa", "mc_price", "mc_stderr", "n_effective", "n_rejected", "Y"],
               args.out)
    return EXIT_OK


def check_verdicts(d: dict) -> list[Verdict]:
    """Diagnostics straight from a raw scenario dict, so that invalid
    parameters are reported rather than rejected at construction."""
    md = d["model"]
    verdicts = []
    if md.get("kind") == "cgmy":
        C, G, M, Y = (float(md[k]) for k in ("C", "G", "M", "Y"))
        verdicts += check_cgmy(C, G, M, Y)
        c_plus = c_minus = C
        tempering = exponential_tempering(G, M) if G > 0 else None
    elif md.get("kind") == "general":
        c_plus, c_minus, Y = float(md["c_plus"]), float(md["c_minus"]), float(md["Y"])
        verdicts += [Verdict("intensity", c_plus >= 0 and c_minus >= 0 and c_plus + c_minus > 0,
                             c_plus + c_minus),
                     Verdict("Y in (1,2)", 1 < Y < 2, Y)]
        tempering = parse_tempering(md["tempering"])
    else:
        raise ValueError(f"unknown model kind {md.get('kind')!r}")
    if tempering is not None and all(v.passed for v in verdicts):
        model = TemperedStableModel(c_plus, c_minus, Y, tempering, validate=False)
        verdicts += [min_cond_diagnostic(model), exponential_moment_diagnostic(model)]
    vd = d.get("vol") or {}
    if vd.get("kind") == "heston":
        margin = 2.0 * float(vd["kappa"]) * float(vd["theta"]) - float(vd["eps"]) ** 2
        verdicts.append(Verdict("feller", margin > 0, margin, "2*kappa*theta - eps^2"))
    return verdicts


def cmd_check(args) -> int:
    d = apply_overrides(load_scenario(args.scenario), args)
    verdicts = check_verdicts(d)
    if args.json:
        print(json.dumps([{"name": v.name, "passed": v.passed, "estimate": _round(v.estimate),
                           "detail": v.detail} for v in verdicts], indent=2))
    else:
        for v in verdicts:
            status = "PASS" if v.passed else "FAIL"
            print(f"{v.name}: {status} estimate={fmt(v.estimate)} {v.detail}".rstrip())
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_INVALID


def cmd_iv(args) -> int:
    s = _scenario(args)
    m = s.moneyness
    if s.vol is None:
        if m.regime is not Regime.PURE_LINEAR:
            raise RegimeError("pure-jump implied-vol expansion needs the pure-linear regime")
        ive = iv_coeffs_pure(s.model, m.theta)
    else:
        if m.regime is not Regime.SV_MAIN:
            raise RegimeError("SV implied-vol expansion needs the sv-main regime")
        ive = iv_coeffs_sv(s.model, s.spot_vol, m.theta)
    rows = []
    for t in s.maturities:
        kappa = m.log_strike(t, s.model.Y)
        row = {"t": t, "kappa": kappa, "iv1": ive.value(t, 1), "iv2": ive.value(t, 2),
               "mc_price": math.nan, "mc_stderr": math.nan, "mc_iv": math.nan, "status": "skipped"}
        if not args.no_mc:
            try:
                est = _mc(s, t, kappa)
                row.update(mc_price=est.mean, mc_stderr=est.stderr, status="ok")
                row["mc_iv"] = implied_vol(est.mean, 1.0, math.exp(kappa), t)
            except MCInstabilityError:
                row["status"] = "mc_unstable"
            except DomainError:
                row["status"] = "no_iv"
        rows.append(row)
    _write_csv(rows, ["t", "kappa", "iv1", "iv2", "mc_price", "mc_stderr", "mc_iv", "status"],
               args.out)
    return EXIT_OK


COMMANDS = {"coeffs": cmd_coeffs, "compare": cmd_compare, "mc-price": cmd_mc_price,
            "check": cmd_check, "iv": cmd_iv}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ModelValidationError as exc:
        print(f"validation failed [{exc.condition}]: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except MCInstabilityError as exc:
        print(f"Monte Carlo unstable: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (RegimeError, DomainError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
