"""Experiment scenarios: a model, an optional continuous component, a
moneyness regime, maturities and Monte Carlo settings.

Scenarios are JSON objects::

    {
      "model": {"kind": "cgmy", "C": 0.5, "G": 2, "M": 3.6, "Y": 1.5},
      "vol": {"kind": "none"},
      "moneyness": {"theta": 0.0, "regime": "pure-linear"},
      "maturities": [0.5, 0.25, 0.1, 0.05],
      "mc": {"n_paths": 1000000, "seed": 20240501},
      "spot": 1.0
    }

``vol`` may also be ``{"kind": "heston", "y0", "kappa", "theta", "eps",
"rho"}`` or ``{"kind": "brownian", "sigma"}``.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, replace

from .expansions import MoneynessSpec, Regime
from .levy import CGMYParams, model_from_dict, model_to_dict
from .montecarlo import HestonParams, MCConfig

__all__ = ["Scenario", "BUILTIN", "scenario_from_dict", "scenario_to_dict", "load_scenario"]

_FIG_MODEL = {"kind": "cgmy", "C": 0.5, "G": 2.0, "M": 3.6, "Y": 1.5}
_FIG_MC = {"n_paths": 1_000_000, "seed": 20240501, "chunk_size": 50_000}

BUILTIN = {
    "pure-jump-atm": {
        "model": _FIG_MODEL,
        "vol": {"kind": "none"},
        "moneyness": {"theta": 0.0, "regime": "pure-linear"},
        "maturities": [0.5, 0.25, 0.1, 0.05],
        "mc": _FIG_MC,
        "y_values": [1.2, 1.5, 1.8],
    },
    "heston-atm": {
        "model": _FIG_MODEL,
        "vol": {"kind": "heston", "y0": 0.16, "kappa": 1.0, "theta": 0.16, "eps": 1.0, "rho": 0.0},
        "moneyness": {"theta": 0.0, "regime": "sv-main"},
        "maturities": [0.25, 0.1, 0.05],
        "mc": _FIG_MC,
        "y_values": [1.2, 1.5, 1.8],
    },
    "brownian-atm": {
        "model": _FIG_MODEL,
        "vol": {"kind": "brownian", "sigma": 0.4},
        "moneyness": {"theta": 0.0, "regime": "sv-main"},
        "maturities": [0.25, 0.1, 0.05],
        "mc": _FIG_MC,
        "y_values": [1.2, 1.5, 1.8],
    },
}


@dataclass(frozen=True)
class Scenario:
    model: object
    vol: object
    moneyness: MoneynessSpec
    maturities: tuple
    mc: MCConfig
    spot: float = 1.0
    y_values: tuple = ()

    def __post_init__(self):
        if not self.spot > 0:
            raise ValueError(f"spot must be positive, got {self.spot}")
        if not self.maturities:
            raise ValueError("scenario has no maturities")
        for t in self.maturities:
            if not (t > 0 and math.isfinite(t)):
                raise ValueError(f"maturities must be positive and finite, got {t}")
        if (self.vol is None) == self.moneyness.regime.is_sv:
            raise ValueError(
                f"regime {self.moneyness.regime.value} does not match the volatility "
                f"component {self.vol_kind!r}")
        self.moneyness.check(self.model.Y)

    @property
    def vol_kind(self) -> str:
        if self.vol is None:
            return "none"
        return "heston" if isinstance(self.vol, HestonParams) else "brownian"

    @property
    def spot_vol(self) -> float | None:
        if self.vol is None:
            return None
        return self.vol.spot_vol if isinstance(self.vol, HestonParams) else float(self.vol)

    def with_y(self, Y: float) -> Scenario:
        if not isinstance(self.model, CGMYParams):
            raise ValueError("Y sweeps are supported for CGMY models only")
        return replace(self, model=replace(self.model, Y=Y))


def _vol_from_dict(d):
    kind = (d or {"kind": "none"}).get("kind", "none")
    if kind == "none":
        return None
    if kind == "heston":
        return HestonParams(float(d["y0"]), float(d["kappa"]), float(d["theta"]),
                            float(d["eps"]), float(d.get("rho", 0.0)))
    if kind == "brownian":
        sigma = float(d["sigma"])
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        return sigma
    raise ValueError(f"unknown vol kind {kind!r}")


def _vol_to_dict(vol):
    if vol is None:
        return {"kind": "none"}
    if isinstance(vol, HestonParams):
        return {"kind": "heston", "y0": vol.y0, "kappa": vol.kappa, "theta": vol.theta,
                "eps": vol.eps, "rho": vol.rho}
    return {"kind": "brownian", "sigma": vol}


def scenario_from_dict(d: dict) -> Scenario:
    m = d.get("moneyness", {})
    beta = m.get("beta")
    mc = dict(d.get("mc", {}))
    return Scenario(
        model=model_from_dict(d["model"]),
        vol=_vol_from_dict(d.get("vol")),
        moneyness=MoneynessSpec(float(m.get("theta", 0.0)), Regime(m.get("regime", "pure-linear")),
                                None if beta is None else float(beta)),
        maturities=tuple(float(t) for t in d["maturities"]),
        mc=MCConfig(**mc),
        spot=float(d.get("spot", 1.0)),
        y_values=tuple(float(y) for y in d.get("y_values", ())),
    )


def scenario_to_dict(s: Scenario) -> dict:
    mc = s.mc
    return {
        "model": model_to_dict(s.model),
        "vol": _vol_to_dict(s.vol),
        "moneyness": {"theta": s.moneyness.theta, "regime": s.moneyness.regime.value,
                      "beta": s.moneyness.beta},
        "maturities": list(s.maturities),
        "mc": {"n_paths": mc.n_paths, "seed": mc.seed, "n_steps": mc.n_steps,
               "chunk_size": mc.chunk_size, "workers": mc.workers, "antithetic": mc.antithetic},
        "spot": s.spot,
        "y_values": list(s.y_values),
    }


def load_scenario(name_or_path: str | None) -> dict:
    """Raw scenario dict from a builtin name or a JSON file (default
    ``pure-jump-atm``); overrides are applied to the dict before validation."""
    if name_or_path is None:
        name_or_path = "pure-jump-atm"
    if name_or_path in BUILTIN:
        return copy.deepcopy(BUILTIN[name_or_path])
    with open(name_or_path, encoding="utf-8") as fh:
        return json.load(fh)
