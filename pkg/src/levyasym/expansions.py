"""Second-order short-maturity expansions of close-to-the-money calls.

Prices are per unit spot, ``E(S_t - S_0 e^{kappa_t})^+ / S_0``, with the
log-strike ``kappa_t = theta * t**e`` where ``e`` depends on the regime:

==============  ==========================  ========================
regime          kappa_t                     expansion
==============  ==========================  ========================
PURE_LINEAR     theta t                     d1 t^{1/Y} + d2 t
PURE_POWER      theta t^beta, 1/Y<beta<1    d1 t^{1/Y} + d2 t^beta
SV_MAIN         theta t^{(3-Y)/2}           d1 t^{1/2} + d2 t^{(3-Y)/2}
SV_POWER        theta t^beta                d1 t^{1/2} + d2 t^beta
==============  ==========================  ========================

A call's price falls by half the log-strike shift at leading order in the
Gaussian case and by ``P(Z_1 >= 0)`` times the shift in the pure-jump case,
so ``theta`` enters ``d2`` with a negative sign in every regime.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import RegimeError
from .levy import (
    CGMYParams,
    as_model,
    cgmy_eta,
    cgmy_gamma_tilde,
    cgmy_vartheta,
    eta_general,
    gamma_tilde_general,
    vartheta_general,
)
from .numerics import gamma_fn
from .stable import expected_positive_part, prob_nonnegative, stable_law_of

__all__ = [
    "Regime",
    "MoneynessSpec",
    "ExpansionCoefficients",
    "IVExpansion",
    "ModelConstants",
    "model_constants",
    "pure_jump_coeffs",
    "sv_coeffs",
    "sv_jump_term",
    "approx_price",
    "iv_coeffs_pure",
    "iv_coeffs_sv",
    "iv_expansion_sv",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


class Regime(enum.Enum):
    PURE_LINEAR = "pure-linear"
    PURE_POWER = "pure-power"
    SV_MAIN = "sv-main"
    SV_POWER = "sv-power"

    @property
    def is_sv(self) -> bool:
        return self in (Regime.SV_MAIN, Regime.SV_POWER)

    @property
    def is_power(self) -> bool:
        return self in (Regime.PURE_POWER, Regime.SV_POWER)


def beta_bounds(regime: Regime, Y: float) -> tuple[float, float]:
    """Open interval of admissible ``beta`` for a power regime."""
    if regime is Regime.PURE_POWER:
        return 1.0 / Y, 1.0
    if regime is Regime.SV_POWER:
        return 0.5, (3.0 - Y) / 2.0
    raise RegimeError(f"regime {regime.value} has no beta")


@dataclass(frozen=True)
class MoneynessSpec:
    """Log-moneyness ``kappa_t = theta * t**exponent`` and its regime.

    ``beta`` is required for the power regimes and forbidden otherwise.
    Its admissible range depends on ``Y`` and is checked by
    :meth:`check` (boundary values are rejected, never coerced).
    """

    theta: float = 0.0
    regime: Regime = Regime.PURE_LINEAR
    beta: float | None = None

    def __post_init__(self):
        regime = Regime(self.regime)
        object.__setattr__(self, "regime", regime)
        if not math.isfinite(self.theta):
            raise RegimeError(f"theta must be finite, got {self.theta}")
        if regime.is_power and self.beta is None:
            raise RegimeError(f"regime {regime.value} needs beta")
        if not regime.is_power and self.beta is not None:
            raise RegimeError(f"regime {regime.value} takes no beta")

    def check(self, Y: float) -> None:
        if self.regime.is_power:
            lo, hi = beta_bounds(self.regime, Y)
            if not lo < self.beta < hi:
                raise RegimeError(
                    f"beta={self.beta} outside the open interval ({lo:.6g}, {hi:.6g}) "
                    f"for regime {self.regime.value} with Y={Y}")

    def exponent(self, Y: float) -> float:
        self.check(Y)
        if self.regime is Regime.PURE_LINEAR:
            return 1.0
        if self.regime is Regime.SV_MAIN:
            return (3.0 - Y) / 2.0
        return self.beta

    def log_strike(self, t: float, Y: float) -> float:
        if not t > 0:
            raise ValueError(f"maturity must be positive, got {t}")
        return self.theta * t ** self.exponent(Y)


@dataclass(frozen=True)
class ExpansionCoefficients:
    d1: float
    exp1: float
    d2: float
    exp2: float

    def __post_init__(self):
        if not self.exp1 < self.exp2:
            raise ValueError(f"need exp1 < exp2, got {self.exp1}, {self.exp2}")
        if not self.d1 > 0:
            raise ValueError(f"leading coefficient must be positive, got {self.d1}")


@dataclass(frozen=True)
class IVExpansion:
    """``sigma_hat(t) = sigma1 t^exp1 + sigma2 t^exp2 + o(t^exp2)``."""

    sigma1: float
    exp1: float
    sigma2: float
    exp2: float
    kind: str

    def value(self, t: float, order: int = 2) -> float:
        if not t > 0:
            raise ValueError(f"maturity must be positive, got {t}")
        v = self.sigma1 * t ** self.exp1
        if order == 2:
            v += self.sigma2 * t ** self.exp2
        elif order != 1:
            raise ValueError(f"order must be 1 or 2, got {order}")
        return v


@dataclass(frozen=True)
class ModelConstants:
    eta: float
    gamma_tilde: float
    vartheta: float
    prob_nonneg: float
    expected_positive: float


def model_constants(model) -> ModelConstants:
    """Constants entering the expansions; CGMY uses closed forms, other
    models go through quadrature."""
    law = stable_law_of(model)
    if isinstance(model, CGMYParams):
        eta, gt, vt = cgmy_eta(model), cgmy_gamma_tilde(model), cgmy_vartheta(model)
    else:
        model = as_model(model)
        eta, gt, vt = eta_general(model), gamma_tilde_general(model), vartheta_general(model)
    return ModelConstants(eta, gt, vt, prob_nonnegative(law), expected_positive_part(law))


def pure_jump_coeffs(model, m: MoneynessSpec, constants: ModelConstants | None = None
                     ) -> ExpansionCoefficients:
    if m.regime.is_sv:
        raise RegimeError(f"pure-jump expansion needs a pure regime, got {m.regime.value}")
    Y = model.Y
    exp2 = m.exponent(Y)
    k = constants or model_constants(model)
    if m.regime is Regime.PURE_LINEAR:
        d2 = k.vartheta + (k.gamma_tilde - m.theta) * k.prob_nonneg
    else:
        d2 = -m.theta * k.prob_nonneg
    return ExpansionCoefficients(k.expected_positive, 1.0 / Y, d2, exp2)


def sv_jump_term(model, sigma0: float) -> float:
    """Contribution of the jumps to the second-order coefficient when a
    continuous component with spot volatility ``sigma0`` is present."""
    if not sigma0 > 0:
        raise ValueError(f"spot volatility must be positive, got {sigma0}")
    Y = model.Y
    return (2.0 ** (-(Y + 1.0) / 2.0) / math.sqrt(math.pi) * gamma_fn(1.0 - Y / 2.0)
            * (model.c_plus + model.c_minus) / (Y * (Y - 1.0)) * sigma0 ** (1.0 - Y))


def sv_coeffs(model, sigma0: float, m: MoneynessSpec) -> ExpansionCoefficients:
    if not m.regime.is_sv:
        raise RegimeError(f"stochastic-volatility expansion needs an SV regime, got {m.regime.value}")
    if not sigma0 > 0:
        raise ValueError(f"spot volatility must be positive, got {sigma0}")
    Y = model.Y
    exp2 = m.exponent(Y)
    d2 = -0.5 * m.theta
    if m.regime is Regime.SV_MAIN:
        d2 += sv_jump_term(model, sigma0)
    return ExpansionCoefficients(sigma0 / _SQRT_2PI, 0.5, d2, exp2)


def approx_price(c: ExpansionCoefficients, t: float, order: int = 2) -> float:
    if not t > 0:
        raise ValueError(f"maturity must be positive, got {t}")
    first = c.d1 * t ** c.exp1
    if order == 1:
        return first
    if order == 2:
        return first + c.d2 * t ** c.exp2
    raise ValueError(f"order must be 1 or 2, got {order}")


def iv_coeffs_pure(model, theta: float = 0.0, constants: ModelConstants | None = None
                   ) -> IVExpansion:
    """Implied-volatility expansion in the linear pure-jump regime.

    A Black-Scholes call with total deviation ``s`` and log-strike ``k``
    is worth ``s / sqrt(2 pi) - k / 2`` to the orders involved, so
    ``sigma2 = sqrt(2 pi) (d2 + theta / 2)``.
    """
    c = pure_jump_coeffs(model, MoneynessSpec(theta, Regime.PURE_LINEAR), constants)
    return IVExpansion(_SQRT_2PI * c.d1, 1.0 / model.Y - 0.5,
                       _SQRT_2PI * (c.d2 + 0.5 * theta), 0.5, "pure-jump")


def iv_coeffs_sv(model, sigma0: float, theta: float = 0.0) -> IVExpansion:
    """Implied-volatility expansion in the main SV regime.

    The strike shift costs exactly the Black-Scholes ``-kappa / 2``, so
    ``theta`` drops out of the correction term.
    """
    c = sv_coeffs(model, sigma0, MoneynessSpec(theta, Regime.SV_MAIN))
    return IVExpansion(sigma0, 0.0, _SQRT_2PI * (c.d2 + 0.5 * theta),
                       1.0 - model.Y / 2.0, "sv")


def iv_expansion_sv(model, sigma0: float, theta: float, t: float) -> float:
    return iv_coeffs_sv(model, sigma0, theta).value(t)
