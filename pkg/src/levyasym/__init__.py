"""Short-maturity option price and implied-volatility expansions for
tempered stable-like exponential Lévy models, with a measure-changed
Monte Carlo pricer to check them against."""

from .black_scholes import BSQuote, call_price, implied_vol, vega
from .errors import (
    DomainError,
    MCInstabilityError,
    ModelValidationError,
    QuadratureDivergence,
    RegimeError,
)
from .expansions import (
    ExpansionCoefficients,
    IVExpansion,
    MoneynessSpec,
    Regime,
    approx_price,
    iv_coeffs_pure,
    iv_coeffs_sv,
    iv_expansion_sv,
    model_constants,
    pure_jump_coeffs,
    sv_coeffs,
)
from .levy import (
    CGMYParams,
    TemperedStableModel,
    cgmy_d2_pure,
    cgmy_eta,
    cgmy_gamma_tilde,
    drift_from_martingale,
    exponential_tempering,
    gamma_tilde_general,
    identity_tempering,
    min_cond_diagnostic,
    vartheta_general,
)
from .montecarlo import HestonParams, MCConfig, MCEstimate, price_bm, price_pure_jump, price_sv
from .numerics import QuadratureResult, gamma_fn, integrate, normal_cdf
from .stable import StableLaw, StableSampleParams, expected_positive_part, prob_nonnegative, sample

__version__ = "0.1.0"
