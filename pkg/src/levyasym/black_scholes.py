"""Zero-rate Black-Scholes call prices and implied volatility."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .numerics import normal_cdf, normal_pdf

__all__ = ["BSQuote", "call_price", "vega", "implied_vol"]


@dataclass(frozen=True)
class BSQuote:
    spot: float
    strike: float
    maturity: float
    vol: float

    def __post_init__(self):
        if not (self.spot > 0 and self.strike > 0 and self.maturity > 0):
            raise DomainError("spot, strike and maturity must be positive")
        if not self.vol >= 0:
            raise DomainError("vol must be non-negative")

    @property
    def price(self) -> float:
        return call_price(self.spot, self.strike, self.maturity, self.vol)


def call_price(spot: float, strike: float, maturity: float, vol: float) -> float:
    if vol == 0.0 or maturity == 0.0:
        return max(spot - strike, 0.0)
    otm = _otm_price(spot, strike, maturity, vol)
    if strike >= spot:
        return otm
    # in the money: intrinsic plus the put, by parity
    return (spot - strike) + otm


def vega(spot: float, strike: float, maturity: float, vol: float) -> float:
    sd = vol * math.sqrt(maturity)
    d_plus = (math.log(spot / strike) + 0.5 * sd * sd) / sd
    return spot * normal_pdf(d_plus) * math.sqrt(maturity)


def _otm_price(spot, strike, maturity, vol):
    """Call price for ``strike >= spot``, put price otherwise (no cancellation
    against the intrinsic value)."""
    sd = vol * math.sqrt(maturity)
    d_plus = (math.log(spot / strike) + 0.5 * sd * sd) / sd
    d_minus = d_plus - sd
    if strike >= spot:
        return spot * normal_cdf(d_plus) - strike * normal_cdf(d_minus)
    return strike * normal_cdf(-d_minus) - spot * normal_cdf(-d_plus)


def implied_vol(price: float, spot: float, strike: float, maturity: float,
                lo: float = 1e-8, hi: float = 5.0) -> float:
    """Invert :func:`call_price` in the volatility.

    Newton iteration on the log of the out-of-the-money price (the put via
    parity when ``strike < spot``), safeguarded by bisection. Raises
    :class:`DomainError` if ``price`` is outside ``(max(S - K, 0), S)``.
    """
    intrinsic = max(spot - strike, 0.0)
    if not (intrinsic < price < spot):
        raise DomainError(
            f"price {price!r} outside the no-arbitrage band ({intrinsic!r}, {spot!r})")
    target = price if strike >= spot else price - (spot - strike)
    log_target = math.log(target)

    def g(v):
        p = _otm_price(spot, strike, maturity, v)
        return (math.log(p) if p > 0.0 else -math.inf) - log_target

    while g(hi) < 0.0:
        hi *= 2.0
        if hi > 1e4:
            raise DomainError("implied volatility exceeds 1e4")
    while g(lo) > 0.0:
        lo *= 0.5
        if lo < 1e-300:
            return 0.0

    v = 0.5 * (lo + hi)
    if abs(math.log(spot / strike)) < 1e-3:
        guess = price * math.sqrt(2.0 * math.pi / maturity) / spot
        if lo < guess < hi:
            v = guess
    for _ in range(200):
        gv = g(v)
        if gv == 0.0:
            return v
        if gv > 0.0:
            hi = v
        else:
            lo = v
        p = _otm_price(spot, strike, maturity, v)
        slope = vega(spot, strike, maturity, v) / p if p > 0.0 else 0.0
        nxt = v - gv / slope if slope > 0.0 else math.nan
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if abs(nxt - v) <= 1e-15 * v or hi - lo <= 1e-15 * hi:
            return nxt
        v = nxt
    return v
