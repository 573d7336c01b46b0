"""Strictly stable laws with index in (1, 2).

Parameterization follows the standard (Samorodnitsky-Taqqu) convention:
``log E exp(iuZ) = -scale**a |u|**a (1 - i skew sign(u) tan(pi a / 2))``
with zero location, so the law is centred. A Lévy measure
``C(sign x) |x|**(-Y-1) dx`` gives ``scale**Y = A Gamma(-Y) |cos(pi Y/2)|``
and ``skew = B / A`` with ``A = C(1) + C(-1)``, ``B = C(1) - C(-1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import gamma_fn

__all__ = [
    "StableLaw",
    "StableSampleParams",
    "stable_law_of",
    "expected_positive_part",
    "prob_nonnegative",
    "cms_transform",
    "sample",
    "uniforms_to_cms_inputs",
    "z1_params_from_model",
]

_U_MIN = 2.0 ** -54


@dataclass(frozen=True)
class StableLaw:
    A: float
    B: float
    Y: float

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError(f"total spectral mass A must be positive, got {self.A}")
        if abs(self.B) > self.A:
            raise ValueError(f"need |B| <= A, got A={self.A}, B={self.B}")
        if not 1.0 < self.Y < 2.0:
            raise ValueError(f"index Y must lie in (1, 2), got {self.Y}")

    @property
    def skew(self) -> float:
        return self.B / self.A

    @property
    def scale(self) -> float:
        Y = self.Y
        return (self.A * gamma_fn(-Y) * abs(math.cos(math.pi * Y / 2))) ** (1.0 / Y)

    def sample_params(self) -> StableSampleParams:
        return StableSampleParams(self.Y, self.skew, self.scale, 0.0)


@dataclass(frozen=True)
class StableSampleParams:
    alpha: float
    skew: float
    scale: float
    location: float = 0.0

    def __post_init__(self):
        if not 1.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (1, 2), got {self.alpha}")
        if not -1.0 <= self.skew <= 1.0:
            raise ValueError(f"skew must lie in [-1, 1], got {self.skew}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")


def stable_law_of(model) -> StableLaw:
    return StableLaw(model.c_plus + model.c_minus, model.c_plus - model.c_minus, model.Y)


def expected_positive_part(law: StableLaw) -> float:
    """Closed form of ``E[Z_1^+]``."""
    Y, A = law.Y, law.A
    r = law.B / A
    tan_ = math.tan(math.pi * Y / 2)
    return (A ** (1 / Y) / math.pi
            * gamma_fn(-Y) ** (1 / Y)
            * abs(math.cos(math.pi * Y / 2)) ** (1 / Y)
            * math.cos(math.atan(r * tan_) / Y)
            * gamma_fn(1 - 1 / Y)
            * (1 + r * r * tan_ * tan_) ** (1 / (2 * Y)))


def prob_nonnegative(law: StableLaw) -> float:
    """Closed form of ``P(Z_1 >= 0)``; depends on ``B / A`` only."""
    Y = law.Y
    return 0.5 + math.atan(law.B / law.A * math.tan(math.pi * Y / 2)) / (math.pi * Y)


def uniforms_to_cms_inputs(u1, u2):
    """Map two uniforms on (0, 1) to the CMS angle and exponential."""
    u1 = np.clip(u1, _U_MIN, 1.0 - _U_MIN)
    u2 = np.clip(u2, _U_MIN, 1.0 - _U_MIN)
    return math.pi * (u1 - 0.5), -np.log(u2)


def cms_transform(alpha, skew, angle, expo):
    """Chambers-Mallows-Stuck map for ``alpha != 1``; unit scale, zero location."""
    t = skew * math.tan(math.pi * alpha / 2)
    shift = math.atan(t) / alpha
    factor = (1 + t * t) ** (1 / (2 * alpha))
    a = alpha * (angle + shift)
    return (factor * np.sin(a) / np.cos(angle) ** (1 / alpha)
            * (np.cos(angle - a) / expo) ** ((1 - alpha) / alpha))


def sample(p: StableSampleParams, rng: np.random.Generator, size=None, antithetic: bool = False):
    """Draw from the stable law ``p`` using ``rng``.

    With ``antithetic=True`` the draws for ``size`` pairs are returned as an
    array of shape ``(2,) + size``: the second row uses the complemented
    angle uniform and the same exponential, which reflects a symmetric draw.
    """
    u1 = rng.random(size)
    u2 = rng.random(size)
    if antithetic:
        u1 = np.stack([u1, 1.0 - u1])
        u2 = np.stack([u2, u2])
    angle, expo = uniforms_to_cms_inputs(u1, u2)
    z = cms_transform(p.alpha, p.skew, angle, expo)
    out = p.location + p.scale * z
    if size is None and not antithetic:
        return float(out)
    return out


def z1_params_from_model(model, t: float, side: int | None = None) -> StableSampleParams:
    """Stable parameters of the jump part over horizon ``t`` under the
    stable measure.

    ``side=+1`` / ``-1`` gives the one-sided (``skew = 1``) component built
    from the positive / reflected negative jumps alone, with
    ``scale = (t C(side) Gamma(-Y) |cos(pi Y/2)|)**(1/Y)``. ``side=None``
    gives the full centred increment.
    """
    if not t > 0:
        raise ValueError(f"horizon must be positive, got {t}")
    Y = model.Y
    if side is None:
        mass, skew = model.c_plus + model.c_minus, (model.c_plus - model.c_minus)
        skew = skew / mass
    elif side in (1, -1):
        mass = model.c_plus if side == 1 else model.c_minus
        skew = 1.0
    else:
        raise ValueError("side must be +1, -1 or None")
    scale = (t * mass * gamma_fn(-Y) * abs(math.cos(math.pi * Y / 2))) ** (1.0 / Y)
    return StableSampleParams(Y, skew, scale, 0.0)
