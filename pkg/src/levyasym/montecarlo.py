"""Measure-changed Monte Carlo pricer for CGMY with an optional
continuous component.

Under the tilted measure the CGMY jump part is exactly stable:
``X_t = Ubar+ - Ubar- + gamma_tilde t`` with ``Ubar+``, ``Ubar-``
independent one-sided ``Y``-stable variables, and the density back to the
pricing measure is ``exp(-U_t)`` with
``U_t = (M - 1) Ubar+ + (G + 1) Ubar- + eta t``. For a continuous log-price
part ``V`` independent of ``X`` (with ``E e^{V_t} = 1``),

    E (e^{X_t + V_t} - e^kappa)^+ = E~[ e^{-U_t} (e^{V_t} - e^{kappa - X_t})^+ ].

Paths are generated in fixed-size chunks. Chunk ``i`` draws every variable
from its own substream keyed by ``(seed, i, variable)``, and chunk
statistics are merged in chunk order, so the estimate is the same for any
number of worker threads.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import MCInstabilityError, ModelValidationError
from .levy import CGMYParams, cgmy_eta, cgmy_gamma_tilde
from .rng import substream
from .stable import sample, z1_params_from_model

__all__ = [
    "MCConfig",
    "HestonParams",
    "FellerWarning",
    "MCEstimate",
    "CIRPath",
    "default_steps",
    "simulate_cir_path",
    "draw_representation",
    "price_pure_jump",
    "price_bm",
    "price_sv",
]

LOG_WEIGHT_CAP = 700.0
MAX_REJECT_FRACTION = 1e-6


@dataclass(frozen=True)
class MCConfig:
    n_paths: int = 100_000
    seed: int = 0
    n_steps: int | None = None
    chunk_size: int = 50_000
    workers: int = 1
    antithetic: bool = False

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if self.n_steps is not None and self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.antithetic and self.chunk_size % 2:
            raise ValueError("antithetic sampling needs an even chunk_size")


class FellerWarning(UserWarning):
    """The CIR variance parameters violate ``2 kappa theta > eps**2``."""


@dataclass(frozen=True)
class HestonParams:
    """CIR variance ``dY = kappa (theta - Y) dt + eps sqrt(Y) dW1`` with
    ``sigma(y) = sqrt(y)`` and ``corr(W1, W2) = rho``."""

    y0: float
    kappa: float
    theta: float
    eps: float
    rho: float = 0.0

    def __post_init__(self):
        if not (self.y0 > 0 and self.kappa > 0 and self.theta > 0):
            raise ModelValidationError(
                f"need y0, kappa, theta > 0, got {self.y0}, {self.kappa}, {self.theta}", "heston")
        if not self.eps >= 0:
            raise ModelValidationError(f"vol-of-vol must be >= 0, got {self.eps}", "heston")
        if not -1.0 <= self.rho <= 1.0:
            raise ModelValidationError(f"rho must lie in [-1, 1], got {self.rho}", "heston")

    @property
    def feller_margin(self) -> float:
        return 2.0 * self.kappa * self.theta - self.eps ** 2

    @property
    def feller(self) -> bool:
        return self.feller_margin > 0

    @property
    def spot_vol(self) -> float:
        return math.sqrt(self.y0)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n_effective: int
    n_rejected: int
    seed: int
    n_paths: int
    n_steps: int | None
    chunk_size: int


@dataclass(frozen=True)
class CIRPath:
    path: np.ndarray | None
    integrated: np.ndarray | float
    stochastic_integral: np.ndarray | float
    terminal: np.ndarray | float


def default_steps(t: float) -> int:
    return max(100, math.ceil(1000.0 * t))


def _cir(h: HestonParams, t, n_steps, normals, keep_path):
    dt = t / n_steps
    sdt = math.sqrt(dt)
    y = np.full(normals.shape[1:], h.y0, dtype=float)
    integrated = np.zeros_like(y)
    stoch = np.zeros_like(y)
    path = [y.copy()] if keep_path else None
    for k in range(n_steps):
        yp = np.maximum(y, 0.0)
        root = np.sqrt(yp)
        dw = sdt * normals[k]
        y_next = y + h.kappa * (h.theta - yp) * dt + h.eps * root * dw
        integrated += 0.5 * (yp + np.maximum(y_next, 0.0)) * dt
        stoch += root * dw
        y = y_next
        if keep_path:
            path.append(y.copy())
    return CIRPath(np.stack(path) if keep_path else None, integrated, stoch, y)


def simulate_cir_path(h: HestonParams, t: float, n_steps: int, rng: np.random.Generator,
                      n_paths: int | None = None) -> CIRPath:
    """Full-truncation Euler path of the variance.

    Returns the path (shape ``(n_steps + 1,)`` or ``(n_steps + 1, n_paths)``),
    the trapezoid integrated variance and the left-point sum for
    ``int sqrt(Y) dW1``.
    """
    if not t > 0:
        raise ValueError(f"horizon must be positive, got {t}")
    shape = (n_steps,) if n_paths is None else (n_steps, n_paths)
    res = _cir(h, t, n_steps, rng.standard_normal(shape), keep_path=True)
    if n_paths is None:
        return CIRPath(res.path, float(res.integrated), float(res.stochastic_integral),
                       float(res.terminal))
    return res


def _normals(rng, shape, antithetic):
    z = rng.standard_normal(shape)
    return np.stack([z, -z], axis=-2) if antithetic else z


def _continuous_part(vol, t, n_steps, seed, chunk, n, antithetic):
    """``V_t`` for ``n`` paths (``(2, n)`` when antithetic), or 0."""
    if vol is None:
        return 0.0
    g = substream(seed, chunk, "brownian")
    if isinstance(vol, HestonParams):
        normals = _normals(substream(seed, chunk, "variance"), (n_steps, n), antithetic)
        cir = _cir(vol, t, n_steps, normals, keep_path=False)
        z = _normals(g, (n,), antithetic)
        iv = cir.integrated
        return (-0.5 * iv + vol.rho * cir.stochastic_integral
                + math.sqrt(1.0 - vol.rho ** 2) * np.sqrt(iv) * z)
    sigma = float(vol)
    z = _normals(g, (n,), antithetic)
    return -0.5 * sigma * sigma * t + sigma * math.sqrt(t) * z


def draw_representation(p: CGMYParams, t: float, seed: int, chunk: int, n: int,
                        vol=None, n_steps: int | None = None, antithetic: bool = False):
    """Draw ``(U_t, X_t, V_t)`` for one chunk of ``n`` paths.

    ``vol`` is ``None`` (pure jump), a constant volatility, or
    :class:`HestonParams`. With ``antithetic`` the arrays have shape
    ``(2, n)``, the second row built from complemented uniforms and
    sign-flipped normals.
    """
    up = sample(z1_params_from_model(p, t, side=1), substream(seed, chunk, "jumps_plus"),
                size=n, antithetic=antithetic)
    um = sample(z1_params_from_model(p, t, side=-1), substream(seed, chunk, "jumps_minus"),
                size=n, antithetic=antithetic)
    U = (p.M - 1.0) * up + (p.G + 1.0) * um + cgmy_eta(p) * t
    X = up - um + cgmy_gamma_tilde(p) * t
    V = _continuous_part(vol, t, n_steps or default_steps(t), seed, chunk, n, antithetic)
    return U, X, np.broadcast_to(V, np.shape(X))


def _payoff(U, X, V, kappa):
    """Per-path ``e^{-U} (e^V - e^{kappa - X})^+`` in log space, plus the
    mask of paths whose weight exceeds the cap."""
    log_w = V - U
    itm = X + V > kappa
    bad = itm & ~(log_w <= LOG_WEIGHT_CAP)
    live = itm & ~bad
    out = np.zeros(np.shape(X))
    out[live] = np.exp(log_w[live]) * -np.expm1(kappa - X[live] - V[live])
    return out, bad


def _chunk_stats(p, t, kappa, cfg, vol, n_steps, chunk, n):
    if cfg.antithetic:
        n = n // 2
    U, X, V = draw_representation(p, t, cfg.seed, chunk, n, vol, n_steps, cfg.antithetic)
    vals, bad = _payoff(U, X, V, kappa)
    if cfg.antithetic:
        vals = 0.5 * (vals[0] + vals[1])
        bad = bad[0] | bad[1]
    rejected = int(bad.sum())
    vals = vals[~bad]
    if vals.size == 0:
        return 0, 0.0, 0.0, rejected
    mean = float(np.mean(vals))
    m2 = float(np.sum((vals - mean) ** 2))
    return vals.size, mean, m2, rejected


def _merge(stats):
    """Combine ``(n, mean, M2)`` triples in order (Chan et al.)."""
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b, _ in stats:
        if nb == 0:
            continue
        tot = n + nb
        delta = mb - mean
        mean += delta * nb / tot
        m2 += m2b + delta * delta * n * nb / tot
        n = tot
    return n, mean, m2


def _run(p: CGMYParams, t: float, kappa: float, cfg: MCConfig, vol) -> MCEstimate:
    if not isinstance(p, CGMYParams):
        raise TypeError("the measure-changed pricer needs CGMYParams")
    if not t > 0:
        raise ValueError(f"maturity must be positive, got {t}")
    n_steps = None
    if isinstance(vol, HestonParams):
        n_steps = cfg.n_steps or default_steps(t)
    sizes = [cfg.chunk_size] * (cfg.n_paths // cfg.chunk_size)
    if cfg.n_paths % cfg.chunk_size:
        sizes.append(cfg.n_paths % cfg.chunk_size)
    if cfg.antithetic and any(s % 2 for s in sizes):
        raise ValueError("antithetic sampling needs an even n_paths")

    def job(i):
        return _chunk_stats(p, t, kappa, cfg, vol, n_steps, i, sizes[i])

    if cfg.workers == 1:
        stats = [job(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(cfg.workers) as pool:
            stats = list(pool.map(job, range(len(sizes))))
    rejected = sum(s[3] for s in stats)
    n_samples = cfg.n_paths // 2 if cfg.antithetic else cfg.n_paths
    if rejected > MAX_REJECT_FRACTION * n_samples:
        raise MCInstabilityError(
            f"{rejected} of {n_samples} samples exceeded the weight cap e^{LOG_WEIGHT_CAP:g}",
            rejected, n_samples)
    n, mean, m2 = _merge(stats)
    stderr = math.sqrt(m2 / (n - 1) / n) if n > 1 else math.inf
    return MCEstimate(mean, stderr, n, rejected, cfg.seed, cfg.n_paths, n_steps, cfg.chunk_size)


def price_pure_jump(p: CGMYParams, t: float, kappa: float = 0.0,
                    cfg: MCConfig = MCConfig()) -> MCEstimate:
    """``E(e^{X_t} - e^kappa)^+`` for the pure-jump CGMY model."""
    return _run(p, t, kappa, cfg, None)


def price_bm(p: CGMYParams, sigma: float, t: float, kappa: float = 0.0,
             cfg: MCConfig = MCConfig()) -> MCEstimate:
    """CGMY plus an independent Brownian component of volatility ``sigma``."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return _run(p, t, kappa, cfg, float(sigma))


def price_sv(p: CGMYParams, h: HestonParams, t: float, kappa: float = 0.0,
             cfg: MCConfig = MCConfig()) -> MCEstimate:
    """CGMY plus an independent Heston component.

    A violated Feller condition only triggers :class:`FellerWarning`: the
    full-truncation scheme stays well defined.
    """
    if not h.feller:
        warnings.warn(f"Feller condition fails: 2*kappa*theta - eps^2 = {h.feller_margin:.6g}",
                      FellerWarning, stacklevel=2)
    return _run(p, t, kappa, cfg, h)
