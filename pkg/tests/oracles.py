"""Independent pricers used only as test oracles.

* ``fourier_call``: Lewis-type Fourier integral for a two-sided exponential
  tempered stable model (optionally plus a Brownian part), via scipy.
* ``direct_call``: plain simulation under the pricing measure with
  compound-Poisson large jumps and a Gaussian stand-in for jumps below a
  cutoff.
"""

import math

import numpy as np
from scipy import integrate as sci


def char_exponent(u, c_plus, c_minus, G, M, Y, sigma=0.0):
    """Log characteristic function per unit time of the martingale model."""
    g = math.gamma(-Y)

    def jumps(z):
        return g * (c_plus * ((M - 1j * z) ** Y - M ** Y) + c_minus * ((G + 1j * z) ** Y - G ** Y))

    omega = -jumps(-1j).real
    return jumps(u) + 1j * u * omega - 0.5 * sigma ** 2 * (u * u + 1j * u)


def fourier_call(t, k=0.0, c_plus=0.5, c_minus=0.5, G=2.0, M=3.6, Y=1.5, sigma=0.0):
    """``E(e^{X_t} - e^k)^+`` with unit spot."""

    def f(u):
        z = np.exp(-1j * u * k + t * char_exponent(u - 0.5j, c_plus, c_minus, G, M, Y, sigma))
        return z.real / (u * u + 0.25)

    v, _ = sci.quad(f, 0.0, np.inf, limit=5000, epsabs=1e-15, epsrel=1e-12)
    return 1.0 - math.exp(k / 2) / math.pi * v


def _tail_mass(c, rate, Y, eps):
    return c * sci.quad(lambda x: x ** (-Y - 1) * math.exp(-rate * x), eps, np.inf)[0]


def _sample_tail(rng, n, rate, Y, eps):
    """Jump sizes with density proportional to ``x^{-Y-1} e^{-rate x}`` on
    ``[eps, inf)`` (Pareto proposal, exponential acceptance)."""
    out = np.empty(0)
    while out.size < n:
        m = 2 * (n - out.size) + 16
        x = eps * rng.random(m) ** (-1.0 / Y)
        keep = rng.random(m) < np.exp(-rate * (x - eps))
        out = np.concatenate([out, x[keep]])
    return out[:n]


def direct_call(t, k, C, G, M, Y, n_paths, seed, eps=0.01):
    """Mean and standard error of ``(e^{X_t} - e^k)^+`` for CGMY by
    direct simulation; returns ``(mean, stderr)``."""
    rng = np.random.default_rng(seed)
    lam_p, lam_m = _tail_mass(C, M, Y, eps), _tail_mass(C, G, Y, eps)
    small_var = C * sci.quad(lambda x: x ** (1 - Y) * (math.exp(-M * x) + math.exp(-G * x)), 0, eps)[0]
    big_mgf = (C * sci.quad(lambda x: x ** (-Y - 1) * (math.exp((1 - M) * x) - math.exp(-M * x)), eps, np.inf)[0]
               + C * sci.quad(lambda x: x ** (-Y - 1) * math.expm1(-x) * math.exp(-G * x), eps, np.inf)[0])
    # drift so that E e^{X_t} = 1 for the simulated law
    drift = -(big_mgf + 0.5 * small_var)
    n_p = rng.poisson(lam_p * t, n_paths)
    n_m = rng.poisson(lam_m * t, n_paths)
    jp = _sample_tail(rng, int(n_p.sum()), M, Y, eps)
    jm = _sample_tail(rng, int(n_m.sum()), G, Y, eps)
    idx_p = np.repeat(np.arange(n_paths), n_p)
    idx_m = np.repeat(np.arange(n_paths), n_m)
    x = drift * t + math.sqrt(small_var * t) * rng.standard_normal(n_paths)
    x += np.bincount(idx_p, weights=jp, minlength=n_paths)
    x -= np.bincount(idx_m, weights=jm, minlength=n_paths)
    pay = np.maximum(np.exp(x) - math.exp(k), 0.0)
    return float(pay.mean()), float(pay.std(ddof=1) / math.sqrt(n_paths))
