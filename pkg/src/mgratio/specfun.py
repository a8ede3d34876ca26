"""Special functions used by the distribution and contour-integration code.

Everything here is a pure function of its arguments. Array-valued helpers
(``log_bessel_i``) accept numpy arrays in ``x`` for the vectorised density
evaluations elsewhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConvergenceError, DomainError, PoleError

_POLE_TOL = 1e-14
_LOG_2PI = math.log(2.0 * math.pi)


def _is_pole(z: complex) -> bool:
    return (abs(z.imag) <= _POLE_TOL and z.real <= _POLE_TOL
            and abs(z.real - round(z.real)) <= _POLE_TOL)


def log_gamma(z: complex) -> complex:
    """Principal branch of ln Gamma(z).

    Raises
    ------
    PoleError
        If ``z`` is (within 1e-14) a non-positive integer.
    """
    z = complex(z)
    if _is_pole(z):
        raise PoleError(f"log_gamma: pole at z = {z}")
    return complex(kernels.loggamma(np.array([z]))[0])


def regularized_lower_gamma(a: float, x: float) -> float:
    """P(a, x) = gamma(a, x) / Gamma(a).

    Power series below ``x = a + 1``, Lentz continued fraction for the
    complement above it.
    """
    if not a > 0:
        raise DomainError(f"regularized_lower_gamma: need a > 0, got {a}")
    if not x >= 0:
        raise DomainError(f"regularized_lower_gamma: need x >= 0, got {x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    log_pref = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1.0:
        term = 1.0 / a
        total = term
        ap = a
        for _ in range(10000):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * 1e-17:
                return min(1.0, total * math.exp(log_pref))
        raise ConvergenceError(f"regularized_lower_gamma series failed at a={a}, x={x}")
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return max(0.0, 1.0 - math.exp(log_pref) * h)
    raise ConvergenceError(f"regularized_lower_gamma continued fraction failed at a={a}, x={x}")


def _log_bessel_i_series(nu: float, x: np.ndarray) -> np.ndarray:
    # ascending series, all terms positive for nu > -1
    half = x / 2.0
    log_half = np.log(half)
    log_term = nu * log_half - math.lgamma(nu + 1.0)
    total = np.ones_like(x)
    ratio_log = 2.0 * log_half
    term_rel = np.zeros_like(x)  # log of term_k / term_0
    k = 0
    while True:
        k += 1
        term_rel = term_rel + ratio_log - math.log(k) - math.log(k + nu)
        contrib = np.exp(term_rel)
        total += contrib
        if k > 5 and np.all(contrib <= 1e-17 * total):
            break
        if k > 2000:
            raise ConvergenceError("bessel_i series did not converge")
    return log_term + np.log(total)


def _log_bessel_i_asymptotic(nu: float, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    total = np.ones_like(x)
    term = np.ones_like(x)
    for k in range(1, 40):
        term = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return x - 0.5 * np.log(2.0 * math.pi * x) + np.log(total)


def log_bessel_i(nu: float, x):
    """Natural log of I_nu(x) for nu >= -0.5 and x >= 0 (array-aware)."""
    if nu < -0.5:
        raise DomainError(f"bessel_i: order {nu} < -0.5 not supported")
    xa = np.asarray(x, dtype=np.float64)
    if np.any(xa < 0):
        raise DomainError("bessel_i: x must be non-negative")
    out = np.empty_like(xa)
    flat = xa.ravel()
    res = out.ravel()
    zero = flat == 0
    if np.any(zero):
        res[zero] = 0.0 if nu == 0 else (-np.inf if nu > 0 else np.inf)
    small = (~zero) & (flat <= 50.0)
    if np.any(small):
        res[small] = _log_bessel_i_series(nu, flat[small])
    large = flat > 50.0
    if np.any(large):
        res[large] = _log_bessel_i_asymptotic(nu, flat[large])
    out = res.reshape(xa.shape)
    return float(out) if np.ndim(x) == 0 else out


def bessel_i(nu: float, x: float) -> float:
    """Modified Bessel function of the first kind I_nu(x).

    Raises ``OverflowError`` when the result is not representable.
    """
    lv = log_bessel_i(nu, x)
    if lv > 709.78:
        raise OverflowError(f"bessel_i({nu}, {x}) overflows")
    return math.exp(lv)


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function of the second kind K_nu(x), x > 0.

    Trapezoidal rule on K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt; the
    integrand is entire and decays doubly exponentially, so a fixed step of
    1/16 already gives errors far below double precision.
    """
    if not x > 0:
        raise DomainError(f"bessel_k: need x > 0, got {x}")
    nu = abs(nu)
    h = 1.0 / 16.0
    # log integrand = -x cosh t + log cosh(nu t); stop when it is 40 below its start
    t_peak = 0.0
    if nu > x:
        t_peak = math.asinh(nu / x)
    t_max = t_peak + 1.0
    ref = -x * math.cosh(t_peak) + nu * t_peak
    while -x * math.cosh(t_max) + nu * t_max > ref - 40.0:
        t_max += 1.0
    t = np.arange(0.0, t_max + h, h)
    log_f = -x * np.cosh(t) + np.logaddexp(nu * t, -nu * t) - math.log(2.0) - ref
    f = np.exp(log_f)
    total = h * (0.5 * f[0] + f[1:].sum())
    return total * math.exp(ref)


def gaussian_q(x: float) -> float:
    """Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt 2)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Laguerre rule for int_0^inf e^{-z} g(z) dz ~ sum w_l g(z_l)."""

    nodes: tuple[float, ...]
    weights: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.nodes)

    def apply(self, g) -> float:
        z = np.asarray(self.nodes)
        return float(np.dot(self.weights, g(z)))


def gauss_laguerre(order: int) -> QuadratureRule:
    """Nodes and weights of the ``order``-point Gauss-Laguerre rule.

    Newton iteration on the three-term recurrence, started from the usual
    Stroud-Secrest style guesses.
    """
    if order < 1 or int(order) != order:
        raise DomainError(f"gauss_laguerre: order must be a positive integer, got {order}")
    n = int(order)
    nodes = np.zeros(n)
    weights = np.zeros(n)
    z = 0.0
    for i in range(n):
        if i == 0:
            z = 3.0 / (1.0 + 2.4 * n + 1.8 * n * n)
        elif i == 1:
            z += 15.0 / (1.0 + 2.5 * n)
        else:
            ai = i - 1
            z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
        for _ in range(100):
            p1, p2 = 1.0, 0.0
            for j in range(1, n + 1):
                p3 = p2
                p2 = p1
                p1 = ((2 * j - 1 - z) * p2 - (j - 1) * p3) / j
            pp = n * (p1 - p2) / z
            z1 = z
            z = z1 - p1 / pp
            if abs(z - z1) <= 4e-15 * max(1.0, abs(z)):
                break
        else:
            raise ConvergenceError(f"gauss_laguerre: Newton failed for root index {i} of order {n}")
        nodes[i] = z
        weights[i] = -1.0 / (pp * n * p2)
    return QuadratureRule(tuple(float(v) for v in nodes), tuple(float(v) for v in weights))
