"""Exact densities and MG fits for the Beaulieu-Xie and alpha-lambda-eta-mu shadowed channels.

Beaulieu-Xie: expanding I_{m-1} in its ascending series shows that the SNR is
exactly a Poisson(lambda^2/2) mixture of Gamma(m + k, rate m/gbar) variates, so
the MG fit is the truncated Poisson mixture.

alpha-lambda-eta-mu shadowed: the composite density is a one-dimensional
integral over the Nakagami-m shadowing variable. Substituting
z = rho (g / r)^(alpha/2) turns it into int_0^inf e^-z h(z) dz with

    h(z) = z^(-1 - 2(m - phi)/alpha) exp(-m rho^(2/alpha) g z^(-2/alpha)) I_{mu-1/2}(vartheta z / rho),

and an L-point Gauss-Laguerre rule on h gives L Gamma(m, m rho^(2/alpha) z_l^(-2/alpha)) terms.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from . import specfun
from .errors import ConvergenceError, DomainError, TargetUnreachableError
from .mixture import MixtureGamma, default_grid, mse_between, normalize_log

MAX_TERMS = 64


@dataclass(frozen=True)
class BeaulieuXieChannel:
    m: float
    lam: float
    gbar: float = 1.0

    def __post_init__(self):
        if not self.m >= 0.5:
            raise DomainError(f"Beaulieu-Xie m must be >= 0.5, got {self.m}")
        if not self.lam >= 0:
            raise DomainError(f"Beaulieu-Xie lambda must be >= 0, got {self.lam}")
        if not self.gbar > 0:
            raise DomainError(f"gbar must be positive, got {self.gbar}")

    @property
    def mean(self) -> float:
        """E[gamma] = gbar (1 + lambda^2 / (2m)); gbar is a scale, not the mean, for lambda > 0."""
        return self.gbar * (1.0 + self.lam ** 2 / (2.0 * self.m))


@dataclass(frozen=True)
class AlemsChannel:
    alpha: float
    lam: float
    eta: float
    mu: float
    m: float
    gbar: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.eta > 0 and self.mu > 0 and self.m > 0 and self.gbar > 0):
            raise DomainError("alpha, eta, mu, m and gbar must all be positive")
        if not abs(self.lam) < 1:
            raise DomainError(f"|lambda| must be < 1, got {self.lam}")
        if not self.a > 0:
            raise DomainError("eta = 1 with lambda = 0 makes the constant a vanish; not supported")

    @property
    def a(self) -> float:
        return math.sqrt((self.eta - 1.0) ** 2 + 4.0 * self.eta * self.lam ** 2) / (1.0 - self.lam ** 2)

    @property
    def phi(self) -> float:
        return 0.5 * self.alpha * (self.mu + 0.5)

    @property
    def rho(self) -> float:
        return (self.mu * (1.0 + self.eta) ** 2
                / (2.0 * self.eta * (1.0 - self.lam ** 2) * self.gbar ** (self.alpha / 2.0)))

    @property
    def vartheta(self) -> float:
        return self.a * self.mu * (1.0 + self.eta) / (2.0 * self.eta * self.gbar ** (self.alpha / 2.0))

    @property
    def log_psi(self) -> float:
        """Log of the unshadowed density constant, normalized so the density integrates to one.

        The commonly printed constant is twice this value.
        """
        al, mu, eta, lam = self.alpha, self.mu, self.eta, self.lam
        return (0.5 * math.log(math.pi) + math.log(al)
                + (mu + 0.5) * math.log(mu * (1.0 + 1.0 / eta))
                - math.lgamma(mu) - (mu - 0.5) * math.log(self.a)
                - 0.5 * al * (mu + 0.5) * math.log(self.gbar)
                + mu * math.log(eta / (1.0 - lam ** 2)) - math.log(2.0))

    @property
    def psi(self) -> float:
        return math.exp(self.log_psi)


# Beaulieu-Xie --------------------------------------------------------------

def bx_exact_pdf(ch: BeaulieuXieChannel, g):
    """Closed-form Beaulieu-Xie SNR density (Bessel-I kernel), array-aware, g > 0."""
    ga = np.asarray(g, dtype=np.float64)
    if np.any(ga <= 0):
        raise DomainError("bx_exact_pdf: g must be positive")
    m, lam, gbar = ch.m, ch.lam, ch.gbar
    if lam == 0:
        out = np.exp(m * math.log(m / gbar) - math.lgamma(m) + (m - 1.0) * np.log(ga) - m * ga / gbar)
    else:
        x = lam * np.sqrt(2.0 * m * ga / gbar)
        log_c = (0.5 * (m - 1.0) * math.log(2.0) + 0.5 * (m + 1.0) * math.log(m) - 0.5 * lam ** 2
                 - (m - 1.0) * math.log(lam) - 0.5 * (m + 1.0) * math.log(gbar))
        out = np.exp(log_c + 0.5 * (m - 1.0) * np.log(ga) - m * ga / gbar
                     + specfun.log_bessel_i(m - 1.0, x))
    return float(out) if np.ndim(g) == 0 else out


def bx_poisson_masses(ch: BeaulieuXieChannel, L: int) -> np.ndarray:
    """Poisson(lambda^2/2) probabilities of the first L mixture components."""
    k = np.arange(L, dtype=np.float64)
    mu = 0.5 * ch.lam ** 2
    if mu == 0:
        return (k == 0).astype(np.float64)
    return np.exp(-mu + k * math.log(mu) - special.gammaln(k + 1.0))


def bx_to_mg(ch: BeaulieuXieChannel, L: int, label: str = "bx") -> MixtureGamma:
    """L-term MG: Poisson-weighted Gamma(m + k, m/gbar), k = 0..L-1, renormalized."""
    if L < 1 or int(L) != L:
        raise DomainError(f"L must be a positive integer, got {L}")
    L = int(L)
    k = np.arange(L, dtype=np.float64)
    beta = ch.m + k
    rate = ch.m / ch.gbar
    zeta = np.full(L, rate)
    with np.errstate(divide="ignore"):
        log_w = np.log(bx_poisson_masses(ch, L))
    # theta_k = w_k * rate^beta / Gamma(beta) makes each term a Gamma density times w_k
    log_theta = log_w + beta * math.log(rate) - special.gammaln(beta)
    return normalize_log(log_theta, beta, zeta, label)


# alpha-lambda-eta-mu shadowed ---------------------------------------------

def _alems_log_integrand(ch: AlemsChannel, ga: np.ndarray, v: np.ndarray) -> np.ndarray:
    # integrand of the shadowing integral after r = e^v (dr = r dv), shape (len(v), len(g))
    r = np.exp(v)[:, None]
    y = ga[None, :] ** (ch.alpha / 2.0) * r ** (-ch.alpha / 2.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = ((ch.m - ch.phi) * np.log(r) - ch.rho * y - ch.m * r
               + specfun.log_bessel_i(ch.mu - 0.5, ch.vartheta * y))
    return out


def alems_exact_pdf(ch: AlemsChannel, g, epsrel: float = 1e-11):
    """Composite density by adaptive quadrature over the shadowing variable (array-aware)."""
    ga = np.atleast_1d(np.asarray(g, dtype=np.float64))
    if np.any(ga <= 0):
        raise DomainError("alems_exact_pdf: g must be positive")
    log_pref = ch.log_psi + ch.m * math.log(ch.m) - math.lgamma(ch.m) + (ch.phi - 1.0) * np.log(ga)
    # integration window in v = log r: the shadowing term kills r >> 1/m; the
    # exp(-(rho - vartheta) y) factor kills r << g
    # Gamma(m, m) shadowing concentrates at r = 1 with width 1/sqrt(m) for large m
    gap = ch.rho - ch.vartheta
    spread = 12.0 / math.sqrt(ch.m)
    v_hi = math.log(max(800.0 / ch.m, 1.0 + spread))
    v_lo = math.log(float(ga.min())) + (2.0 / ch.alpha) * math.log(gap / 800.0)
    if spread < 1.0:
        v_lo = max(v_lo, math.log(1.0 - spread))
    v_lo = min(v_lo, v_hi - 1e-3)
    # scale each abscissa by its own peak so quad_vec sees O(1) components
    v_probe = np.linspace(v_lo, v_hi, 801)
    probe = _alems_log_integrand(ch, ga, v_probe)
    peak = np.max(np.where(np.isfinite(probe), probe, -np.inf), axis=0)

    def f(v):
        return np.exp(_alems_log_integrand(ch, ga, np.array([v]))[0] - peak)

    val, err = integrate.quad_vec(f, v_lo, v_hi, epsabs=0.0, epsrel=epsrel, norm="max",
                                  points=tuple(v_probe[::100][1:-1]), limit=2000)
    if not np.all(np.isfinite(val)):
        raise ConvergenceError("alems_exact_pdf: quadrature produced non-finite values")
    out = np.exp(log_pref + peak) * val
    return float(out[0]) if np.ndim(g) == 0 else out


def alems_exact_pdf_zsub(ch: AlemsChannel, g: float) -> float:
    """Same density via the z-substitution form, by scalar adaptive quadrature (oracle path)."""
    if not g > 0:
        raise DomainError("alems_exact_pdf_zsub: g must be positive")
    al, m, phi, rho = ch.alpha, ch.m, ch.phi, ch.rho
    kappa = ch.vartheta / rho
    expo = -1.0 - 2.0 * (m - phi) / al
    c = m * rho ** (2.0 / al) * g
    log_pref = (ch.log_psi + math.log(2.0 / al) + m * math.log(m) - math.lgamma(m)
                + (2.0 * (m - phi) / al) * math.log(rho) + (m - 1.0) * math.log(g))

    def h(z):
        if z <= 0:
            return 0.0
        lv = -z + expo * math.log(z) - c * z ** (-2.0 / al) + specfun.log_bessel_i(ch.mu - 0.5, kappa * z)
        return math.exp(lv)

    val, _ = integrate.quad(h, 0.0, np.inf, epsabs=0.0, epsrel=1e-11, limit=500)
    return math.exp(log_pref) * val


@functools.lru_cache(maxsize=None)
def _laguerre(L: int):
    rule = specfun.gauss_laguerre(L)
    return np.array(rule.nodes), np.array(rule.weights)


def alems_to_mg(ch: AlemsChannel, L: int, label: str = "alems") -> MixtureGamma:
    """L-term MG from the L-point Gauss-Laguerre rule applied to the z-substituted integral."""
    if L < 1 or int(L) != L:
        raise DomainError(f"L must be a positive integer, got {L}")
    z, w = _laguerre(int(L))
    al, m, phi = ch.alpha, ch.m, ch.phi
    kappa = ch.vartheta / ch.rho
    log_theta = (np.log(w) + (-1.0 - 2.0 * (m - phi) / al) * np.log(z)
                 + specfun.log_bessel_i(ch.mu - 0.5, kappa * z))
    zeta = m * ch.rho ** (2.0 / al) * z ** (-2.0 / al)
    beta = np.full(len(z), float(m))
    return normalize_log(log_theta, beta, zeta, label)


# term selection ------------------------------------------------------------

def select_terms(exact_pdf: Callable, fitter: Callable[[int], MixtureGamma], mse_target: float,
                 grid=None, max_terms: int = MAX_TERMS) -> tuple[int, MixtureGamma, float]:
    """Smallest L whose fit meets ``mse_target`` on ``grid`` (default: 2000 points on (0, 5]).

    Returns ``(L, mg, mse)``; raises :class:`TargetUnreachableError` past ``max_terms``.
    """
    if not mse_target > 0:
        raise DomainError(f"mse_target must be positive, got {mse_target}")
    grid = default_grid(1.0) if grid is None else np.asarray(grid, dtype=np.float64)
    exact = np.asarray(exact_pdf(grid), dtype=np.float64)
    best = math.inf
    for L in range(1, max_terms + 1):
        mg = fitter(L)
        mse = mse_between(lambda _: exact, mg.pdf, grid)
        best = min(best, mse)
        if mse <= mse_target:
            return L, mg, mse
    raise TargetUnreachableError(f"no fit with L <= {max_terms} reaches MSE {mse_target:g} "
                                 f"(best {best:.3g})")
