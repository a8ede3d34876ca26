"""Products and ratios of products of independent MG variates.

Everything here is an expectation E[h(V)] of a test function h over a product
chain Y = prod gamma_i or a ratio X = Y / Z. With M_V the Mellin transform of
V and H(u) = int_0^inf y^(u-1) h(y) dy, Parseval's formula gives

    E[h(V)] = (1 / 2 pi i) int_{c - i inf}^{c + i inf} M_V(t) H(1 - t) dt.

``M_V`` factorizes over links, and each link is a finite sum of Gamma terms,
so expanding the product yields one Meijer G-function per term combination
(``method="combos"``). Keeping the sum inside the integrand instead
(``method="mellin"``, the default) gives the same value with a single line
integral.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import kernels, meijer
from .contour import line_integral
from .errors import CombinationOverflowError, DomainError
from .meijer import MeijerGSpec
from .mixture import MixtureGamma

MAX_COMBOS = 10_000_000
DEFAULT_PRUNE = 1e-12


class CascadeChain:
    """Product of independent MG variates (the links)."""

    __slots__ = ("links",)

    def __init__(self, links: Sequence[MixtureGamma]):
        links = tuple(links)
        if not links:
            raise DomainError("a chain needs at least one link")
        if not all(isinstance(mg, MixtureGamma) for mg in links):
            raise DomainError("chain links must be MixtureGamma instances")
        object.__setattr__(self, "links", links)

    def __setattr__(self, name, value):
        raise AttributeError("CascadeChain is immutable")

    def __len__(self) -> int:
        return len(self.links)

    def __repr__(self) -> str:
        return f"CascadeChain({', '.join(mg.label for mg in self.links)})"

    @property
    def strip(self) -> tuple[float, float]:
        """Open interval of real t on which M_Y(t) = E[Y^(t-1)] is finite."""
        return max(1.0 - mg.min_beta for mg in self.links), math.inf

    def log_mellin(self, t):
        t = np.asarray(t, dtype=np.complex128)
        out = np.zeros_like(t)
        for mg in self.links:
            out = out + mg.log_mellin(t)
        return out

    def mellin(self, n: float) -> float:
        return math.prod(mg.mellin(n) for mg in self.links)

    @property
    def mean(self) -> float:
        return self.mellin(2.0)


class RatioOfChains:
    """X = Y / Z with Y, Z independent product chains."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: CascadeChain, denominator: CascadeChain):
        if not isinstance(numerator, CascadeChain) or not isinstance(denominator, CascadeChain):
            raise DomainError("ratio numerator and denominator must be CascadeChain instances")
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)

    def __setattr__(self, name, value):
        raise AttributeError("RatioOfChains is immutable")

    def __repr__(self) -> str:
        return f"RatioOfChains({self.numerator!r} / {self.denominator!r})"

    @property
    def strip(self) -> tuple[float, float]:
        lo = self.numerator.strip[0]
        hi = min(1.0 + mg.min_beta for mg in self.denominator.links)
        return lo, hi

    def log_mellin(self, t):
        """log E[X^(t-1)] = log M_Y(t) + sum log E[z_j^(1-t)]."""
        t = np.asarray(t, dtype=np.complex128)
        out = self.numerator.log_mellin(t)
        for mg in self.denominator.links:
            out = out + mg.log_mellin_reflected(t)
        return out

    def mellin(self, n: float) -> float:
        num = self.numerator.mellin(n)
        return num * math.prod(mg.mellin(2.0 - n) for mg in self.denominator.links)


Variate = CascadeChain | RatioOfChains


@dataclass(frozen=True)
class TermCombo:
    """One term of the expanded product: Phi = prod sigma/zeta^(beta-1), Xi = prod zeta."""

    phi: float
    xi: float
    betas: tuple[float, ...]
    log_phi: float = field(default=0.0, repr=False)
    log_xi: float = field(default=0.0, repr=False)
    mass: float = field(default=1.0, repr=False)


def enumerate_combos(chain: CascadeChain, prune: float = DEFAULT_PRUNE) -> list[TermCombo]:
    """All term combinations in lexicographic link-index order.

    Combinations whose probability mass (product of the selected term masses)
    is below ``prune`` are dropped.
    """
    if not 0 <= prune <= 1e-6:
        raise DomainError(f"prune must lie in [0, 1e-6], got {prune}")
    count = math.prod(len(mg) for mg in chain.links)
    if count > MAX_COMBOS:
        raise CombinationOverflowError(f"{count} term combinations exceed the limit {MAX_COMBOS}")
    out = []
    for idx in itertools.product(*(range(len(mg)) for mg in chain.links)):
        mass = 1.0
        log_phi = 0.0
        log_xi = 0.0
        betas = []
        for mg, l in zip(chain.links, idx):
            mass *= mg.masses[l]
            log_phi += mg.log_sigma[l] - (mg.beta[l] - 1.0) * mg.log_zeta[l]
            log_xi += mg.log_zeta[l]
            betas.append(float(mg.beta[l]))
        if prune > 0 and mass < prune:
            continue
        out.append(TermCombo(math.exp(log_phi), math.exp(log_xi), tuple(betas),
                             log_phi, log_xi, float(mass)))
    return out


@dataclass(frozen=True)
class _GammaTerm:
    """log_coef + Gamma(plus + t) Gamma(minus - t) z^-t, one expanded Mellin term."""

    log_coef: float
    plus: tuple[float, ...]
    minus: tuple[float, ...]
    log_z: float


def _expanded_terms(v: Variate, prune: float) -> Iterator[_GammaTerm]:
    if isinstance(v, CascadeChain):
        for c in enumerate_combos(v, prune):
            yield _GammaTerm(c.log_phi, tuple(b - 1.0 for b in c.betas), (), c.log_xi)
        return
    dens = enumerate_combos(v.denominator, prune)
    for cn in enumerate_combos(v.numerator, prune):
        for cd in dens:
            if prune > 0 and cn.mass * cd.mass < prune:
                continue
            yield _GammaTerm(cn.log_phi + cd.log_phi - 2.0 * cd.log_xi,
                             tuple(b - 1.0 for b in cn.betas),
                             tuple(b + 1.0 for b in cd.betas),
                             cn.log_xi - cd.log_xi)


@dataclass(frozen=True)
class MellinKernel:
    """Mellin transform H(1 - t) of a test function, as a Gamma-ratio in t:

        exp(log_const + kappa t) prod Gamma(o + t) [plus] prod Gamma(o - t) [minus]
                                 / prod Gamma(o + t) [den_plus] / prod Gamma(o - t) [den_minus]
    """

    log_const: float = 0.0
    kappa: float = 0.0
    plus: tuple[float, ...] = ()
    minus: tuple[float, ...] = ()
    den_plus: tuple[float, ...] = ()
    den_minus: tuple[float, ...] = ()

    @property
    def strip(self) -> tuple[float, float]:
        lo = max((-o for o in self.plus), default=-math.inf)
        hi = min(self.minus, default=math.inf)
        return lo, hi

    def log_value(self, t):
        t = np.asarray(t, dtype=np.complex128)
        out = self.log_const + self.kappa * t
        for o in self.plus:
            out = out + kernels.loggamma(o + t)
        for o in self.minus:
            out = out + kernels.loggamma(o - t)
        for o in self.den_plus:
            out = out - kernels.loggamma(o + t)
        for o in self.den_minus:
            out = out - kernels.loggamma(o - t)
        return out

    def meijer_spec(self, term: _GammaTerm) -> tuple[MeijerGSpec, float, float]:
        """(spec, z, log multiplier) such that the term's contribution is exp(mult) G(z)."""
        b = list(term.plus) + list(self.plus) + [1.0 - o for o in self.den_minus]
        a = [1.0 - o for o in term.minus + self.minus] + list(self.den_plus)
        m = len(term.plus) + len(self.plus)
        n = len(term.minus) + len(self.minus)
        spec = MeijerGSpec(m, n, len(a), len(b), tuple(a), tuple(b))
        return spec, math.exp(term.log_z - self.kappa), term.log_coef + self.log_const


def pdf_kernel(y: float) -> MellinKernel:
    return MellinKernel(kappa=-math.log(y), log_const=0.0)


def cdf_kernel(y: float) -> MellinKernel:
    # int_0^y u^-t du = y^(1-t) / (1 - t) = y^(1-t) Gamma(1-t) / Gamma(2-t)
    ly = math.log(y)
    return MellinKernel(log_const=ly, kappa=-ly, minus=(1.0,), den_minus=(2.0,))


def mgf_kernel(s: float) -> MellinKernel:
    # int y^(-t) e^(-s y) dy = Gamma(1-t) s^(t-1)
    ls = math.log(s)
    return MellinKernel(log_const=-ls, kappa=ls, minus=(1.0,))


def _combined_strip(v: Variate, k: MellinKernel) -> tuple[float, float]:
    lo_v, hi_v = v.strip
    lo_k, hi_k = k.strip
    return max(lo_v, lo_k), min(hi_v, hi_k)


def expectation(v: Variate, kernel: MellinKernel, method: str = "mellin",
                prune: float = DEFAULT_PRUNE, rtol: float = 1e-12) -> float:
    """E[h(V)] for the test function whose Mellin transform is ``kernel``."""
    if method == "mellin":
        lo, hi = _combined_strip(v, kernel)

        def logf(t):
            return v.log_mellin(t) + kernel.log_value(t)

        return line_integral(logf, lo, hi, rtol=rtol).value
    if method == "combos":
        total = 0.0
        for term in _expanded_terms(v, prune):
            spec, z, log_mult = kernel.meijer_spec(term)
            total += math.exp(log_mult) * meijer.eval(spec, z)
        return total
    raise DomainError(f"unknown evaluation method {method!r}")


def _positive(x: float, name: str):
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"{name} must be positive and finite, got {x}")


def _check_chain(chain):
    if not isinstance(chain, CascadeChain):
        raise DomainError(f"expected a CascadeChain, got {type(chain).__name__}")


def _check_ratio(r):
    if not isinstance(r, RatioOfChains):
        raise DomainError(f"expected a RatioOfChains, got {type(r).__name__}")


def product_pdf(chain: CascadeChain, y: float, method: str = "mellin", prune: float = DEFAULT_PRUNE) -> float:
    _check_chain(chain)
    _positive(y, "y")
    return max(expectation(chain, pdf_kernel(y), method, prune), 0.0)


def product_cdf(chain: CascadeChain, y: float, method: str = "mellin", prune: float = DEFAULT_PRUNE) -> float:
    _check_chain(chain)
    _positive(y, "y")
    return min(max(expectation(chain, cdf_kernel(y), method, prune), 0.0), 1.0)


def product_mgf(chain: CascadeChain, s: float, method: str = "mellin", prune: float = DEFAULT_PRUNE) -> float:
    _check_chain(chain)
    _positive(s, "s")
    return expectation(chain, mgf_kernel(s), method, prune)


def ratio_pdf(r: RatioOfChains, x: float, method: str = "mellin", prune: float = DEFAULT_PRUNE) -> float:
    _check_ratio(r)
    _positive(x, "x")
    return max(expectation(r, pdf_kernel(x), method, prune), 0.0)


def ratio_cdf(r: RatioOfChains, x: float, method: str = "mellin", prune: float = DEFAULT_PRUNE) -> float:
    _check_ratio(r)
    _positive(x, "x")
    return min(max(expectation(r, cdf_kernel(x), method, prune), 0.0), 1.0)


def ratio_mgf(r: RatioOfChains, s: float, method: str = "mellin", prune: float = DEFAULT_PRUNE) -> float:
    _check_ratio(r)
    _positive(s, "s")
    return expectation(r, mgf_kernel(s), method, prune)
