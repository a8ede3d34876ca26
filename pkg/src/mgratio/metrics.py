"""Performance metrics over cascaded and ratio-of-products MG variates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .cascade import (CascadeChain, MellinKernel, RatioOfChains, expectation, product_cdf,
                      product_mgf, product_pdf, ratio_cdf)
from .errors import CrossCheckError, DomainError

_NONCOHERENT = {"nc-bfsk": 0.5, "dbpsk": 1.0}
_COHERENT = {"coherent-bfsk": 0.5, "bpsk": 1.0, "bfsk-min-corr": 0.715}
KINDS = tuple(_NONCOHERENT) + tuple(_COHERENT) + ("mpsk", "mqam")


@dataclass(frozen=True)
class ModulationScheme:
    kind: str
    order: int | None = None

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise DomainError(f"unknown modulation {self.kind!r}; expected one of {', '.join(KINDS)}")
        if kind in ("mpsk", "mqam"):
            M = self.order
            if M is None or M < 4 or M & (M - 1):
                raise DomainError(f"{kind} needs an order M >= 4 that is a power of two, got {M}")

    @property
    def g(self) -> float:
        """The scheme's SNR scaling constant (g1, g2, g_PSK or g_QAM)."""
        if self.kind in _NONCOHERENT:
            return _NONCOHERENT[self.kind]
        if self.kind in _COHERENT:
            return _COHERENT[self.kind]
        if self.kind == "mpsk":
            return math.sin(math.pi / self.order) ** 2
        return 3.0 / (2.0 * (self.order - 1))

    @property
    def c(self) -> float:
        if self.kind != "mqam":
            raise DomainError("c is defined for MQAM only")
        return 1.0 - 1.0 / math.sqrt(self.order)


@dataclass(frozen=True)
class SecrecyScenario:
    main: CascadeChain
    wiretap: CascadeChain
    rate_threshold: float = 0.0

    def __post_init__(self):
        if not self.rate_threshold >= 0:
            raise DomainError(f"rate threshold must be >= 0, got {self.rate_threshold}")

    @property
    def epsilon(self) -> float:
        return 2.0 ** self.rate_threshold

    @property
    def ratio(self) -> RatioOfChains:
        return RatioOfChains(self.main, self.wiretap)


@dataclass(frozen=True)
class MultihopSystem:
    hops: tuple[RatioOfChains, ...]

    def __post_init__(self):
        hops = tuple(self.hops)
        if not hops:
            raise DomainError("a multihop system needs at least one hop")
        if not all(isinstance(h, RatioOfChains) for h in hops):
            raise DomainError("hops must be RatioOfChains instances")
        object.__setattr__(self, "hops", hops)

    @property
    def K(self) -> int:
        return len(self.hops)


def _scheme(scheme, allowed) -> ModulationScheme:
    if isinstance(scheme, str):
        scheme = ModulationScheme(scheme)
    if scheme.kind not in allowed:
        raise DomainError(f"scheme {scheme.kind!r} not valid here; expected one of {', '.join(allowed)}")
    return scheme


# Gauss-Legendre theta integrals of the MGF ---------------------------------

def theta_integral(chain: CascadeChain, g: float, upper: float, nodes: int = 64,
                   method: str = "mellin") -> float:
    """(1/pi) int_0^upper M_Y(g / sin^2 theta) d theta by Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * upper * (x + 1.0)
    vals = np.array([product_mgf(chain, g / math.sin(th) ** 2, method) for th in theta])
    return float(0.5 * upper * np.dot(w, vals) / math.pi)


def q_kernel(g: float) -> MellinKernel:
    """Mellin kernel of Q(sqrt(2 g y)): Gamma(1-t) Gamma(3/2-t) / (2 sqrt(pi) Gamma(2-t)) g^(t-1)."""
    lg = math.log(g)
    return MellinKernel(log_const=-math.log(2.0 * math.sqrt(math.pi)) - lg, kappa=lg,
                        minus=(1.0, 1.5), den_minus=(2.0,))


def expected_q(chain: CascadeChain, g: float, method: str = "mellin") -> float:
    """E[Q(sqrt(2 g Y))]."""
    return expectation(chain, q_kernel(g), method)


# cascaded-channel metrics --------------------------------------------------

def outage(chain: CascadeChain, gamma_th: float, method: str = "mellin") -> float:
    return product_cdf(chain, gamma_th, method)


def abep_noncoherent(chain: CascadeChain, scheme, method: str = "mellin") -> float:
    s = _scheme(scheme, _NONCOHERENT)
    return 0.5 * product_mgf(chain, s.g, method)


def abep_coherent(chain: CascadeChain, scheme, method: str = "mellin",
                  cross_check: bool = True, nodes: int = 64) -> float:
    """E[Q(sqrt(2 g2 Y))]; optionally verified against the theta-integral of the MGF."""
    s = _scheme(scheme, _COHERENT)
    value = expected_q(chain, s.g, method)
    if cross_check:
        ref = theta_integral(chain, s.g, 0.5 * math.pi, nodes)
        if abs(value - ref) > 1e-6 * abs(ref):
            raise CrossCheckError(f"coherent ABEP {value!r} vs theta integral {ref!r}")
    return value


def asep_mpsk_parts(chain: CascadeChain, M: int, nodes: int = 64, method: str = "mellin"):
    """(I1, I2) with ASEP = I1 - I2; I1 = 2 E[Q(sqrt(2 g Y))], I2 the theta integral over (0, pi/M)."""
    s = ModulationScheme("mpsk", M)
    i1 = 2.0 * expected_q(chain, s.g, method)
    i2 = theta_integral(chain, s.g, math.pi / M, nodes, method)
    return i1, i2


def asep_mpsk(chain: CascadeChain, M: int, nodes: int = 64, method: str = "mellin") -> float:
    i1, i2 = asep_mpsk_parts(chain, M, nodes, method)
    return i1 - i2


def asep_mqam_parts(chain: CascadeChain, M: int, nodes: int = 64, method: str = "mellin"):
    """(J1, J2, c) with ASEP = 4c (J1 - c J2); square-QAM formula, applied to any power-of-two M."""
    s = ModulationScheme("mqam", M)
    j1 = expected_q(chain, s.g, method)
    j2 = theta_integral(chain, s.g, 0.25 * math.pi, nodes, method)
    return j1, j2, s.c


def asep_mqam(chain: CascadeChain, M: int, nodes: int = 64, method: str = "mellin") -> float:
    j1, j2, c = asep_mqam_parts(chain, M, nodes, method)
    return 4.0 * c * (j1 - c * j2)


def er_kernel(A: float) -> MellinKernel:
    """Mellin kernel of (1 + y)^-A: Gamma(1-t) Gamma(A-1+t) / Gamma(A)."""
    return MellinKernel(log_const=-math.lgamma(A), minus=(1.0,), plus=(A - 1.0,))


def effective_rate(chain: CascadeChain, A: float, method: str = "mellin") -> float:
    """-(1/A) log2 E[(1 + Y)^-A]."""
    if not A > 0:
        raise DomainError(f"A must be positive, got {A}")
    return -math.log2(expectation(chain, er_kernel(A), method)) / A


def _log_quad(f, a_log: float = -40.0, b_log: float = 12.0) -> float:
    # int_0^inf f(y) dy with y = e^v; breakpoints keep quad honest across scales
    val, _ = integrate.quad(lambda v: f(math.exp(v)) * math.exp(v), a_log, b_log,
                            epsabs=0.0, epsrel=1e-10, limit=400,
                            points=tuple(np.arange(-10.0, 8.0, 2.0)))
    return val


def effective_rate_quadrature(chain: CascadeChain, A: float) -> float:
    """Reference value by direct quadrature of (1 + y)^-A against the product density."""
    e = _log_quad(lambda y: (1.0 + y) ** -A * product_pdf(chain, y))
    return -math.log2(e) / A


def complementary_auc_awgn(y, u: int):
    """1 - AUC of the energy detector in AWGN for SNR y and time-bandwidth product u (array-aware)."""
    if u < 1 or int(u) != u:
        raise DomainError(f"u must be a positive integer, got {u}")
    ya = np.asarray(y, dtype=np.float64)
    if np.any(ya < 0):
        raise DomainError("auc: y must be non-negative")
    total = np.zeros_like(ya)
    e = np.exp(-ya / 2.0)
    for r, n, c in _auc_terms(u):
        total = total + c / (2.0 ** (r + u + n) * math.factorial(n)) * ya ** n * e
    return float(total) if np.ndim(y) == 0 else total


def auc_awgn(y, u: int):
    """AUC of the energy detector in AWGN for SNR y and time-bandwidth product u (array-aware)."""
    return 1.0 - complementary_auc_awgn(y, u)


def _auc_terms(u: int):
    for r in range(u):
        for n in range(r + 1):
            yield r, n, math.comb(r + u - 1, r - n)


def auc_kernel(n: int, r: int, u: int) -> MellinKernel:
    """Mellin kernel of y^n e^(-y/2) / (2^(r+u+n) n!): Gamma(n+1-t) 2^(1-t-r-u) / n!."""
    return MellinKernel(log_const=(1.0 - r - u) * math.log(2.0) - math.lgamma(n + 1.0),
                        kappa=-math.log(2.0), minus=(n + 1.0,))


def complementary_auc(chain: CascadeChain, u: int, method: str = "mellin") -> float:
    """1 - average AUC, summed directly so small values keep their relative accuracy."""
    if u < 1 or int(u) != u:
        raise DomainError(f"u must be a positive integer, got {u}")
    return sum(c * expectation(chain, auc_kernel(n, r, u), method) for r, n, c in _auc_terms(u))


def avg_auc(chain: CascadeChain, u: int, method: str = "mellin") -> float:
    return 1.0 - complementary_auc(chain, u, method)


def avg_auc_quadrature(chain: CascadeChain, u: int) -> float:
    """Reference value: AWGN AUC integrated against the product density."""
    return 1.0 - _log_quad(lambda y: complementary_auc_awgn(y, u) * product_pdf(chain, y))


# ratio metrics ------------------------------------------------------------

def multihop_outage(sys: MultihopSystem, gamma_th: float, method: str = "mellin") -> float:
    """1 - prod_r (1 - F_{X_r}(gamma_th)) for decode-and-forward hops."""
    surv = 1.0
    for hop in sys.hops:
        surv *= 1.0 - ratio_cdf(hop, gamma_th, method)
    return 1.0 - surv


def multihop_outage_expanded(cdfs: Sequence[float]) -> float:
    """Inclusion-exclusion form for two or three hops."""
    if len(cdfs) == 1:
        return cdfs[0]
    if len(cdfs) == 2:
        f1, f2 = cdfs
        return f1 + f2 - f1 * f2
    if len(cdfs) == 3:
        f1, f2, f3 = cdfs
        return f1 + f2 + f3 - f1 * f2 - f1 * f3 - f2 * f3 + f1 * f2 * f3
    raise DomainError("expanded multihop form is defined for one to three hops")


def sop_lower(sc: SecrecyScenario, method: str = "mellin") -> float:
    return ratio_cdf(sc.ratio, sc.epsilon, method)


def pnsc(sc: SecrecyScenario, method: str = "mellin") -> float:
    return 1.0 - ratio_cdf(sc.ratio, 1.0, method)

