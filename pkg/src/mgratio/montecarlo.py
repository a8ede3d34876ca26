"""MG-level Monte Carlo: draw product, ratio and multihop variates and average conditional kernels.

Seeding: a product chain draws link 0 from ``seed`` itself (so a one-link chain
reproduces :meth:`MixtureGamma.sample`) and link ``i`` from the substream
``SeedSequence(seed, spawn_key=(i,))``. A ratio draws its numerator under key
``(1,)`` and its denominator under key ``(2,)``; hop ``r`` of a multihop system
uses key ``(r,)``. Keys nest, so every link of every chain gets its own stream.

Kernels are evaluated in fixed chunks of ``CHUNK`` draws and reduced by plain
summation in chunk order, so results depend only on (source, kernel, count, seed).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .cascade import CascadeChain, RatioOfChains
from .channels import BeaulieuXieChannel
from .errors import DomainError
from .metrics import (_COHERENT, _NONCOHERENT, ModulationScheme, MultihopSystem, auc_awgn,
                      complementary_auc_awgn)

CHUNK = 1 << 16
KERNELS = ("op", "above", "nc", "coherent", "mpsk", "mqam", "er", "auc", "cauc")


@dataclass(frozen=True)
class McReport:
    estimate: float
    std_error: float
    draws: int
    seed: int

    def __post_init__(self):
        if not self.std_error >= 0:
            raise DomainError(f"std_error must be >= 0, got {self.std_error}")
        if self.draws < 1:
            raise DomainError(f"draws must be >= 1, got {self.draws}")

    def z_score(self, analytic: float) -> float:
        if self.std_error == 0:
            return 0.0 if analytic == self.estimate else math.copysign(math.inf, analytic - self.estimate)
        return (analytic - self.estimate) / self.std_error


def _child(seed, *keys) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + keys)
    return np.random.SeedSequence(seed, spawn_key=keys)


def _check_count(count):
    if count < 1 or int(count) != count:
        raise DomainError(f"count must be a positive integer, got {count}")


def sample_product(chain: CascadeChain, count: int, seed) -> np.ndarray:
    """Draws of Y = prod gamma_i with independent per-link streams."""
    _check_count(count)
    out = chain.links[0].sample(count, seed)
    for i, mg in enumerate(chain.links[1:], start=1):
        out = out * mg.sample(count, _child(seed, i))
    return out


def sample_ratio(r: RatioOfChains, count: int, seed) -> np.ndarray:
    """Draws of X = Y / Z with numerator and denominator on separate substreams."""
    _check_count(count)
    return sample_product(r.numerator, count, _child(seed, 1)) / sample_product(r.denominator, count, _child(seed, 2))


def sample_multihop(sys: MultihopSystem, count: int, seed) -> np.ndarray:
    """Draws of min_r X_r; outage of the decode-and-forward chain is P(min < gamma_th)."""
    _check_count(count)
    out = sample_ratio(sys.hops[0], count, _child(seed, 0))
    for r, hop in enumerate(sys.hops[1:], start=1):
        out = np.minimum(out, sample_ratio(hop, count, _child(seed, r)))
    return out


def sample_bx_exact(ch: BeaulieuXieChannel, count: int, seed) -> np.ndarray:
    """Exact Beaulieu-Xie SNR draws: Gamma(m + K, gbar/m) with K ~ Poisson(lambda^2 / 2)."""
    _check_count(count)
    rng = np.random.default_rng(seed)
    k = rng.poisson(0.5 * ch.lam ** 2, size=count)
    return rng.gamma(ch.m + k, ch.gbar / ch.m)


def draw(source, count: int, seed) -> np.ndarray:
    if isinstance(source, CascadeChain):
        return sample_product(source, count, seed)
    if isinstance(source, RatioOfChains):
        return sample_ratio(source, count, seed)
    if isinstance(source, MultihopSystem):
        return sample_multihop(source, count, seed)
    if isinstance(source, BeaulieuXieChannel):
        return sample_bx_exact(source, count, seed)
    raise DomainError(f"cannot sample from {type(source).__name__}")


# conditional kernels -------------------------------------------------------

def _q(x):
    return 0.5 * special.erfc(x / math.sqrt(2.0))


def _mpsk_direct(y: np.ndarray, M: int, nodes: int = 64) -> np.ndarray:
    g = math.sin(math.pi / M) ** 2
    upper = math.pi - math.pi / M
    x, w = np.polynomial.legendre.leggauss(nodes)
    s2 = np.sin(0.5 * upper * (x + 1.0)) ** 2
    vals = np.exp(-g * y[:, None] / s2[None, :])
    return 0.5 * upper * (vals @ w) / math.pi


_GRID_LO, _GRID_HI, _GRID_N = 1e-5, 1e3, 4096


@functools.lru_cache(maxsize=16)
def _mpsk_table(M: int):
    lg = np.linspace(math.log(_GRID_LO), math.log(_GRID_HI), _GRID_N)
    return lg, _mpsk_direct(np.exp(lg), M)


def mpsk_kernel(y, M: int) -> np.ndarray:
    """(1/pi) int_0^(pi - pi/M) exp(-g y / sin^2 theta) d theta, interpolated on a log grid."""
    y = np.asarray(y, dtype=np.float64)
    lg, table = _mpsk_table(int(M))
    out = np.empty_like(y)
    inside = (y >= _GRID_LO) & (y <= _GRID_HI)
    out[inside] = np.interp(np.log(y[inside]), lg, table)
    if np.any(~inside):
        out[~inside] = _mpsk_direct(y[~inside], int(M))
    return out


def _kernel_fn(kernel: str, params: dict):
    p = dict(params or {})
    if kernel == "op":
        th = float(p["gamma_th"])
        return lambda y: (y < th).astype(np.float64)
    if kernel == "above":
        th = float(p["gamma_th"])
        return lambda y: (y > th).astype(np.float64)
    if kernel in ("nc", "coherent"):
        s = p["scheme"]
        s = ModulationScheme(s) if isinstance(s, str) else s
        if kernel == "nc":
            if s.kind not in _NONCOHERENT:
                raise DomainError(f"{s.kind!r} is not a noncoherent scheme")
            return lambda y: 0.5 * np.exp(-s.g * y)
        if s.kind not in _COHERENT:
            raise DomainError(f"{s.kind!r} is not a coherent binary scheme")
        return lambda y: _q(np.sqrt(2.0 * s.g * y))
    if kernel == "mpsk":
        M = int(p["M"])
        ModulationScheme("mpsk", M)
        return lambda y: mpsk_kernel(y, M)
    if kernel == "mqam":
        s = ModulationScheme("mqam", int(p["M"]))
        c, g = s.c, s.g

        def f(y):
            q = _q(np.sqrt(2.0 * g * y))
            return 4.0 * c * q - 4.0 * c * c * q * q
        return f
    if kernel == "er":
        A = float(p["A"])
        if not A > 0:
            raise DomainError(f"A must be positive, got {A}")
        return lambda y: (1.0 + y) ** -A
    if kernel == "auc":
        u = int(p["u"])
        return lambda y: auc_awgn(y, u)
    if kernel == "cauc":
        u = int(p["u"])
        return lambda y: complementary_auc_awgn(y, u)
    raise DomainError(f"unknown kernel {kernel!r}; expected one of {', '.join(KERNELS)}")


def mc_from_samples(kernel: str, samples: np.ndarray, params: dict | None = None, seed: int = 0) -> McReport:
    """Kernel average over given draws (lets several metrics share one sample)."""
    f = _kernel_fn(kernel, params)
    samples = np.asarray(samples, dtype=np.float64)
    n = samples.size
    if n < 1:
        raise DomainError("no samples")
    s1 = 0.0
    chunks = []
    for start in range(0, n, CHUNK):
        v = f(samples[start:start + CHUNK])
        chunks.append(v)
        s1 += float(v.sum())
    mean = s1 / n
    s2 = sum(float(((v - mean) ** 2).sum()) for v in chunks)
    std = math.sqrt(s2 / (n - 1)) if n > 1 else 0.0
    se = std / math.sqrt(n)
    if kernel == "er":
        A = float(params["A"])
        est = -math.log2(mean) / A
        se = se / (A * mean * math.log(2.0))
        return McReport(est, se, n, int(seed))
    return McReport(mean, se, n, int(seed))


def mc_metric(kernel: str, source, params: dict | None, count: int, seed: int) -> McReport:
    """Monte Carlo estimate of a metric from ``count`` draws of ``source``."""
    _kernel_fn(kernel, params)
    return mc_from_samples(kernel, draw(source, count, seed), params, seed)


def ecdf_sup_distance(samples, cdf, points) -> float:
    """max |F_n(x) - F(x)| over ``points`` (F_n the empirical CDF of ``samples``)."""
    s = np.sort(np.asarray(samples, dtype=np.float64))
    pts = np.asarray(points, dtype=np.float64)
    emp = np.searchsorted(s, pts, side="right") / s.size
    ref = np.array([cdf(x) for x in pts])
    return float(np.max(np.abs(emp - ref)))
