"""Mixture-Gamma (MG) distributions.

An MG variate has density

    f(g) = sum_l sigma_l g^(beta_l - 1) exp(-zeta_l g),    g > 0,

with every term positive. The probability carried by term ``l`` is
``sigma_l Gamma(beta_l) zeta_l^-beta_l``; these masses sum to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import special

from . import kernels
from .errors import DomainError, PoleError

_MASS_TOL = 1e-9


@dataclass(frozen=True)
class MGTerm:
    sigma: float
    beta: float
    zeta: float

    def __post_init__(self):
        for name in ("sigma", "beta", "zeta"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"MGTerm.{name} must be finite and positive, got {v}")

    @property
    def log_mass(self) -> float:
        return math.log(self.sigma) + math.lgamma(self.beta) - self.beta * math.log(self.zeta)


class MixtureGamma:
    """Immutable MG distribution.

    Parameters
    ----------
    terms
        The ``(sigma, beta, zeta)`` triples, as :class:`MGTerm` or plain tuples.
    label
        Free-text identifier carried through serialization.
    """

    __slots__ = ("terms", "label", "sigma", "beta", "zeta", "log_sigma", "log_zeta",
                 "masses", "_probs")

    def __init__(self, terms: Iterable, label: str = "mg"):
        terms = tuple(t if isinstance(t, MGTerm) else MGTerm(*map(float, t)) for t in terms)
        if not terms:
            raise DomainError("MixtureGamma needs at least one term")
        if not label or any(ch.isspace() for ch in label):
            raise DomainError(f"label must be a non-empty token without whitespace, got {label!r}")
        self.terms = terms
        self.label = label
        self.sigma = np.array([t.sigma for t in terms])
        self.beta = np.array([t.beta for t in terms])
        self.zeta = np.array([t.zeta for t in terms])
        self.log_sigma = np.log(self.sigma)
        self.log_zeta = np.log(self.zeta)
        log_mass = np.array([t.log_mass for t in terms])
        self.masses = np.exp(log_mass)
        total = float(self.masses.sum())
        if abs(total - 1.0) > _MASS_TOL:
            raise DomainError(f"MG masses sum to {total!r}, not 1 (use normalize())")
        self._probs = self.masses / total
        for arr in (self.sigma, self.beta, self.zeta, self.log_sigma, self.log_zeta,
                    self.masses, self._probs):
            arr.setflags(write=False)

    def __setattr__(self, name, value):
        if hasattr(self, "_probs"):
            raise AttributeError("MixtureGamma is immutable")
        object.__setattr__(self, name, value)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"MixtureGamma(label={self.label!r}, L={len(self)})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, MixtureGamma) and self.terms == other.terms
                and self.label == other.label)

    def __hash__(self) -> int:
        return hash((self.terms, self.label))

    @property
    def min_beta(self) -> float:
        return float(self.beta.min())

    @property
    def mean(self) -> float:
        return self.mellin(2.0)

    # densities -----------------------------------------------------------

    def pdf(self, g):
        """Density at ``g >= 0``; array-aware."""
        ga = np.asarray(g, dtype=np.float64)
        if np.any(ga < 0):
            raise DomainError("pdf: g must be non-negative")
        if np.any(ga == 0) and self.min_beta < 1:
            raise DomainError("pdf diverges at the origin when some beta < 1")
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log(ga)[..., None]
            logs = self.log_sigma + (self.beta - 1.0) * lg - self.zeta * ga[..., None]
            logs = np.where((ga[..., None] == 0) & (self.beta == 1.0), self.log_sigma, logs)
        out = np.exp(logs).sum(axis=-1)
        return float(out) if np.ndim(g) == 0 else out

    def cdf(self, g):
        """P(gamma <= g) as the mass-weighted regularized lower incomplete gammas."""
        ga = np.asarray(g, dtype=np.float64)
        if np.any(ga < 0):
            raise DomainError("cdf: g must be non-negative")
        out = (self.masses * special.gammainc(self.beta, self.zeta * ga[..., None])).sum(axis=-1)
        out = np.clip(out, 0.0, 1.0)
        return float(out) if np.ndim(g) == 0 else out

    def mgf(self, s):
        """Laplace transform E[exp(-s gamma)] = sum sigma Gamma(beta) (s + zeta)^-beta."""
        sa = np.asarray(s, dtype=np.float64)
        if np.any(sa <= -self.zeta.min()):
            raise DomainError(f"mgf: s must exceed -min(zeta) = {-self.zeta.min()}")
        logs = (self.log_sigma + special.gammaln(self.beta)
                - self.beta * np.log(sa[..., None] + self.zeta))
        out = np.exp(logs).sum(axis=-1)
        return float(out) if np.ndim(s) == 0 else out

    def mellin(self, n: float) -> float:
        """E[gamma^(n-1)] = sum sigma zeta^(1-n-beta) Gamma(beta - 1 + n)."""
        n = float(n)
        if not n > 1.0 - self.min_beta:
            arg = self.beta - 1.0 + n
            if np.any((arg <= 0) & (np.abs(arg - np.round(arg)) < 1e-14)):
                raise PoleError(f"mellin: Gamma pole at n = {n}")
            raise DomainError(f"mellin: need n > {1.0 - self.min_beta}, got {n}")
        logs = (self.log_sigma + (1.0 - n - self.beta) * self.log_zeta
                + special.gammaln(self.beta - 1.0 + n))
        return float(np.exp(logs).sum())

    def log_mellin(self, t):
        """Complex log of the Mellin transform at complex points ``t``."""
        return kernels.log_gamma_sum(np.asarray(t, dtype=np.complex128),
                                     self.log_sigma + (1.0 - self.beta) * self.log_zeta,
                                     -self.log_zeta, self.beta - 1.0, 1.0)

    def log_mellin_reflected(self, t):
        """Complex log of the Mellin transform evaluated at ``2 - t``, i.e. of E[gamma^(1-t)]."""
        return kernels.log_gamma_sum(np.asarray(t, dtype=np.complex128),
                                     self.log_sigma - (1.0 + self.beta) * self.log_zeta,
                                     self.log_zeta, self.beta + 1.0, -1.0)

    # transformations -----------------------------------------------------

    def scaled(self, c: float, label: str | None = None) -> "MixtureGamma":
        """Distribution of ``c * gamma`` for c > 0."""
        if not c > 0:
            raise DomainError(f"scale factor must be positive, got {c}")
        lc = math.log(c)
        terms = [(math.exp(math.log(t.sigma) - t.beta * lc), t.beta, t.zeta / c)
                 for t in self.terms]
        return MixtureGamma(terms, label or self.label)

    def with_mean(self, mean: float, label: str | None = None) -> "MixtureGamma":
        """Rescaled copy whose mean equals ``mean``."""
        return self.scaled(mean / self.mean, label)

    # sampling ------------------------------------------------------------

    def sample(self, count: int, seed) -> np.ndarray:
        """``count`` i.i.d. draws; ``seed`` is an int or a numpy SeedSequence."""
        if count < 1:
            raise DomainError(f"sample count must be >= 1, got {count}")
        rng = np.random.default_rng(seed)
        if len(self) == 1:
            comp = np.zeros(count, dtype=np.intp)
        else:
            comp = rng.choice(len(self), size=count, p=self._probs)
        return rng.gamma(self.beta[comp], 1.0 / self.zeta[comp])

    # serialization -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"mg {self.label} {len(self)}"]
        lines += [f"{t.sigma!r} {t.beta!r} {t.zeta!r}" for t in self.terms]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MixtureGamma":
        rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 3 or rows[0][0] != "mg":
            raise DomainError("MG record must start with 'mg <label> <L>'")
        label, count = rows[0][1], int(rows[0][2])
        body = rows[1:]
        if len(body) != count or any(len(r) != 3 for r in body):
            raise DomainError(f"MG record declares {count} terms but has {len(body)} valid lines")
        return cls([tuple(float(v) for v in r) for r in body], label)


def normalize(raw_terms: Sequence[tuple[float, float, float]], label: str = "mg") -> MixtureGamma:
    """Build an MG from un-normalized ``(theta, beta, zeta)`` triples.

    sigma_l = theta_l / sum_j theta_j Gamma(beta_j) zeta_j^-beta_j, in log space.
    """
    raw = np.asarray(raw_terms, dtype=np.float64)
    if raw.ndim != 2 or raw.shape[1] != 3 or raw.shape[0] == 0:
        raise DomainError("normalize expects a non-empty list of (theta, beta, zeta)")
    if np.any(~np.isfinite(raw)) or np.any(raw <= 0):
        raise DomainError("normalize: theta, beta and zeta must be finite and positive")
    return normalize_log(np.log(raw[:, 0]), raw[:, 1], raw[:, 2], label)


def normalize_log(log_theta, beta, zeta, label: str = "mg") -> MixtureGamma:
    """As :func:`normalize` but with the weights given as logs (avoids overflow)."""
    log_theta = np.asarray(log_theta, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    zeta = np.asarray(zeta, dtype=np.float64)
    if np.any(beta <= 0) or np.any(zeta <= 0):
        raise DomainError("normalize: beta and zeta must be positive")
    log_mass = log_theta + special.gammaln(beta) - beta * np.log(zeta)
    keep = np.isfinite(log_mass)
    if not np.any(keep):
        raise DomainError("normalize: no term carries finite mass")
    log_total = special.logsumexp(log_mass[keep])
    log_sigma = log_theta - log_total
    # terms whose weight underflows carry no representable mass; drop them
    keep &= np.exp(log_sigma) > 0
    terms = [MGTerm(float(np.exp(ls)), float(b), float(z))
             for ls, b, z in zip(log_sigma[keep], beta[keep], zeta[keep])]
    return MixtureGamma(terms, label)


def exponential(mean: float = 1.0, label: str = "exp") -> MixtureGamma:
    """Single-term MG of an exponential variate with the given mean."""
    return MixtureGamma([(1.0 / mean, 1.0, 1.0 / mean)], label)


def default_grid(gbar: float, points: int = 2000) -> np.ndarray:
    """MSE grid: ``points`` equally spaced abscissas on (0, 5 gbar].

    The origin itself is left out because several exact densities diverge there.
    """
    return np.linspace(0.0, 5.0 * gbar, points + 1)[1:]


def mse_between(f: Callable, h: Callable, grid) -> float:
    """Mean squared difference of two densities over ``grid``."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise DomainError("mse_between: empty grid")
    fv = np.asarray(f(grid), dtype=np.float64)
    hv = np.asarray(h(grid), dtype=np.float64)
    return float(np.mean((fv - hv) ** 2))
