"""Univariate Meijer G-function for real parameters and positive argument.

Convention:

    G^{m,n}_{p,q}[z | a; b] = (1 / 2 pi i) * int_L
        prod_{j<m} Gamma(b_j + s) prod_{j<n} Gamma(1 - a_j - s)
        / ( prod_{j>=n} Gamma(a_j + s) prod_{j>=m} Gamma(1 - b_j - s) ) * z^-s ds

with L a vertical line separating the left poles ``-b_j - k`` (j < m) from the
right poles ``1 - a_j + k`` (j < n). Two evaluation paths are provided: the
line integral (:func:`eval_contour`) and the left-pole residue series
(:func:`eval_residues`), which only handles simple poles.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .contour import LineResult, line_integral
from .errors import (ConvergenceError, CrossCheckError, DegeneratePolesError, DomainError,
                     PrecisionLossError)

_INT_TOL = 1e-12
_VERIFY_RTOL = 1e-8


def _near_int(x: float) -> bool:
    return abs(x - round(x)) <= _INT_TOL


@dataclass(frozen=True)
class MeijerGSpec:
    m: int
    n: int
    p: int
    q: int
    a: tuple[float, ...] = ()
    b: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if len(self.a) != self.p or len(self.b) != self.q:
            raise DomainError(f"parameter lengths ({len(self.a)}, {len(self.b)}) "
                              f"do not match p={self.p}, q={self.q}")
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise DomainError(f"need 0 <= m <= q and 0 <= n <= p, got m={self.m}, n={self.n}, "
                              f"p={self.p}, q={self.q}")

    @property
    def degenerate(self) -> bool:
        """True when two of the left-pole parameters b_j (j < m) differ by an integer."""
        bs = self.b[:self.m]
        return any(_near_int(bs[i] - bs[j]) for i in range(len(bs)) for j in range(i))

    @property
    def strip(self) -> tuple[float, float]:
        """(rightmost left pole, leftmost right pole) of the integrand."""
        lo = max((-b for b in self.b[:self.m]), default=-math.inf)
        hi = min((1.0 - a for a in self.a[:self.n]), default=math.inf)
        return lo, hi

    def __str__(self) -> str:
        a = ", ".join(f"{v:g}" for v in self.a) or "-"
        b = ", ".join(f"{v:g}" for v in self.b) or "-"
        return f"G^{{{self.m},{self.n}}}_{{{self.p},{self.q}}}[z | {a}; {b}]"


def _gamma_factors(spec: MeijerGSpec):
    """Offsets, s-coefficients and signs of every Gamma factor of the integrand."""
    off, eps, sgn = [], [], []
    for v in spec.b[:spec.m]:
        off.append(v); eps.append(1.0); sgn.append(1.0)
    for v in spec.a[:spec.n]:
        off.append(1.0 - v); eps.append(-1.0); sgn.append(1.0)
    for v in spec.a[spec.n:]:
        off.append(v); eps.append(1.0); sgn.append(-1.0)
    for v in spec.b[spec.m:]:
        off.append(1.0 - v); eps.append(-1.0); sgn.append(-1.0)
    return np.array(off), np.array(eps), np.array(sgn)


def log_integrand(spec: MeijerGSpec, z: float):
    """Vectorised complex log of the Mellin-Barnes integrand at argument ``z``."""
    off, eps, sgn = _gamma_factors(spec)
    log_z = math.log(z)

    def logf(s):
        s = np.asarray(s, dtype=np.complex128)
        if off.size == 0:
            return -s * log_z
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = kernels.loggamma(off[:, None] + eps[:, None] * s[None, :])
        return sgn @ lg - s * log_z

    return logf


def _check(spec: MeijerGSpec, z: float):
    if not (z > 0 and math.isfinite(z)):
        raise DomainError(f"Meijer G argument must be positive and finite, got {z}")


def eval_contour_detail(spec: MeijerGSpec, z: float, rtol: float = 1e-12) -> LineResult:
    """Line-integral evaluation returning the quadrature diagnostics."""
    _check(spec, z)
    if spec.p > spec.q:
        raise DomainError("eval_contour needs q >= p; reflect the spec first")
    lo, hi = spec.strip
    return line_integral(log_integrand(spec, z), lo, hi, rtol=rtol)


def eval_contour(spec: MeijerGSpec, z: float, rtol: float = 1e-12) -> float:
    """G evaluated by trapezoidal quadrature along a vertical line."""
    return eval_contour_detail(spec, z, rtol).value


def _lgamma_signed(x: float) -> tuple[float, float]:
    """(log|Gamma(x)|, sign Gamma(x)); sign 0 marks a pole."""
    if x <= 0 and _near_int(x):
        return math.inf, 0.0
    if x > 0:
        return math.lgamma(x), 1.0
    return math.lgamma(x), (-1.0 if math.floor(-x) % 2 == 0 else 1.0)


_MAX_TERMS = 10000
_AMPLIFICATION_LIMIT = 1e5


def eval_residues(spec: MeijerGSpec, z: float) -> float:
    """G as the sum of residues at the left poles ``s = -b_j - k``.

    Requires q > p and simple left poles. Raises :class:`PrecisionLossError`
    when the alternating series cancels too much for double precision.
    """
    _check(spec, z)
    if spec.q <= spec.p:
        raise DomainError("residue series needs q > p")
    if spec.degenerate:
        raise DegeneratePolesError(f"{spec} has integer-spaced b parameters; use the contour path")
    lo, hi = spec.strip
    if spec.m == 0:
        return 0.0
    if not lo < hi:
        raise DomainError(f"left and right poles of {spec} overlap")
    m, n = spec.m, spec.n
    a, b = spec.a, spec.b
    log_z = math.log(z)
    total = 0.0
    peak = 0.0
    small_run = 0
    prev_mag = math.inf
    for k in range(_MAX_TERMS):
        term_k = 0.0
        for j in range(m):
            bj = b[j]
            log_t = (bj + k) * log_z - math.lgamma(k + 1.0)
            sign = -1.0 if k % 2 else 1.0
            for i in range(m):
                if i != j:
                    lv, sv = _lgamma_signed(b[i] - bj - k)
                    log_t += lv; sign *= sv
            for i in range(n):
                lv, sv = _lgamma_signed(1.0 - a[i] + bj + k)
                log_t += lv; sign *= sv
            zero = False
            for i in range(n, spec.p):
                lv, sv = _lgamma_signed(a[i] - bj - k)
                if sv == 0.0:
                    zero = True
                    break
                log_t -= lv; sign *= sv
            if not zero:
                for i in range(m, spec.q):
                    lv, sv = _lgamma_signed(1.0 - b[i] + bj + k)
                    if sv == 0.0:
                        zero = True
                        break
                    log_t -= lv; sign *= sv
            if zero:
                continue
            if log_t > 700.0:
                raise PrecisionLossError(f"residue terms of {spec} at z={z} overflow")
            term_k += sign * math.exp(log_t)
        total += term_k
        mag = abs(term_k)
        peak = max(peak, mag)
        if mag <= 1e-15 * abs(total) and mag <= prev_mag:
            small_run += 1
            if small_run >= 3:
                break
        else:
            small_run = 0
        prev_mag = mag if mag > 0 else prev_mag
    else:
        raise ConvergenceError(f"residue series for {spec} at z={z} hit the {_MAX_TERMS}-term cap")
    if total == 0.0 or peak / abs(total) > _AMPLIFICATION_LIMIT:
        raise PrecisionLossError(f"residue series for {spec} at z={z} cancels "
                                 f"(peak term / sum = {peak / abs(total) if total else math.inf:.3g})")
    return total


def reflect(spec: MeijerGSpec, z: float) -> tuple[MeijerGSpec, float]:
    """G^{m,n}_{p,q}[z | a; b] = G^{n,m}_{q,p}[1/z | 1-b; 1-a]."""
    ref = MeijerGSpec(spec.n, spec.m, spec.q, spec.p,
                      tuple(1.0 - v for v in spec.b), tuple(1.0 - v for v in spec.a))
    return ref, 1.0 / z


def residues_legal(spec: MeijerGSpec) -> bool:
    if spec.q <= spec.p or spec.degenerate or spec.m == 0:
        return False
    lo, hi = spec.strip
    return lo < hi


def _verify_enabled(verify) -> bool:
    if verify is not None:
        return bool(verify)
    return os.environ.get("MGRATIO_VERIFY", "") in ("1", "true", "yes")


def eval(spec: MeijerGSpec, z: float, verify: bool | None = None) -> float:  # noqa: A001
    """Dispatching evaluator.

    Reflects when p > q, prefers the residue series when it is legal and well
    conditioned, and otherwise integrates along a line. With ``verify`` (or
    ``MGRATIO_VERIFY=1``) both paths run whenever both are legal and must agree
    to 1e-8 relative.
    """
    _check(spec, z)
    if spec.p > spec.q:
        spec, z = reflect(spec, z)
    value = None
    if residues_legal(spec):
        try:
            value = eval_residues(spec, z)
        except (PrecisionLossError, ConvergenceError):
            value = None
        if value is not None and _verify_enabled(verify):
            other = eval_contour(spec, z)
            if abs(value - other) > _VERIFY_RTOL * max(abs(value), abs(other)):
                raise CrossCheckError(f"{spec} at z={z}: residues {value!r} vs contour {other!r}")
    if value is None:
        value = eval_contour(spec, z)
    return value


def integrand_samples(spec: MeijerGSpec, z: float, count: int = 200):
    """Integrand values along the line chosen by the contour path.

    Returns ``(c, t, F)`` with ``F = F(c + i t)`` for ``count`` points covering
    the truncated line. Used by the ``meijer-debug`` CLI verb.
    """
    _check(spec, z)
    if spec.p > spec.q:
        spec, z = reflect(spec, z)
    detail = eval_contour_detail(spec, z)
    t = np.linspace(0.0, detail.t_max, count)
    logf = log_integrand(spec, z)
    with np.errstate(all="ignore"):
        vals = np.exp(logf(detail.c + 1j * t))
    return detail, t, vals
