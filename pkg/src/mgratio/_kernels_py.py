"""Pure-numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` function for function and are used whenever the
compiled extension is unavailable (or ``MGRATIO_PURE_PYTHON=1`` is set).
"""

import numpy as np

# Stirling-series coefficients B_2k / (2k (2k-1)), k = 1..8
_STIRLING = np.array([
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
])
_HALF_LOG_2PI = 0.91893853320467274178
_SHIFT = 10.0


def loggamma(z):
    """Principal branch of log Gamma for a complex array.

    The argument is shifted until its real part is at least 10 (unless it
    already lies in the right half-plane with |Im z| >= 10), the Stirling
    series is applied there, and the shift is undone by subtracting the
    principal logs of the intermediate factors.
    """
    z = np.asarray(z, dtype=np.complex128)
    shape = z.shape
    z = z.ravel()
    nshift = np.ceil(np.maximum(0.0, _SHIFT - z.real)).astype(np.int64)
    # far from the real axis in the right half-plane |z| >= 10 already
    nshift[(z.real >= 0.0) & (np.abs(z.imag) >= _SHIFT)] = 0
    w = z + nshift
    corr = np.zeros_like(z)
    kmax = int(nshift.max()) if nshift.size else 0
    for k in range(kmax):
        active = nshift > k
        corr[active] += np.log(z[active] + k)
    winv = 1.0 / w
    winv2 = winv * winv
    series = np.zeros_like(w)
    for c in _STIRLING[::-1]:
        series = series * winv2 + c
    series *= winv
    out = (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series - corr
    return out.reshape(shape)


def log_gamma_sum(t, base, slope, offset, eps):
    """Complex log of sum_l exp(base_l + slope_l*t + loggamma(offset_l + eps*t)).

    Evaluated for every node of ``t``; the log-sum-exp is stabilised by the
    largest real part per node.
    """
    t = np.asarray(t, dtype=np.complex128)
    base = np.asarray(base, dtype=np.float64)
    slope = np.asarray(slope, dtype=np.float64)
    offset = np.asarray(offset, dtype=np.float64)
    terms = (base[:, None] + slope[:, None] * t[None, :]
             + loggamma(offset[:, None] + eps * t[None, :]))
    peak = terms.real.max(axis=0)
    total = np.exp(terms - peak).sum(axis=0)
    return np.log(total) + peak
