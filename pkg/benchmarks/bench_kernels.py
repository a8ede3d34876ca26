"""Compiled vs numpy kernels: micro timings plus one end-to-end evaluation per backend.

Run: python3 benchmarks/bench_kernels.py
"""

import os
import subprocess
import sys
import timeit

import numpy as np

from mgratio import kernels

END_TO_END = """
import time
from mgratio import kernels
from mgratio.cascade import CascadeChain, product_cdf
from mgratio.channels import BeaulieuXieChannel, bx_to_mg
chain = CascadeChain([bx_to_mg(BeaulieuXieChannel(m, 0.5), 15).with_mean(g)
                      for m, g in ((1, 31.6), (2, 1.0), (3, 1.0))])
product_cdf(chain, 1.0)
t0 = time.perf_counter()
for _ in range(20):
    product_cdf(chain, 1.0)
print(kernels.BACKEND, (time.perf_counter() - t0) / 20)
"""


def micro():
    rng = np.random.default_rng(0)
    t = 0.5 + rng.uniform(0, 3, 4096) + 1j * rng.uniform(-60, 60, 4096)
    L = 15
    base = rng.normal(size=L)
    slope = rng.normal(size=L)
    offset = rng.uniform(0, 5, L)
    rows = []
    for name, mod in sorted(kernels.available_backends().items()):
        n = 20
        tl = timeit.timeit(lambda: mod.loggamma(t), number=n) / n
        ts = timeit.timeit(lambda: mod.log_gamma_sum(t, base, slope, offset, 1.0), number=n) / n
        rows.append((name, tl, ts))
    return rows


def end_to_end():
    out = {}
    for name, env in (("cython", {}), ("python", {"MGRATIO_PURE_PYTHON": "1"})):
        res = subprocess.run([sys.executable, "-c", END_TO_END], capture_output=True, text=True,
                             env={**os.environ, **env}, check=True)
        backend, secs = res.stdout.split()
        out[name] = (backend, float(secs))
    return out


def main():
    print("kernel timings, 4096 complex points, L = 15 terms")
    print(f"{'backend':<8} {'loggamma':>12} {'log_gamma_sum':>15}")
    rows = micro()
    for name, tl, ts in rows:
        print(f"{name:<8} {tl * 1e3:>10.3f}ms {ts * 1e3:>13.3f}ms")
    if len(rows) == 2:
        (_, pl, ps), (_, cl, cs) = sorted(rows, key=lambda r: r[0] != "python")
        print(f"speedup  {pl / cl:>11.1f}x {ps / cs:>14.1f}x")
    print("\nend to end: OP of a 3-link Beaulieu-Xie chain (L = 15 per link)")
    for name, (backend, secs) in end_to_end().items():
        print(f"{name:<8} (active: {backend:<6}) {secs * 1e3:8.2f} ms per evaluation")


if __name__ == "__main__":
    main()
