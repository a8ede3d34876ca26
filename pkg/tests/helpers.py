"""Evaluation-section channel sets shared by the test modules."""

import functools

from mgratio.cascade import CascadeChain, RatioOfChains
from mgratio.channels import AlemsChannel, BeaulieuXieChannel, alems_to_mg, bx_to_mg
from mgratio.metrics import MultihopSystem, SecrecyScenario

L = 15
MODELS = ("bx", "alems")


def db(x):
    return 10.0 ** (x / 10.0)


@functools.lru_cache(maxsize=None)
def unit_fit(model, m, shape=None):
    """Unit-scale fit; shape is lambda for BX and mu for ALEMS."""
    if model == "bx":
        return bx_to_mg(BeaulieuXieChannel(m, 0.5 if shape is None else shape), L, f"bx_m{m}")
    return alems_to_mg(AlemsChannel(2.5, 0.1, 0.5, 2.5 if shape is None else shape, m), L, f"al_m{m}")


def link(model, m, gbar_db=0.0, shape=None):
    """Fitted link scaled so that its mean SNR is gbar."""
    return unit_fit(model, m, shape).with_mean(db(gbar_db))


def cascade(model, N, gbar_db):
    """Links m = 1..N; link 1 at gbar_db, the others at 0 dB."""
    return CascadeChain([link(model, m, gbar_db if m == 1 else 0.0) for m in range(1, N + 1)])


HOP_SHAPES = {"bx": (0.5, 1.5, 2.5), "alems": (2.5, 1.5, 0.5)}


def hop(model, r, gbar_db):
    s = HOP_SHAPES[model][r]
    return RatioOfChains(CascadeChain([link(model, 1, gbar_db, s), link(model, 2, 0.0, s)]),
                         CascadeChain([link(model, 3, 0.0, s)]))


def multihop(model, K, gbar_db):
    return MultihopSystem(tuple(hop(model, r, gbar_db) for r in range(K)))


def secrecy(model, gbar_d_db, gbar_e_db, r_th=1.0):
    return SecrecyScenario(CascadeChain([link(model, 1, gbar_d_db)]),
                           CascadeChain([link(model, 2, gbar_e_db)]), r_th)


# acceptance lines, printed by the terminal-summary hook in conftest
ACCEPTANCE = {}


def record(n, ok, text):
    ACCEPTANCE[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}"
    return ok
