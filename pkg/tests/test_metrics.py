import math

import numpy as np
import pytest
from helpers import cascade, db, hop, multihop, secrecy
from scipy import integrate

from mgratio import metrics
from mgratio.cascade import CascadeChain, RatioOfChains, ratio_cdf
from mgratio.errors import DomainError
from mgratio.metrics import (ModulationScheme, MultihopSystem, SecrecyScenario, abep_coherent,
                             abep_noncoherent, asep_mpsk, asep_mqam, auc_awgn, avg_auc, avg_auc_quadrature,
                             complementary_auc, effective_rate, effective_rate_quadrature, multihop_outage,
                             multihop_outage_expanded, outage, pnsc, sop_lower)
from mgratio.mixture import MixtureGamma, exponential

EXP = CascadeChain([exponential()])
GRID_DB = np.linspace(0, 27, 10)


def _quad(f, a, b):
    return integrate.quad(f, a, b, epsabs=0, epsrel=1e-12, limit=400)[0]


# schemes -------------------------------------------------------------------

def test_scheme_constants():
    assert ModulationScheme("nc-bfsk").g == 0.5 and ModulationScheme("dbpsk").g == 1.0
    assert ModulationScheme("coherent-bfsk").g == 0.5
    assert ModulationScheme("bpsk").g == 1.0
    assert ModulationScheme("bfsk-min-corr").g == 0.715
    assert ModulationScheme("mpsk", 8).g == pytest.approx(math.sin(math.pi / 8) ** 2)
    q = ModulationScheme("mqam", 4)
    assert (q.c, q.g) == pytest.approx((0.5, 0.5))
    assert ModulationScheme("MQAM", 16).g == pytest.approx(0.1)
    for bad in (("mpsk", 6), ("mqam", 2), ("mpsk", None), ("ook", None)):
        with pytest.raises(DomainError):
            ModulationScheme(*bad)
    with pytest.raises(DomainError):
        ModulationScheme("bpsk").c


# single exponential closed forms ------------------------------------------------

def test_outage_exponential():
    assert outage(EXP, 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-12)


def test_abep_noncoherent_exponential():
    assert abep_noncoherent(EXP, "dbpsk") == pytest.approx(0.25, rel=1e-12)
    assert abep_noncoherent(EXP, "nc-bfsk") == pytest.approx(1 / 3, rel=1e-12)
    with pytest.raises(DomainError):
        abep_noncoherent(EXP, "bpsk")


@pytest.mark.parametrize("gbar", [0.3, 1.0, 10.0])
def test_abep_coherent_rayleigh(gbar):
    chain = CascadeChain([exponential(gbar)])
    for kind in ("bpsk", "bfsk-min-corr", "coherent-bfsk"):
        g = ModulationScheme(kind).g
        ref = 0.5 * (1 - math.sqrt(g * gbar / (1 + g * gbar)))
        assert abep_coherent(chain, kind) == pytest.approx(ref, rel=1e-10)
    with pytest.raises(DomainError):
        abep_coherent(chain, "dbpsk")


def _mpsk_oracle(M, gbar=1.0):
    g = math.sin(math.pi / M) ** 2
    return _quad(lambda th: 1 / (1 + g * gbar / math.sin(th) ** 2), 0, math.pi - math.pi / M) / math.pi


def test_asep_mpsk_exponential():
    assert _mpsk_oracle(4) == pytest.approx(0.36509982054024950, rel=1e-12)
    for M in (4, 8, 16):
        assert asep_mpsk(EXP, M) == pytest.approx(_mpsk_oracle(M), rel=1e-10)


def test_asep_mqam_exponential():
    for M in (4, 8, 16):
        s = ModulationScheme("mqam", M)
        c, g = s.c, s.g
        j1 = 0.5 * (1 - math.sqrt(g / (1 + g)))
        j2 = _quad(lambda th: 1 / (1 + g / math.sin(th) ** 2), 0, math.pi / 4) / math.pi
        assert asep_mqam(EXP, M) == pytest.approx(4 * c * (j1 - c * j2), rel=1e-10)


def test_effective_rate_exponential():
    assert effective_rate(EXP, 1.0) == pytest.approx(0.74577517372926815, rel=1e-10)
    shannon = _quad(lambda y: math.log2(1 + y) * math.exp(-y), 0, np.inf)
    assert shannon == pytest.approx(0.86034738227088595, rel=1e-12)
    assert effective_rate(EXP, 0.01) == pytest.approx(shannon, rel=1e-2)
    with pytest.raises(DomainError):
        effective_rate(EXP, 0.0)


def test_auc_awgn_examples():
    assert auc_awgn(0.0, 1) == 0.5
    assert auc_awgn(2.0, 1) == pytest.approx(1 - math.exp(-1) / 2, rel=1e-15)
    brute = sum(math.comb(r + 2, r) / 2 ** (r + 3) for r in range(3))
    assert auc_awgn(0.0, 3) == pytest.approx(1 - brute, rel=1e-15)
    y = np.linspace(0, 50, 200)
    for u in (1, 3, 6):
        a = auc_awgn(y, u)
        assert np.all(np.diff(a) > 0) and np.all((a >= 0.5 - 1e-15) & (a < 1))
    with pytest.raises(DomainError):
        auc_awgn(1.0, 0)


def test_avg_auc_exponential():
    assert avg_auc(EXP, 1) == pytest.approx(1 - 0.5 / 1.5, rel=1e-12)
    assert avg_auc(EXP, 3) == pytest.approx(0.62268518518518519, rel=1e-11)
    assert complementary_auc(EXP, 3) == pytest.approx(1 - 0.62268518518518519, rel=1e-11)
    faint = CascadeChain([exponential(1e-9), exponential(1e-3)])
    assert avg_auc(faint, 3) == pytest.approx(0.5, abs=1e-9)


# multihop and secrecy --------------------------------------------------------------

def test_multihop_basics():
    r = RatioOfChains(EXP, EXP)
    sys1 = MultihopSystem((r,))
    assert sys1.K == 1
    assert multihop_outage(sys1, 0.7) == pytest.approx(ratio_cdf(r, 0.7), rel=1e-14)
    assert multihop_outage_expanded([0.1, 0.1]) == pytest.approx(0.19, rel=1e-15)
    # per-hop CDF 0.1 at x = 1/9 for i.i.d. exponential ratios
    assert multihop_outage(MultihopSystem((r, r)), 1 / 9) == pytest.approx(0.19, rel=1e-10)
    with pytest.raises(DomainError):
        multihop_outage_expanded([0.1] * 4)
    with pytest.raises(DomainError):
        MultihopSystem(())


@pytest.mark.parametrize("model", ["bx", "alems"])
def test_multihop_expansion_identity(model):
    sys = multihop(model, 3, 10)
    cdfs = [ratio_cdf(h, 1.0) for h in sys.hops]
    assert multihop_outage(sys, 1.0) == pytest.approx(multihop_outage_expanded(cdfs), abs=1e-12)
    assert multihop_outage(MultihopSystem(sys.hops[:2]), 1.0) == pytest.approx(
        multihop_outage_expanded(cdfs[:2]), abs=1e-12)


def test_secrecy_exponential():
    sc = SecrecyScenario(EXP, EXP, 0.0)
    assert sc.epsilon == 1.0
    assert sop_lower(sc) == pytest.approx(0.5, rel=1e-12)
    assert pnsc(sc) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(DomainError):
        SecrecyScenario(EXP, EXP, -1.0)
    vals = [sop_lower(SecrecyScenario(EXP, EXP, r)) for r in (0, 0.5, 1, 2, 4)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[2] == pytest.approx(2 / 3, rel=1e-10)


@pytest.mark.parametrize("model", ["bx", "alems"])
def test_pnsc_complements_sop(model):
    for d in (-5, 10, 25):
        sc0 = secrecy(model, d, 3, r_th=0.0)
        assert pnsc(sc0) + sop_lower(sc0) == 1.0


# evaluation-section shapes ----------------------------------------------------------

@pytest.mark.parametrize("model", ["bx", "alems"])
def test_effective_rate_ordering(model):
    for x in np.arange(0, 30.1, 2.5):
        r = [effective_rate(cascade(model, N, x), 2.5) for N in (1, 2, 3)]
        assert r[0] > r[1] > r[2]


@pytest.mark.parametrize("model", ["bx", "alems"])
def test_complementary_auc_ordering(model):
    for x in np.arange(0, 30.1, 5):
        c = [complementary_auc(cascade(model, N, x), 3) for N in (1, 2, 3)]
        assert c[0] < c[1] < c[2]


@pytest.mark.parametrize("model", ["bx", "alems"])
def test_multihop_ordering(model):
    for x in np.arange(0, 30.1, 5):
        op = [multihop_outage(multihop(model, K, x), 1.0) for K in (1, 2, 3)]
        assert op[0] < op[1] < op[2]


@pytest.mark.parametrize("model", ["bx", "alems"])
def test_pnsc_ordering(model):
    for d in np.arange(-5, 30.1, 5):
        assert pnsc(secrecy(model, d, 3)) < pnsc(secrecy(model, d, 0))


@pytest.mark.parametrize("model", ["bx", "alems"])
def test_metrics_monotone_in_gbar(model):
    chain_at = [cascade(model, 2, x) for x in GRID_DB]
    series = {
        "op": [outage(c, 1.0) for c in chain_at],
        "abep": [abep_coherent(c, "bpsk") for c in chain_at],
        "asep": [asep_mpsk(c, 4) for c in chain_at],
        "qam": [asep_mqam(c, 8) for c in chain_at],
        "ncabep": [abep_noncoherent(c, "dbpsk") for c in chain_at],
    }
    for name, v in series.items():
        assert all(b < a for a, b in zip(v, v[1:])), name
        assert all(0 <= x <= 1 for x in v), name
    er = [effective_rate(c, 2.5) for c in chain_at]
    auc = [avg_auc(c, 3) for c in chain_at]
    assert all(b > a for a, b in zip(er, er[1:]))
    assert all(b > a for a, b in zip(auc, auc[1:]))
    assert all(0.5 <= x < 1 for x in auc)


@pytest.mark.parametrize("model", ["bx", "alems"])
def test_asep_increases_with_order(model):
    chain = cascade(model, 2, 15)
    v = [asep_mpsk(chain, M) for M in (4, 8, 16)]
    assert v[0] < v[1] < v[2]
    assert all(0 < x < 1 for x in v)


@pytest.mark.parametrize("model", ["bx", "alems"])
def test_closed_forms_vs_quadrature(model):
    chain = cascade(model, 3, 15)
    # abep_coherent raises when it disagrees with the theta integral by > 1e-6
    v = abep_coherent(chain, "bpsk")
    assert v == pytest.approx(metrics.theta_integral(chain, 1.0, math.pi / 2), rel=1e-6)
    assert effective_rate(chain, 2.5) == pytest.approx(effective_rate_quadrature(chain, 2.5), rel=1e-6)
    assert avg_auc(chain, 3) == pytest.approx(avg_auc_quadrature(chain, 3), rel=1e-6)


@pytest.mark.parametrize("model", ["bx", "alems"])
def test_asep_quadrature_order_doubling(model):
    chain = cascade(model, 2, 15)
    assert asep_mpsk(chain, 4, nodes=64) == pytest.approx(asep_mpsk(chain, 4, nodes=128), abs=1e-8)
    assert asep_mqam(chain, 8, nodes=64) == pytest.approx(asep_mqam(chain, 8, nodes=128), abs=1e-8)


def test_methods_agree_on_metrics():
    chain = cascade("bx", 2, 10)
    for f in (lambda c, m: abep_coherent(c, "bpsk", m), lambda c, m: effective_rate(c, 2.5, m),
              lambda c, m: complementary_auc(c, 3, m)):
        assert f(chain, "mellin") == pytest.approx(f(chain, "combos"), rel=1e-9)


def test_gamma_link_has_exact_effective_rate():
    # Gamma(2, 1): E[(1+y)^-A] = U(2, 3 - A, 1) * Gamma(2); check against quadrature
    g2 = CascadeChain([MixtureGamma([(1, 2, 1)])])
    ref = -math.log2(_quad(lambda y: (1 + y) ** -2.5 * y * math.exp(-y), 0, np.inf)) / 2.5
    assert effective_rate(g2, 2.5) == pytest.approx(ref, rel=1e-10)
