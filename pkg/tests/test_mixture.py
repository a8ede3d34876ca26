import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from mgratio.channels import BeaulieuXieChannel, bx_exact_pdf, bx_poisson_masses, bx_to_mg
from mgratio.errors import DomainError, PoleError
from mgratio.mixture import (MGTerm, MixtureGamma, default_grid, exponential, mse_between, normalize)
from mgratio.montecarlo import ecdf_sup_distance

TWO = normalize([(1, 1, 1), (1, 2, 1)])


def _mass(mg):
    return sum(t.sigma * math.gamma(t.beta) * t.zeta ** -t.beta for t in mg.terms)


mixtures = st.lists(st.tuples(st.floats(0.01, 10), st.floats(0.3, 8), st.floats(0.2, 5)),
                    min_size=1, max_size=5).map(normalize)


def test_normalize_single_term():
    mg = normalize([(5, 1, 1)])
    assert mg.terms[0].sigma == pytest.approx(1.0, rel=1e-15)


def test_normalize_equal_mass():
    assert [t.sigma for t in TWO.terms] == pytest.approx([0.5, 0.5], rel=1e-15)


def test_normalize_bx_weights_are_poisson():
    ch = BeaulieuXieChannel(2, 0.5, 1.0)
    mg = bx_to_mg(ch, 15)
    p = bx_poisson_masses(ch, 15)
    assert mg.masses == pytest.approx(p / p.sum(), abs=1e-12)


def test_normalize_rejects_bad_input():
    for bad in ([(0, 1, 1)], [(1, -1, 1)], [(1, 1, 0)], []):
        with pytest.raises(DomainError):
            normalize(bad)
    with pytest.raises(DomainError):
        MGTerm(1.0, 0.0, 1.0)


def test_normalize_large_beta_no_overflow():
    mg = normalize([(1.0, 150.0, 0.5), (2.0, 120.0, 3.0)])
    assert _mass(mg) == pytest.approx(1.0, rel=1e-9) if math.isfinite(_mass(mg)) else True
    assert np.exp(np.array([t.log_mass for t in mg.terms])).sum() == pytest.approx(1.0, rel=1e-12)


@given(mixtures)
def test_unit_mass(mg):
    assert abs(_mass(mg) - 1) <= 1e-9
    assert mg.mellin(1.0) == pytest.approx(1.0, abs=1e-9)


def test_pdf_examples():
    assert exponential().pdf(1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert MixtureGamma([(1, 2, 1)]).pdf(1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert exponential().pdf(0.0) == 1.0
    with pytest.raises(DomainError):
        MixtureGamma([(1 / math.gamma(0.5), 0.5, 1)]).pdf(0.0)
    with pytest.raises(DomainError):
        exponential().pdf(-1.0)


@given(mixtures)
def test_pdf_integrates_to_one(mg):
    head, _ = integrate.quad(mg.pdf, 0, 1, epsabs=1e-12, epsrel=1e-12, limit=200)
    tail, _ = integrate.quad(mg.pdf, 1, np.inf, epsabs=1e-12, epsrel=1e-12, limit=200)
    val = head + tail
    assert val == pytest.approx(1.0, abs=1e-8)


def test_cdf_examples():
    assert exponential().cdf(1.0) == pytest.approx(1 - math.exp(-1), rel=1e-15)
    assert exponential().cdf(0.0) == 0.0
    ref, _ = integrate.quad(TWO.pdf, 0, 2, epsabs=0, epsrel=1e-13)
    assert TWO.cdf(2.0) == pytest.approx(ref, rel=1e-12)
    assert TWO.cdf(1e6) == pytest.approx(1.0, abs=1e-15)


@given(mixtures)
def test_cdf_monotone_and_pdf_nonnegative(mg):
    g = np.linspace(0.001, 30, 400)
    assert np.all(np.diff(mg.cdf(g)) >= 0)
    assert np.all(mg.pdf(g) >= 0)


def test_mgf_examples():
    assert exponential().mgf(1.0) == pytest.approx(0.5, rel=1e-15)
    assert MixtureGamma([(1, 2, 1)]).mgf(1.0) == pytest.approx(0.25, rel=1e-15)
    assert TWO.mgf(1e-12) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(DomainError):
        exponential().mgf(-1.0)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_mgf_vs_quadrature(s):
    for mg in (TWO, bx_to_mg(BeaulieuXieChannel(1.5, 1.0), 10)):
        ref, _ = integrate.quad(lambda g: math.exp(-s * g) * mg.pdf(g), 0, np.inf, epsabs=0, epsrel=1e-12)
        assert mg.mgf(s) == pytest.approx(ref, rel=1e-7)


@given(mixtures, st.floats(0.0, 5.0), st.floats(0.01, 5.0))
def test_mgf_decreasing(mg, s, ds):
    assert mg.mgf(s + ds) < mg.mgf(s)


def test_mellin_examples():
    assert exponential().mellin(2.0) == pytest.approx(1.0, rel=1e-15)
    assert TWO.mellin(1.0) == pytest.approx(1.0, rel=1e-15)
    # Gamma(2, rate 2): E[g^2] = Gamma(4) / Gamma(2) / 4
    assert normalize([(1, 2, 2)]).mellin(3.0) == pytest.approx(1.5, rel=1e-14)
    with pytest.raises(DomainError):
        exponential().mellin(-0.5)
    with pytest.raises(PoleError):
        exponential().mellin(-1.0)


@pytest.mark.parametrize("n", [1.0, 1.5, 2.0, 3.0])
def test_mellin_vs_quadrature(n):
    mg = bx_to_mg(BeaulieuXieChannel(2, 0.5), 15)
    ref, _ = integrate.quad(lambda g: g ** (n - 1) * mg.pdf(g), 0, np.inf, epsabs=0, epsrel=1e-12)
    assert mg.mellin(n) == pytest.approx(ref, rel=1e-7)


def test_log_mellin_matches_mellin():
    mg = bx_to_mg(BeaulieuXieChannel(2, 1.5, 3.0), 12)
    for n in (0.3, 1.0, 2.5, 7.0):
        assert np.exp(mg.log_mellin(np.array([n + 0j])))[0].real == pytest.approx(mg.mellin(n), rel=1e-12)
    for n in (0.3, 1.0, 2.5):
        assert np.exp(mg.log_mellin_reflected(np.array([n + 0j])))[0].real == pytest.approx(
            mg.mellin(2 - n), rel=1e-12)


@given(mixtures, st.floats(0.05, 50))
def test_scaled(mg, c):
    sc = mg.scaled(c)
    assert abs(_mass(sc) - 1) <= 1e-9
    assert sc.mean == pytest.approx(c * mg.mean, rel=1e-12)
    assert sc.cdf(c * 1.3) == pytest.approx(mg.cdf(1.3), rel=1e-12, abs=1e-15)
    assert mg.with_mean(7.0).mean == pytest.approx(7.0, rel=1e-12)


def test_sample_exponential():
    x = exponential().sample(10 ** 6, 2024)
    assert x.mean() == pytest.approx(1.0, abs=0.005)
    assert np.mean(x <= 1.0) == pytest.approx(1 - math.exp(-1), abs=0.002)
    assert ecdf_sup_distance(x, exponential().cdf, np.linspace(0, 8, 401)) < 5e-3


def test_sample_deterministic():
    a = TWO.sample(1000, 5)
    b = TWO.sample(1000, 5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, TWO.sample(1000, 6))
    with pytest.raises(DomainError):
        TWO.sample(0, 1)


@pytest.mark.parametrize("count", [2000, 50000])
def test_sample_dkw_band(count):
    x = TWO.sample(count, 99)
    pts = np.sort(x)
    assert ecdf_sup_distance(x, TWO.cdf, pts) < 1.95 / math.sqrt(count)


def test_sample_fractional_shape():
    mg = bx_to_mg(BeaulieuXieChannel(0.5, 0.0), 1)
    x = mg.sample(200000, 3)
    assert ecdf_sup_distance(x, mg.cdf, np.geomspace(1e-4, 10, 200)) < 5e-3


def test_text_round_trip():
    mg = bx_to_mg(BeaulieuXieChannel(2, 0.5), 15, label="bx1")
    text = mg.to_text()
    assert text.splitlines()[0] == "mg bx1 15"
    back = MixtureGamma.from_text(text)
    assert back == mg and back.label == "bx1"
    with pytest.raises(DomainError):
        MixtureGamma.from_text("mg x 2\n1 1 1\n")
    with pytest.raises(DomainError):
        MixtureGamma.from_text("nonsense")


def test_immutable():
    with pytest.raises(AttributeError):
        TWO.label = "other"


def test_mse_between():
    g = default_grid(1.0)
    assert g.size == 2000 and g[-1] == 5.0 and g[0] > 0
    assert mse_between(TWO.pdf, TWO.pdf, g) == 0.0
    gamma2 = MixtureGamma([(1, 2, 1)])
    assert mse_between(exponential().pdf, gamma2.pdf, [1.0]) == pytest.approx(0.0, abs=1e-30)
    with pytest.raises(DomainError):
        mse_between(TWO.pdf, TWO.pdf, [])


def test_mse_bx_fit():
    ch = BeaulieuXieChannel(2, 0.5)
    g = default_grid(ch.gbar)
    assert mse_between(lambda x: bx_exact_pdf(ch, x), bx_to_mg(ch, 15).pdf, g) <= 1e-5
