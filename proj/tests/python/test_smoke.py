import math

import pytest

import csflab


def test_version():
    assert isinstance(csflab.__version__, str)
    assert csflab.__version__.count(".") == 2


def test_entropy_round_trip():
    assert csflab.binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)
    assert csflab.inv_binary_entropy(csflab.binary_entropy(0.11)) == pytest.approx(0.11, abs=1e-12)


def test_special_functions():
    assert csflab.expint_e1(1.0) == pytest.approx(0.21938393439552029, rel=1e-12)
    assert csflab.bessel_i0(1.0) == pytest.approx(1.2660658777520082, rel=1e-12)


def test_two_state():
    eps0, eps1 = csflab.solve_crossover(0.3, 0.3, 3.0, 0.0, 0.2)
    assert 0.0 < eps0 < 1.0
    assert 0.3 * (1 - eps0) + 0.7 * eps1 == pytest.approx(0.3, abs=1e-12)
    vq = csflab.vq_forward_rate(0.3, 0.3, 3.0, 0.0, 0.2)
    assert vq == pytest.approx(0.3 * (1 - eps0) * 3.0, rel=1e-12)
    assert vq >= csflab.lsc_forward_rate(0.3, 0.3, 3.0, 0.0, 0.2)
    assert csflab.max_useful_feedback(0.3, 0.3) == pytest.approx(csflab.binary_entropy(0.3), abs=1e-12)
    lower, upper = csflab.markov_vq_bounds(0.09 / 0.7, 0.3, 0.3, 3.0, 0.0, 0.3)
    assert lower <= upper


def test_rayleigh():
    assert csflab.ustar() == pytest.approx(3.9216, abs=1e-3)
    lsc = csflab.lsc_threshold_rate(500, 100.0, 200.0)
    assert isinstance(lsc, dict)
    assert 0.0 < lsc["forward_rate"] < 1.0
    delta01, delta10 = csflab.ar1_transition(0.0, 1.0)
    assert delta10 == pytest.approx(1.0 - math.exp(-1.0), abs=1e-6)


def test_simulation():
    rep = csflab.simulate_fixed(0.5, 0.5, 3.0, 0.0, 4, 6, 20000, seed=3, jobs=2)
    assert rep["mean_distortion"] >= 0.0
    d, words = csflab.exhaustive_codebook_oracle(6, 2, 2, 0.3)
    assert len(words) == 2
    assert d >= csflab.distortion_rate(0.3, 2 / 6, 1 / 6)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        csflab.vq_forward_rate(1.5, 0.3, 3.0, 0.0, 0.1)
    with pytest.raises(ValueError):
        csflab.waterfilling_reference(500, 100.0, 10)
    with pytest.raises(csflab.DomainError):
        csflab.binary_entropy(2.0)
