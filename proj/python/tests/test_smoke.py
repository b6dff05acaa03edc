import math
import random

import pytest

import vgtree

TABLE1 = vgtree.VgParams(theta=-0.1, sigma=0.2, kappa=0.2, r=0.06)


def test_martingale_correction():
    assert vgtree.martingale_correction(TABLE1) == pytest.approx(5 * math.log(1.016), rel=1e-14)
    phi = vgtree.characteristic_function(TABLE1, -1j, 1.0)
    assert phi.real == pytest.approx(1.016 ** -5, rel=1e-13)


def test_lattice_table_values():
    eu = vgtree.price_lattice(36, 40, 1, "put", "european", TABLE1, steps=2000)
    assert eu["price"] == pytest.approx(3.7837, abs=1e-4)
    assert len(eu["probabilities"]) == 5
    am = vgtree.price_lattice(40, 40, 2, "put", "american", TABLE1)
    assert am["price"] == pytest.approx(2.9997, abs=1e-4)


def test_quadrature_and_fd():
    quad = vgtree.price_quadrature(40, 40, 1, "put", TABLE1)
    assert quad == pytest.approx(2.0719, abs=1e-4)
    call = vgtree.price_quadrature(40, 40, 1, "call", TABLE1)
    assert call - quad == pytest.approx(40 - 40 * math.exp(-0.06), abs=1e-6)
    fd = vgtree.price_fd(40, 40, 1, "put", "european", TABLE1, steps=1000)
    assert abs(fd["price"] - quad) < 0.05
    assert fd["all_nonnegative"] is False


def test_black_scholes_and_crr():
    bs = vgtree.black_scholes(36, 40, 1, "put", 0.2, 0.06)
    assert bs == pytest.approx(3.8443, abs=5e-4)
    assert vgtree.binomial_bs(36, 40, 1, "put", "european", 0.2, 0.06) == pytest.approx(bs, abs=5e-4)


def test_errors_map_to_python_exceptions():
    with pytest.raises(vgtree.DomainError):
        vgtree.VgParams(0.0, -0.2, 0.2).validate()
    with pytest.raises(ValueError):
        vgtree.price_lattice(40, 40, 1, "put", "bermudan", TABLE1)
    with pytest.raises(vgtree.NegativeProbabilityError):
        vgtree.transition_probabilities(vgtree.VgParams(-0.5, 0.1, 0.5, 0.0), 1e-6)
    with pytest.raises(vgtree.NumericalError):
        vgtree.price_fd(40, 40, 1, "put", "european", TABLE1, steps=5, h=0.01)


def test_fit_round_trip_and_fallback():
    rng = random.Random(1)
    xs = []
    for _ in range(20000):
        g = rng.gammavariate(5.0, 0.2)
        xs.append(0.2 * math.sqrt(g) * rng.gauss(0.0, 1.0))
    fit = vgtree.fit(xs)
    assert fit["vg"]["kappa"] == pytest.approx(0.2, rel=0.25)
    flat = vgtree.fit([rng.uniform(-1, 1) for _ in range(1000)])
    assert flat["vg"] is None
    assert "kurtosis" in flat["fallback_reason"]


def test_p3_curve():
    rows = vgtree.p3_curve([0.5, 1.0, 2.0], 0.042 / 2000, 1 / 2000)
    assert rows[1][1] == pytest.approx(0.625)
    assert [r[1] for r in rows] == sorted(r[1] for r in rows)
