import math

import pytest

qldev = pytest.importorskip("qldev")


def test_equatorial_metrics_match_closed_forms():
    r, theta = 0.6, 0.4
    rho = qldev.equatorial_state(r, theta)
    h = 1e-6
    drho = (qldev.equatorial_state(r, theta + h) - qldev.equatorial_state(r, theta - h)) / (2 * h)
    j, _ = qldev.sld_fisher(rho, drho)
    assert abs(j - r * r) < 1e-6
    jt, _ = qldev.kmb_fisher(rho, drho)
    assert abs(jt - (r / 2) * math.log((1 + r) / (1 - r))) < 1e-6


def test_relative_entropy_closed_form():
    r = 0.5
    rho = qldev.equatorial_state(r, 0.7)
    sigma = qldev.equatorial_state(r, 0.0)
    d = qldev.relative_entropy(rho, sigma)
    expect = (r / 2) * (1 - math.cos(0.7)) * math.log(3.0)
    assert abs(d - expect) < 1e-10
    assert qldev.fidelity(rho, rho) == pytest.approx(1.0)


def test_sandwich_bounds():
    d = qldev.relative_entropy(
        qldev.equatorial_state(0.5, 0.9), qldev.equatorial_state(0.5, 0.2)
    )
    for m in (1, 2, 3):
        v = qldev.sandwich_kl(0.5, 0.9, 0.2, m)
        assert m * d - math.log(m + 1) - 1e-9 <= v <= m * d + 1e-9


def test_simulate_number_measurement_exact():
    rows = qldev.simulate_tail(
        "gaussian-number", nbar=1.0, theta_true=0.0,
        n_grid=[100, 200], eps_list=[0.5], trials=1000,
    )
    assert len(rows) == 2
    for row in rows:
        assert row["exact"]
        assert row["p_hat"] == pytest.approx(0.5 ** math.ceil(row["n"] * 0.25))


def test_capacity_error_surfaces():
    with pytest.raises(Exception) as exc:
        qldev.displaced_thermal(1.0, 1.0, 4)
    assert "CapacityError" in type(exc.value).__name__ or "capacity" in str(exc.value)


def test_cramer_rate_bernoulli():
    rate = qldev.cramer_rate([0.6, 0.4], 0.6)
    expect = 0.6 * math.log(0.6 / 0.4) + 0.4 * math.log(0.4 / 0.6)
    assert rate == pytest.approx(expect, abs=1e-10)
