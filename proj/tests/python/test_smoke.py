import numpy as np
import pytest

import densfda


def unit_grid(m=256):
    return np.linspace(0.0, 1.0, m)


def test_lqd_round_trip():
    x = unit_grid()
    f = densfda.normalize(1.0 + 0.5 * np.sin(2 * np.pi * x), floor=0.0)
    t, lqd = densfda.forward(f)
    assert t[0] == 0.0 and t[-1] == 1.0
    back = densfda.inverse(lqd, floor=0.0)
    assert np.max(np.abs(back - f)) < 1e-3


def test_uniform_has_zero_lqd():
    _, lqd = densfda.forward(np.ones(128))
    assert np.allclose(lqd, 0.0, atol=1e-12)


def test_wasserstein_mean_of_shifts():
    x = np.linspace(-5.0, 5.0, 801)
    rows = np.array([np.exp(-0.5 * ((x - c) / 0.7) ** 2) for c in (-1.0, 0.0, 1.0)])
    m = densfda.frechet_mean(rows, lo=-5.0, hi=5.0, floor=0.0)
    target = densfda.normalize(rows[1], lo=-5.0, hi=5.0, floor=0.0)
    assert densfda.dist_wasserstein(m, target, lo=-5.0, hi=5.0) < 1e-3


def test_estimate_density_has_unit_mass():
    rng = np.random.default_rng(3)
    f = densfda.estimate_density(rng.uniform(size=500), 0.0, 1.0, grid_points=200, kernel="epanechnikov")
    assert abs(np.trapezoid(f, unit_grid(200)) - 1.0) < 1e-10


def test_fve_and_represent():
    x = unit_grid()
    rows = np.array([densfda.inverse(c * np.sqrt(2) * np.cos(np.pi * x)) for c in (-0.4, -0.1, 0.2, 0.5)])
    report = densfda.fve(rows, method="lqd", k_max=2)
    assert report["selected_k"] == 1
    assert report["fve"][0] > 0.999
    rep = densfda.represent(rows, 1, method="lqd")
    assert rep.shape == rows.shape
    assert np.max(np.abs(rep - rows)) < 1e-2


def test_simulate_returns_dict():
    r = densfda.simulate(2, n=10, reps=1, K=1)
    assert set(r["fve_summary"]) == {"lqd", "fpca", "hs"}


def test_errors_carry_codes():
    with pytest.raises(densfda.Error) as e:
        densfda.normalize(np.zeros(10))
    assert e.value.code == "AllZero"
    with pytest.raises(ValueError):
        densfda.forward(np.ones(10), kind="nope")
