import math
import os
from pathlib import Path

import numpy as np
import pytest

import comonotone_mc as cm

CONFIG_DIR = Path(os.environ.get("COMONOTONE_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))


def test_grid_and_interpolation():
    g = cm.TimeGrid(1.0, 4)
    assert g.points() == [0.0, 0.25, 0.5, 0.75, 1.0]
    p = cm.Path(g, [0.0, 1.0, 0.0, 1.0, 2.0])
    assert cm.linear_interpolate(p, 0.125) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        cm.linear_interpolate(p, 1.5)


def test_samples_are_reproducible():
    bm = cm.brownian_motion(cm.TimeGrid(1.0, 8))
    a, b = bm.sample(3, 7), bm.sample(3, 7)
    assert a.values == b.values
    assert a.values[0] == 0.0
    assert bm.sample(3, 8).values != a.values


def test_fbm_covariance_reduces_to_bm():
    assert cm.fbm_covariance(0.3, 0.7, 0.5) == pytest.approx(0.3, abs=1e-15)


def test_terminal_and_max_comonotone():
    bm = cm.brownian_motion(cm.TimeGrid(1.0, 32))
    r = cm.estimate_cov(bm, cm.terminal(), cm.running_max(), n_paths=5000, seed=1)
    assert r["predicted"] == ">=0"
    assert r["verdict"] != "violation"


def test_horn_matrix():
    h = cm.horn_matrix()
    assert np.allclose(h, h.T)
    assert cm.pitt_check(h)
    assert np.linalg.matrix_rank(h, tol=1e-10) == 4
    found, factor, residual = cm.nonneg_factorization(h, 5, restarts=2, max_iter=2000)
    assert not found and residual > 0.1 and factor.min() >= 0


def test_vega_identity():
    r = cm.scalar_vega_identity(cm.ConvexTestFn.call_part(1.0), 0.2, n_paths=20000, seed=4)
    assert abs(r["finite_difference"] - r["cameron_martin"]) <= 4 * r["pooled_stderr"]
    sigma = 0.2
    assert cm.black_scholes_vega(1.0, sigma) == pytest.approx(math.exp(-sigma**2 / 8) / math.sqrt(2 * math.pi))


def test_run_config_and_errors():
    text = (CONFIG_DIR / "negative_control.json").read_text()
    out = cm.run_config(text, paths=2000, workers=1)
    assert out["report_csv"].startswith("name,mean,stderr,n,predicted,verdict")
    assert out["violations"] == 1
    with pytest.raises(cm.ConfigError):
        cm.run_config('{"kind":"teleport","seed":1}')
    assert "brownian_motion" in cm.list_registry()
