import numpy as np
import pytest

try:
    import _core as core
except ImportError:  # installed-package layout
    from alphacomb import _core as core


def test_combine_normalization_and_determinism():
    d = core.gen_synthetic(300, 30, 2, seed=5)
    out = core.combine(d["returns"], d["expected"])
    w = np.asarray(out["weights"])
    assert w.shape == (300,)
    assert abs(np.abs(w).sum() - 1.0) < 1e-12
    assert out["eta"] > 0
    out2 = core.combine(d["returns"], d["expected"])
    assert np.array_equal(w, np.asarray(out2["weights"]))


def test_combine_keep_overall_mode_differs():
    d = core.gen_synthetic(200, 25, 1, seed=9)
    on = np.asarray(core.combine(d["returns"], d["expected"])["weights"])
    off = np.asarray(
        core.combine(d["returns"], d["expected"], remove_overall_mode=False)["weights"]
    )
    assert not np.allclose(on, off)


def test_exact_factor_weights_match_dense_oracle():
    d = core.gen_synthetic(400, 40, 3, seed=11)
    fast = np.asarray(
        core.exact_factor_weights(d["expected"], d["xi"], d["omega"], d["phi"])
    )
    gamma = np.diag(np.asarray(d["xi"]) ** 2) + d["omega"] @ d["phi"] @ d["omega"].T
    raw = np.linalg.solve(gamma, np.asarray(d["expected"]))
    dense = raw / np.abs(raw).sum()
    assert np.max(np.abs(fast - dense)) / np.max(np.abs(dense)) < 1e-10


def test_one_factor_matches_dense():
    n, rho = 60, 0.3
    rng = np.random.default_rng(3)
    sigma = np.exp(0.2 * rng.standard_normal(n))
    e = np.exp(0.2 * rng.standard_normal(n))
    cov = np.outer(sigma, sigma) * (rho + (1 - rho) * np.eye(n))
    closed = np.asarray(core.one_factor_weights(e, sigma, rho))
    dense = np.asarray(core.dense_oracle_weights(cov, e))
    assert np.max(np.abs(closed - dense)) < 1e-12


def test_benchmark_weights_trivial():
    w = np.asarray(core.benchmark_weights(np.array([1.0, 2.0, 3.0]), np.ones(3)))
    assert np.allclose(w, np.array([1, 2, 3]) / 6.0, atol=1e-15)


def test_correlation_pcs_orthonormal():
    d = core.gen_synthetic(150, 20, 2, seed=21)
    pcs = core.correlation_pcs(d["returns"])
    v = np.asarray(pcs["components"])
    lam = np.asarray(pcs["eigenvalues"])
    assert np.all(np.diff(lam) <= 1e-12)
    assert np.max(np.abs(v.T @ v - np.eye(v.shape[1]))) < 1e-9
    assert abs(lam.sum() - 150.0) / 150.0 < 1e-6


def test_validation_errors_surface_as_python_exceptions():
    returns = np.zeros((4, 5))  # constant rows
    with pytest.raises(core.ValidationError):
        core.combine(returns, np.ones(4))
    d = core.gen_synthetic(10, 6, 0, seed=1)
    with pytest.raises(core.ValidationError):
        core.combine(d["returns"], np.zeros(10))  # degenerate expected returns
