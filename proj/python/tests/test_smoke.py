import numpy as np
import pytest

import sparsegpt


def test_prune_half_sparsity():
    w, x = sparsegpt.generate_instance(32, seed=3)
    res = sparsegpt.prune(w, x, sparsity=0.5, block=8, mask_block=4)
    assert res["weights"].shape == (32, 32)
    assert (res["mask"].sum(axis=0) == 16).all()
    assert (res["weights"][~res["mask"]] == 0.0).all()
    assert res["flops"]["inner"]["mul"] == 32 * 32 * 9 // 2
    assert res["flops"]["outer"]["mul"] == 32 * 32 * 24 // 2


def test_lazy_matches_eager():
    w, x = sparsegpt.generate_instance(16, seed=1)
    lazy = sparsegpt.prune(w, x, 0.5, 4, 2, lam=1.0)
    eager = sparsegpt.prune(w, x, 0.5, 4, 2, lam=1.0, lazy=False)
    assert (lazy["mask"] == eager["mask"]).all()
    assert np.abs(lazy["weights"] - eager["weights"]).max() <= 1e-9


def test_sparsity_zero_is_identity():
    w, x = sparsegpt.generate_instance(12, seed=0)
    res = sparsegpt.prune(w, x, 0.0, 3, 3)
    assert np.array_equal(res["weights"], w)


def test_inverse_hessian_against_numpy():
    _, x = sparsegpt.generate_instance(10, seed=4)
    h, lam = sparsegpt.inverse_hessian(x, lam=0.5)
    assert lam == 0.5
    expected = np.linalg.inv(x @ x.T + 0.5 * np.eye(10))
    assert np.abs(h - expected).max() <= 1e-9


def test_matmul_backends():
    a = np.arange(12, dtype=float).reshape(3, 4)
    b = np.arange(8, dtype=float).reshape(4, 2)
    c, counts = sparsegpt.matmul(a, b)
    assert np.array_equal(c, a @ b)
    assert counts["mul"] == 24
    s, scounts = sparsegpt.matmul(np.eye(2), np.eye(2), backend="strassen", threshold=1)
    assert np.array_equal(s, np.eye(2))
    assert scounts["mul"] == 7


def test_cost_model():
    curve = sparsegpt.OmegaCurve.default()
    assert curve(1.0) == pytest.approx(2.371)
    a, total = sparsegpt.optimize_block_exponent(curve.with_anchor(0.5275, 2.0575))
    assert abs(a - 0.5275) <= 0.005
    assert abs(total - 2.53) <= 0.005
    assert sparsegpt.cost_report(sparsegpt.OmegaCurve.classical(), 0.3)["total"] == 3.0
    assert sparsegpt.predicted_flops(8, 4)["inner"]["mul"] == 160


def test_errors_map_to_exceptions():
    w, x = sparsegpt.generate_instance(8, seed=0)
    with pytest.raises(sparsegpt.ConfigError, match="mask block must divide block"):
        sparsegpt.prune(w, x, 0.5, 7, 3)
    with pytest.raises(sparsegpt.ShapeError):
        sparsegpt.prune(w[:, :7], x, 0.5, 1, 1)
    with pytest.raises(sparsegpt.DomainError):
        sparsegpt.OmegaCurve([(0.0, 2.0), (0.5, 2.1)])
    assert issubclass(sparsegpt.ConfigError, sparsegpt.Error)
