import csv
import math

import numpy as np
import pytest

import helmkrylov as hk


def small_cavity(**extra):
    cfg = hk.default_config("cavity")
    cfg["fem"] = {"cells": 8, "degree": 2}
    cfg["k"] = 7.0
    cfg.update(extra)
    return cfg


def test_default_configs_roundtrip():
    for name in ("cavity", "scatter"):
        cfg = hk.default_config(name)
        assert cfg["benchmark"] == name
        assert hk.default_config(name) == cfg


def test_bad_config_raises():
    cfg = small_cavity()
    cfg["fem"] = {"cells": 0, "degree": 2}
    with pytest.raises(hk.ConfigError):
        hk.assemble(cfg)
    with pytest.raises(ValueError):
        hk.default_config("drum")


def test_cavity_matrix_is_hermitian_and_shifted_stiffness():
    sys = hk.assemble(small_cavity())
    a = sys["A"]
    assert a.shape[0] == a.shape[1] == sys["b"].shape[0]
    assert abs(a - a.getH()).max() < 1e-12
    if sys["K"].shape == a.shape:
        assert abs(a - (sys["K"] - 49.0 * sys["M"])).max() < 1e-10


def test_solve_matches_series_reference():
    out = hk.solve(small_cavity(reference="series"))
    assert out["converged"]
    assert out["relres"] <= 1e-6
    assert out["l2_error"] < 5e-2
    assert out["residuals"][0] == pytest.approx(1.0)
    assert np.all(np.diff(out["residuals"]) <= 1e-12)


def test_csl_needs_fewer_iterations():
    cfg = small_cavity()
    plain = hk.solve(cfg, method="none")
    csl = hk.solve(cfg, method="csl")
    assert csl["converged"]
    assert csl["iterations"] < plain["iterations"]


def test_gmres_against_numpy():
    rng = np.random.default_rng(3)
    a = np.diag(np.linspace(1.0, 3.0, 30)) + 0.05 * rng.standard_normal((30, 30))
    b = rng.standard_normal(30) + 0j
    x, res, converged = hk.gmres(a, b, tol=1e-10)
    assert converged
    assert np.linalg.norm(x - np.linalg.solve(a, b)) < 1e-8 * np.linalg.norm(x)
    assert res[-1] <= 1e-10


def arnoldi(a, b, l):
    n = a.shape[0]
    v = np.zeros((n, l + 1), dtype=complex)
    h = np.zeros((l + 1, l), dtype=complex)
    v[:, 0] = b / np.linalg.norm(b)
    for j in range(l):
        w = a @ v[:, j]
        for i in range(j + 1):
            h[i, j] = np.vdot(v[:, i], w)
            w = w - h[i, j] * v[:, i]
        h[j + 1, j] = np.linalg.norm(w)
        v[:, j + 1] = w / h[j + 1, j]
    return h


def test_harmonic_ritz_values():
    rng = np.random.default_rng(5)
    lam = np.array([-2.0, -0.5, 0.3, 1.0, 1.7, 2.5])
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    a = q @ np.diag(lam) @ q.T
    b = rng.standard_normal(6)
    # at l = n - 1 the values are the roots of the GMRES polynomial, and the
    # smallest one in modulus is bounded below by s_min = 0.3
    nu = hk.harmonic_ritz(arnoldi(a, b, 5))
    assert len(nu) == 5
    assert np.all(np.diff(np.abs(nu)) >= 0)
    assert np.abs(nu).min() >= 0.3 * (1 - 1e-10)
    # Hessenberg of a 1-step Krylov space: nu = (h11^2 + h21^2) / h11
    h = np.array([[2.0], [1.0]])
    assert hk.harmonic_ritz(h)[0] == pytest.approx(2.5)


def test_detect_plateaus_on_synthetic_history():
    res = [10.0 ** (-0.05 * i) for i in range(40)]
    res += [res[-1] * (1 - 1e-4 * i) for i in range(1, 61)]
    res += [res[-1] * 10.0 ** (-0.05 * i) for i in range(1, 40)]
    plateaus = hk.detect_plateaus(res)
    assert len(plateaus) == 1
    p = plateaus[0]
    assert 35 <= p["start"] <= 45 and 90 <= p["end"] <= 105
    assert p["dropped"]


def test_cavity_resonances():
    ks = [row["k"] for row in hk.quasimodes("cavity", k_max=14.0)]
    assert any(abs(k - math.pi * math.sqrt(17)) < 1e-12 for k in ks)
    assert any(abs(k - 3 * math.sqrt(2) * math.pi) < 1e-12 for k in ks)


def test_sweep_writes_summary(tmp_path):
    cfg = small_cavity()
    del cfg["k"]
    cfg["sweep"] = {"k_min": 6.0, "k_max": 6.2, "step": 0.1}
    cfg["accel"] = {"methods": ["none"]}
    rows = hk.sweep(cfg, tmp_path)
    assert [r["k"] for r in rows] == pytest.approx([6.0, 6.1, 6.2])
    with open(tmp_path / "summary.csv") as f:
        table = list(csv.DictReader(f))
    assert len(table) == 3
    assert all(int(r["iterations"]) == row["iterations"] for r, row in zip(table, rows))
    for r in table:
        assert (tmp_path / r["trace_file"]).exists()
