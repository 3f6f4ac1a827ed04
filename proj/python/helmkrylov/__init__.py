"""GMRES experiments on finite element Helmholtz problems.

Configurations are the JSON documents read by the ``helmkrylov`` command-line
runner. Every function taking ``config`` accepts a dict, a JSON string, a path
to a JSON file or the name of a built-in default ("cavity" or "scatter").
"""

import json
import os

import numpy as np

from . import _core
from ._core import ConfigError, HelmkrylovError

__all__ = [
    "ConfigError",
    "HelmkrylovError",
    "assemble",
    "default_config",
    "detect_plateaus",
    "diagnose",
    "gmres",
    "harmonic_ritz",
    "points_per_wavelength",
    "quasimodes",
    "solve",
    "sweep",
]


def _config_text(config, **overrides):
    if isinstance(config, dict):
        cfg = dict(config)
    elif config in ("cavity", "scatter"):
        cfg = json.loads(_core.default_config(config))
    elif isinstance(config, (str, os.PathLike)) and os.path.isfile(config):
        with open(config) as f:
            cfg = json.load(f)
    elif isinstance(config, str):
        cfg = json.loads(config)
    else:
        raise TypeError(f"unsupported config: {config!r}")
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return _core.normalize_config(json.dumps(cfg))


def default_config(benchmark="cavity"):
    return json.loads(_core.default_config(benchmark))


def points_per_wavelength(config="cavity", k=None):
    return _core.points_per_wavelength(_config_text(config, k=k))


def _to_scipy(parts):
    import scipy.sparse as sp

    data, indices, indptr, shape = parts
    return sp.csr_matrix((np.asarray(data), np.asarray(indices), np.asarray(indptr)), shape=shape)


def assemble(config="cavity", k=None):
    """System matrices at wavenumber k as scipy CSR matrices."""
    cfg = json.loads(_config_text(config, k=k))
    if cfg.get("k") is None:
        raise ConfigError("no wavenumber: set 'k'")
    out = _core.assemble(json.dumps(cfg), float(cfg["k"]))
    for name in ("A", "K", "M", "B"):
        out[name] = _to_scipy(out[name])
    return out


def solve(config="cavity", k=None, method="none"):
    cfg = json.loads(_config_text(config, k=k))
    if cfg.get("k") is None:
        raise ConfigError("no wavenumber: set 'k'")
    out = _core.solve(json.dumps(cfg), float(cfg["k"]), method)
    out["residuals"] = np.asarray(out["residuals"])
    return out


def sweep(config="cavity", out_dir=""):
    return _core.sweep(_config_text(config), os.fspath(out_dir))


def diagnose(config="cavity", k=None, out_dir=""):
    out = _core.diagnose(_config_text(config, k=k), os.fspath(out_dir))
    out["residuals"] = np.asarray(out["residuals"])
    return out


def gmres(a, b, tol=1e-6, restart=None, max_iter=2000):
    """Unpreconditioned GMRES(restart) on a sparse or dense square matrix.

    Returns (x, relative residual history, converged).
    """
    import scipy.sparse as sp

    a = sp.csr_matrix(a, dtype=complex)
    a.sort_indices()
    x, res, converged = _core.gmres(
        a.shape[0],
        a.indptr.astype(np.int64),
        a.indices.astype(np.int64),
        a.data,
        np.asarray(b, dtype=complex),
        tol,
        restart,
        max_iter,
    )
    return x, np.asarray(res), converged


def harmonic_ritz(hbar):
    """Harmonic Ritz values of an (l+1) x l Hessenberg matrix, by modulus."""
    return _core.harmonic_ritz(np.asarray(hbar, dtype=complex))


def detect_plateaus(residuals):
    return _core.detect_plateaus([float(r) for r in residuals])


def quasimodes(config="cavity", k_max=30.0):
    rows = _core.quasimodes(_config_text(config), k_max)
    return [dict(zip(("family", "n", "m", "k"), r)) for r in rows]
