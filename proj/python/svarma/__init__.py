"""Structural VARMA models with non-Gaussian independent shocks.

Models are plain dicts in the same layout the ``svarma`` command-line tool
reads from its config files::

    model = {
        "n": 2, "p": 1, "q": 1,
        "densities": [{"family": "laplace"}, {"family": "student_t", "lambda": [6.0]}],
        "theta": {"pi2": [...], "pi3": [...], "B": [[1.0, 0.3], [-0.2, 1.0]], "sigma": [1.0, 0.5]},
    }

Data are ``(T, n)`` float arrays with one row per period.
"""

from __future__ import annotations

import functools
import json
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from . import _svarma

__all__ = [
    "SvarmaError",
    "simulate",
    "validate",
    "loglik",
    "score",
    "structural_shocks",
    "fit",
    "select_order",
    "irf",
    "diagnostics",
    "normalize",
    "model_from_estimate",
]

_MATRIX_KEYS = {"B", "B_scheme", "cov_opg", "cov_hessian", "lower", "upper", "sd_B"}
_VECTOR_KEYS = {"sigma", "sigma_scheme", "se_opg", "se_hessian", "sd_sigma", "pi2", "pi3", "beta", "lambda"}


class SvarmaError(ValueError):
    """Error raised by the compiled core; ``kind`` names the failure class."""

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message


def _translate(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _svarma.SvarmaError as exc:
            kind, _, message = str(exc).partition(": ")
            raise SvarmaError(kind, message) from None

    return wrapper


def _dump(obj: Optional[Mapping[str, Any]]) -> str:
    return "" if obj is None else json.dumps(obj)


def _data(y: Any) -> np.ndarray:
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise SvarmaError("invalid_argument", "data must be a (T, n) array")
    return np.ascontiguousarray(arr)


def _arrays(node: Any, key: Optional[str] = None) -> Any:
    # Known matrix/vector fields become arrays; horizon lists of matrices become 3-d arrays.
    if isinstance(node, dict):
        return {k: _arrays(v, k) for k, v in node.items()}
    if isinstance(node, list):
        if key in _MATRIX_KEYS or key in _VECTOR_KEYS or key in {"phi", "fevd"}:
            try:
                return np.array(node, dtype=np.float64)
            except (TypeError, ValueError):
                pass
        return [_arrays(v) for v in node]
    return node


@_translate
def simulate(model: Mapping[str, Any], T: int, seed: int = 0, burnin: int = 500) -> np.ndarray:
    """Simulate a ``(T, n)`` panel; ``burnin`` leading periods are discarded."""
    return _svarma.simulate(_dump(model), int(T), int(seed), int(burnin))


@_translate
def validate(model: Mapping[str, Any]) -> list[tuple[str, str]]:
    """Parameter-space violations as ``(code, message)`` pairs; empty if admissible."""
    return _svarma.validate(_dump(model))


@_translate
def loglik(model: Mapping[str, Any], y: Any) -> float:
    """Conditional log-likelihood averaged over periods."""
    return _svarma.loglik(_dump(model), _data(y))


@_translate
def score(model: Mapping[str, Any], y: Any) -> np.ndarray:
    """Analytic gradient of :func:`loglik` in the packed parameter order."""
    return _svarma.score(_dump(model), _data(y))


@_translate
def structural_shocks(model: Mapping[str, Any], y: Any) -> tuple[np.ndarray, np.ndarray]:
    """Recovered shocks ``eps`` and their standardized version ``eps / sigma``."""
    return _svarma.structural_shocks(_dump(model), _data(y))


@_translate
def fit(
    y: Any,
    model: Mapping[str, Any],
    options: Optional[Mapping[str, Any]] = None,
    start_from_theta: bool = False,
) -> dict[str, Any]:
    """Conditional maximum likelihood fit.

    ``model`` needs ``n``, ``p``, ``q`` and ``densities``. With
    ``start_from_theta`` its ``theta`` is the starting point instead of the
    two-stage regression estimate. Non-convergence is reported in the result.
    """
    return _arrays(json.loads(_svarma.fit(_data(y), _dump(model), _dump(options), bool(start_from_theta))))


@_translate
def select_order(
    y: Any,
    model: Mapping[str, Any],
    p_max: int = 2,
    q_max: int = 2,
    options: Optional[Mapping[str, Any]] = None,
    threads: int = 1,
) -> dict[str, Any]:
    """AIC over the (p, q) grid; ``model`` supplies ``n`` and the densities."""
    return json.loads(_svarma.select_order(_data(y), _dump(model), int(p_max), int(q_max), _dump(options), int(threads)))


@_translate
def irf(
    model: Mapping[str, Any],
    horizon: int = 20,
    shock_size: str = "one-sd",
    bootstrap: int = 0,
    y: Any = None,
    level: float = 0.95,
    seed: int = 0,
    threads: int = 1,
    options: Optional[Mapping[str, Any]] = None,
) -> dict[str, Any]:
    """Impulse responses ``phi[h, response, shock]`` and variance decompositions.

    With ``bootstrap > 0`` percentile bands come from a residual bootstrap on ``y``.
    """
    data = None if y is None else _data(y)
    out = _svarma.irf(_dump(model), int(horizon), shock_size, int(bootstrap), data, float(level), int(seed),
                      int(threads), _dump(options))
    return _arrays(json.loads(out))


@_translate
def diagnostics(residuals: Any, lags: int = 10) -> dict[str, Any]:
    """Ljung-Box, McLeod-Li and Jarque-Bera tests for each residual column."""
    return json.loads(_svarma.diagnostics(_data(residuals), int(lags)))


@_translate
def normalize(B: Any, sigma: Sequence[float], scheme: str = "A") -> tuple[np.ndarray, np.ndarray, list[int], np.ndarray]:
    """Canonical representative ``B* = B P D`` with matching scales and the permutation used."""
    return _svarma.normalize(np.asarray(B, dtype=np.float64), np.asarray(sigma, dtype=np.float64), scheme)


def model_from_estimate(estimate: Mapping[str, Any]) -> dict[str, Any]:
    """The fitted model dict from a :func:`fit` result, ready for :func:`irf` and friends."""

    def plain(node: Any) -> Any:
        if isinstance(node, np.ndarray):
            return node.tolist()
        if isinstance(node, dict):
            return {k: plain(v) for k, v in node.items()}
        if isinstance(node, list):
            return [plain(v) for v in node]
        return node

    return plain(estimate["model"])
