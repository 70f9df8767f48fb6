"""scikit-learn style wrappers.

``MeanValueEstimator`` is fitted on a multiplicative function and predicts
``S(n) ~ mean * n``; ``SummatoryOracle`` is fitted on a function and
transforms checkpoints into exact summatory values.  Both support
``get_params``/``set_params``/``clone``.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Mapping

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .exceptions import DomainError, SpecError
from .functions import MultiplicativeSpec, lookup, parse_spec
from .mean_value import (
    DEFAULT_EPS,
    DEFAULT_PRIME_LIMIT,
    DEFAULT_SPLIT,
    mean_value,
)
from .series import DEFAULT_ORDER
from .summatory import DEFAULT_BLOCK, summatory

METHOD_CHOICES = ("auto", "product", "accelerated", "strong", "paper_truncation")


class IndeterminateClass(DomainError):
    pass


def check_spec(spec: Any) -> MultiplicativeSpec:
    """Accept a spec, a builtin id, a decoded spec document or a path to one."""
    if isinstance(spec, MultiplicativeSpec):
        return spec
    if isinstance(spec, Mapping):
        return parse_spec(spec)
    if isinstance(spec, os.PathLike):
        return parse_spec(Path(spec).read_text())
    if isinstance(spec, str):
        if spec.lstrip().startswith("{"):
            return parse_spec(spec)
        return lookup(spec)
    raise SpecError(f"cannot interpret {type(spec).__name__} as a multiplicative function")


def check_positions(X, name: str = "X") -> np.ndarray:
    """1-d array of positive integers (a 2-d single column is flattened)."""
    arr = check_array(X, ensure_2d=False, dtype=None, input_name=name)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"{name} must be 1-d or a single column")
        arr = arr[:, 0]
    if not np.all(np.mod(arr, 1) == 0):
        raise ValueError(f"{name} must hold integers")
    arr = arr.astype(np.int64)
    if np.any(arr < 1):
        raise ValueError(f"{name} must be >= 1")
    return arr


def _check_int(value, name, low):
    if isinstance(value, bool) or int(value) != value or value < low:
        raise ValueError(f"{name} must be an integer >= {low}, got {value!r}")
    return int(value)


class MeanValueEstimator(BaseEstimator):
    """Asymptotic mean value of a bounded multiplicative function.

    Parameters
    ----------
    method : {"auto", "product", "accelerated", "strong", "paper_truncation"}
    prime_limit : int
        Largest prime in the truncated Euler product.
    series_order : int
        Highest power of ``1/p`` kept in the series tail.
    split_p0 : int
        Primes up to this bound use exact local factors.
    eps : float
        Truncation threshold of the prime-power sums.
    strict : bool
        Raise instead of returning a product value for unclassifiable inputs.

    Attributes
    ----------
    result_ : MeanValueResult
    mean_ : float
    c_constant_ : float or None
    spec_ : MultiplicativeSpec
    """

    def __init__(
        self,
        method: str = "auto",
        prime_limit: int = DEFAULT_PRIME_LIMIT,
        series_order: int = DEFAULT_ORDER,
        split_p0: int = DEFAULT_SPLIT,
        eps: float = DEFAULT_EPS,
        strict: bool = False,
    ):
        self.method = method
        self.prime_limit = prime_limit
        self.series_order = series_order
        self.split_p0 = split_p0
        self.eps = eps
        self.strict = strict

    def _validate_params(self):
        if self.method not in METHOD_CHOICES:
            raise ValueError(f"method must be one of {METHOD_CHOICES}")
        _check_int(self.prime_limit, "prime_limit", 2)
        _check_int(self.series_order, "series_order", 2)
        _check_int(self.split_p0, "split_p0", 1)
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    def fit(self, spec, y=None):
        self._validate_params()
        self.spec_ = check_spec(spec)
        self.result_ = mean_value(
            self.spec_,
            self.method,
            prime_limit=self.prime_limit,
            series_order=self.series_order,
            split_p0=self.split_p0,
            eps=self.eps,
        )
        if self.strict and self.result_.convergence_class == "indeterminate":
            raise IndeterminateClass(f"{self.spec_.name}: convergence class is indeterminate")
        self.mean_ = self.result_.value
        self.c_constant_ = self.result_.c_constant
        return self

    def predict(self, X):
        """Leading-order summatory values ``mean * n``."""
        check_is_fitted(self, "result_")
        return self.mean_ * check_positions(X).astype(float)

    def score(self, X, y):
        """Negative largest residual ``|y/n - mean|``; 0 is a perfect fit."""
        n = check_positions(X).astype(float)
        y = np.asarray(y, dtype=float).ravel()
        if y.shape != n.shape:
            raise ValueError("X and y must have the same length")
        check_is_fitted(self, "result_")
        return -float(np.max(np.abs(y / n - self.mean_)))


class SummatoryOracle(BaseEstimator):
    """Exact ``S(x)`` at arbitrary checkpoints via blocked sieving."""

    def __init__(self, block_size: int = DEFAULT_BLOCK, threads: int = 1):
        self.block_size = block_size
        self.threads = threads

    def fit(self, spec, y=None):
        _check_int(self.block_size, "block_size", 1)
        _check_int(self.threads, "threads", 1)
        self.spec_ = check_spec(spec)
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        x = check_positions(X)
        cps, inverse = np.unique(x, return_inverse=True)
        reports = summatory(
            self.spec_, int(cps[-1]), cps.tolist(), block_size=self.block_size, threads=self.threads
        )
        values = [r.S for r in reports]
        dtype = object if any(isinstance(v, int) for v in values) else float
        out = np.array(values, dtype=dtype)[inverse]
        return out.astype(np.int64) if dtype is object else out

    def reports(self, X):
        check_is_fitted(self, "spec_")
        x = np.unique(check_positions(X))
        return summatory(self.spec_, int(x[-1]), x.tolist(), block_size=self.block_size, threads=self.threads)


def spec_from_file(path: str | os.PathLike) -> MultiplicativeSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from None
    try:
        return parse_spec(json.loads(text))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: not valid JSON: {exc}") from None
