"""Input checks shared by the estimators."""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral

import numpy as np
from sklearn.utils.validation import check_array

from .errors import InvalidInstanceError
from .metric import Instance, euclidean_matrix, to_fraction

__all__ = ["check_int", "check_points", "check_colors", "build_instance"]


def check_int(value, name: str, low: int = 0, allow_none: bool = False) -> int | None:
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise InvalidInstanceError(f"{name} must be an integer, got {value!r}")
    if value < low:
        raise InvalidInstanceError(f"{name} must be >= {low}, got {value}")
    return int(value)


def check_points(X, metric: str) -> np.ndarray:
    """Coordinates (n, d) or, for ``metric='precomputed'``, a square distance matrix."""
    if metric not in ("euclidean", "precomputed"):
        raise InvalidInstanceError(f"metric must be 'euclidean' or 'precomputed', got {metric!r}")
    if metric == "precomputed":
        arr = np.asarray(X, dtype=object)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise InvalidInstanceError("a precomputed metric must be a nonempty square matrix")
        return arr
    return check_array(X, dtype=float, ensure_min_samples=1)


def check_colors(colors, n: int) -> dict[int, str] | None:
    if colors is None:
        return None
    colors = list(colors)
    if len(colors) != n:
        raise InvalidInstanceError(f"need one color per sample ({n}), got {len(colors)}")
    return {i: str(c) for i, c in enumerate(colors)}


def build_instance(X, metric: str, denominator: int, colors=None, **params) -> Instance:
    arr = check_points(X, metric)
    n = arr.shape[0]
    if metric == "precomputed":
        matrix = [[to_fraction(x) for x in row] for row in arr]
    else:
        matrix = euclidean_matrix(arr, check_int(denominator, "denominator", 1))
    cost = params.pop("opening_cost", None)
    return Instance.from_matrix(
        matrix,
        ids=[str(i) for i in range(n)],
        colors=check_colors(colors, n),
        opening_cost=None if cost is None else Fraction(to_fraction(cost)),
        **params,
    )
