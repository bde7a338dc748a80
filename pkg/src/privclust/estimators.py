"""Scikit-learn style estimators around the solvers.

Samples are rows of ``X`` (coordinates), or ``X`` is a square distance matrix
when ``metric="precomputed"``. Every sample is both a client and a candidate
center. After ``fit``:

* ``labels_``: cluster index per sample, ``-1`` for outliers;
* ``centers_``: sample index of each cluster's center;
* ``radius_``: largest sample-to-center distance, as an exact ``Fraction``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import build_instance, check_int, check_points
from .errors import InvalidInstanceError
from .facility import brute_force_private_fl, privatize_fl
from .runner import solve_variant

__all__ = ["PrivateKCenter", "FairKCenter", "PrivateCapacitatedFacilityLocation"]


class _CenterMixin:
    def _store(self, inst, sol, X):
        self.instance_ = inst
        self.solution_ = sol
        self.labels_ = np.array(sol.labels(inst), dtype=int)
        self.centers_ = np.array(sol.centers, dtype=int)
        self.radius_ = sol.radius
        self.outliers_ = np.array(sorted(sol.outliers), dtype=int)
        if self.metric != "precomputed":
            self.cluster_centers_ = np.asarray(check_points(X, "euclidean"))[self.centers_]
        self.n_features_in_ = np.asarray(X).shape[1]
        return self

    def predict(self, X):
        """Nearest fitted center for each row (distances to the fitted samples when precomputed).

        Constraints are not re-applied to new samples.
        """
        check_is_fitted(self, "centers_")
        if self.metric == "precomputed":
            D = np.asarray(X, dtype=float)
            if D.ndim != 2 or D.shape[1] != len(self.labels_):
                raise InvalidInstanceError("precomputed prediction needs distances to every fitted sample")
            return np.argmin(D[:, self.centers_], axis=1)
        arr = check_points(X, "euclidean")
        if arr.shape[1] != self.cluster_centers_.shape[1]:
            raise InvalidInstanceError(f"X has {arr.shape[1]} features, expected {self.cluster_centers_.shape[1]}")
        diff = arr[:, None, :] - self.cluster_centers_[None, :, :]
        return np.argmin((diff**2).sum(axis=-1), axis=1)


class PrivateKCenter(_CenterMixin, ClusterMixin, BaseEstimator):
    """Private k-center: every cluster keeps at least ``min_cluster_size`` samples.

    ``variant`` picks the side constraint: ``"private"`` (none),
    ``"private-outliers"`` (discard up to ``n_outliers`` samples),
    ``"private-capacitated"`` (at most ``capacity`` per cluster),
    ``"strongly-private"`` (``color_min_sizes[c]`` samples of color ``c`` in
    every cluster). ``underlying`` names the solver the lower bound is added to.
    """

    _variants = ("private", "private-outliers", "private-capacitated", "strongly-private")

    def __init__(
        self,
        n_clusters=2,
        min_cluster_size=1,
        variant="private",
        n_outliers=0,
        capacity=None,
        color_min_sizes=None,
        underlying=None,
        metric="euclidean",
        denominator=10**6,
    ):
        self.n_clusters = n_clusters
        self.min_cluster_size = min_cluster_size
        self.variant = variant
        self.n_outliers = n_outliers
        self.capacity = capacity
        self.color_min_sizes = color_min_sizes
        self.underlying = underlying
        self.metric = metric
        self.denominator = denominator

    def fit(self, X, y=None, colors=None):
        if self.variant not in self._variants:
            raise InvalidInstanceError(f"variant must be one of {self._variants}, got {self.variant!r}")
        params = dict(
            k=check_int(self.n_clusters, "n_clusters", 1),
            ell=check_int(self.min_cluster_size, "min_cluster_size", 0),
            outliers=check_int(self.n_outliers, "n_outliers", 0) if self.variant == "private-outliers" else 0,
        )
        if self.variant == "private-capacitated":
            params["capacities"] = check_int(self.capacity, "capacity", 1)
        if self.variant == "strongly-private":
            if colors is None or self.color_min_sizes is None:
                raise InvalidInstanceError("strongly-private needs colors and color_min_sizes")
            params["color_ell"] = {str(c): check_int(v, f"color_min_sizes[{c}]") for c, v in dict(self.color_min_sizes).items()}
            params["ell"] = 0
        inst = build_instance(X, self.metric, self.denominator, colors=colors, **params)
        sol = solve_variant(inst, self.variant, self.underlying)
        return self._store(inst, sol, X)


class FairKCenter(_CenterMixin, ClusterMixin, BaseEstimator):
    """Fair k-center: each cluster keeps the global color proportions.

    With ``min_cluster_size > 0`` the clusters are private too, and with a
    ``capacity`` they are additionally capped.
    """

    def __init__(self, n_clusters=2, min_cluster_size=0, capacity=None, underlying=None,
                 metric="euclidean", denominator=10**6):
        self.n_clusters = n_clusters
        self.min_cluster_size = min_cluster_size
        self.capacity = capacity
        self.underlying = underlying
        self.metric = metric
        self.denominator = denominator

    def fit(self, X, y=None, colors=None):
        if colors is None:
            raise InvalidInstanceError("fair clustering needs one color per sample")
        ell = check_int(self.min_cluster_size, "min_cluster_size", 0)
        cap = check_int(self.capacity, "capacity", 1, allow_none=True)
        params = dict(k=check_int(self.n_clusters, "n_clusters", 1), ell=ell)
        if cap is not None:
            params["capacities"] = cap
            variant = "private-fair-capacitated"
        else:
            variant = "private-fair" if ell > 0 else "fair"
        inst = build_instance(X, self.metric, self.denominator, colors=colors, **params)
        self.variant_ = variant
        return self._store(inst, solve_variant(inst, variant, self.underlying), X)


class PrivateCapacitatedFacilityLocation(ClusterMixin, BaseEstimator):
    """Facility location where each open facility serves between ``min_cluster_size`` and ``capacity`` samples.

    Needs ``2 * min_cluster_size <= capacity``. The private base solution is
    computed exactly, so at most ten samples are accepted.
    """

    def __init__(self, opening_cost=1, min_cluster_size=1, capacity=2, metric="euclidean", denominator=10**6):
        self.opening_cost = opening_cost
        self.min_cluster_size = min_cluster_size
        self.capacity = capacity
        self.metric = metric
        self.denominator = denominator

    def fit(self, X, y=None):
        cap = check_int(self.capacity, "capacity", 1)
        ell = check_int(self.min_cluster_size, "min_cluster_size", 0)
        inst = build_instance(X, self.metric, self.denominator, ell=ell, capacities=cap,
                              opening_cost=self.opening_cost)
        sol = privatize_fl(inst, brute_force_private_fl(inst), cap)
        self.instance_ = inst
        self.solution_ = sol
        self.labels_ = np.array([sol.assignment[p] for p in inst.points], dtype=int)
        self.centers_ = np.array(sol.centers, dtype=int)
        self.cost_ = sol.total
        self.connection_cost_ = sol.connection
        self.n_features_in_ = np.asarray(X).shape[1]
        return self
