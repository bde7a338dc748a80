"""Random instance generators for sweeps and benchmarks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .metric import Instance, euclidean_matrix, metric_closure

__all__ = ["GeneratorConfig", "random_metric", "random_colors", "random_instance"]

COLOR_NAMES = ("red", "blue", "green")


@dataclass(frozen=True)
class GeneratorConfig:
    """Ranges for random instances; every ``(lo, hi)`` pair is inclusive."""

    n_points: tuple[int, int] = (3, 8)
    n_locations: tuple[int, int] = (2, 5)
    supplier: bool = False
    metric: str = "euclidean"  # or "graph"
    k: tuple[int, int] = (1, 3)
    ell: tuple[int, int] = (0, 0)
    outliers: tuple[int, int] = (0, 0)
    capacity: tuple[int, int] | None = None
    uniform_capacity: bool = True
    colors: int = 0
    color_mode: str = "balanced"  # balanced, skewed, unit
    color_ell: tuple[int, int] | None = None
    opening_cost: tuple[int, int] | None = None
    extra: dict = field(default_factory=dict)


def random_metric(rng: np.random.Generator, size: int, kind: str = "euclidean") -> list[list[Fraction]]:
    """Euclidean distances of integer grid points (1/100 denominator) or shortest paths of a random graph."""
    if kind == "euclidean":
        coords = rng.integers(0, 21, size=(size, 2))
        return euclidean_matrix(coords, denominator=100)
    if kind == "graph":
        inf = Fraction(10**9)
        d = [[Fraction(0) if i == j else inf for j in range(size)] for i in range(size)]
        order = rng.permutation(size)
        for pos in range(1, size):
            a, b = int(order[pos]), int(order[rng.integers(0, pos)])
            w = Fraction(int(rng.integers(1, 11)))
            d[a][b] = d[b][a] = w
        for _ in range(int(rng.integers(0, size + 1))):
            a, b = (int(x) for x in rng.integers(0, size, size=2))
            if a != b:
                w = Fraction(int(rng.integers(1, 11)))
                d[a][b] = d[b][a] = min(d[a][b], w)
        return metric_closure(d)
    raise ValueError(f"unknown metric kind {kind!r}")


def _color_counts(rng, n: int, ncol: int, mode: str) -> list[int] | None:
    """Per-color counts summing to ``n`` that fit the mode, or None when impossible."""
    if mode == "balanced":
        if n % ncol:
            return None
        return [n // ncol] * ncol
    if mode == "unit":
        # one color with quota 1: its count g divides every other count
        options = []
        for g in range(1, n + 1):
            rest = n - g
            if ncol == 1:
                if rest == 0:
                    options.append([g])
                continue
            if rest <= 0 or rest % g:
                continue
            units = rest // g
            if units < ncol - 1:
                continue
            cut = sorted(int(x) for x in rng.choice(np.arange(1, units), size=ncol - 2, replace=False)) if ncol > 2 else []
            parts = np.diff([0, *cut, units])
            options.append([g] + [int(p) * g for p in parts])
        if not options:
            return None
        return options[int(rng.integers(0, len(options)))]
    if mode == "skewed":
        options = [
            [g * w for w in weights]
            for weights in ([1, 2, 3][:ncol], [2, 3, 4][:ncol], [2, 1, 2][:ncol], [3, 2, 2][:ncol])
            for g in range(1, n + 1)
            if g * sum(weights) == n
        ]
        if not options:
            return None
        return options[int(rng.integers(0, len(options)))]
    raise ValueError(f"unknown color mode {mode!r}")


def random_colors(rng: np.random.Generator, points, ncol: int, mode: str) -> dict[int, str] | None:
    counts = _color_counts(rng, len(points), ncol, mode)
    if counts is None:
        return None
    labels = [COLOR_NAMES[i] for i, c in enumerate(counts) for _ in range(c)]
    rng.shuffle(labels)
    return {p: labels[i] for i, p in enumerate(points)}


def _pick(rng, bounds):
    lo, hi = bounds
    return int(rng.integers(lo, hi + 1))


def random_instance(rng: np.random.Generator, cfg: GeneratorConfig, max_tries: int = 100) -> Instance:
    """Draw one instance; retries until the color mode admits the drawn point count."""
    for _ in range(max_tries):
        n = _pick(rng, cfg.n_points)
        m = _pick(rng, cfg.n_locations) if cfg.supplier else 0
        dist = random_metric(rng, n + m, cfg.metric)
        points = list(range(n))
        locations = list(range(n, n + m)) if cfg.supplier else points
        params = dict(
            k=_pick(rng, cfg.k),
            ell=_pick(rng, cfg.ell),
            outliers=_pick(rng, cfg.outliers),
        )
        if cfg.colors:
            colors = random_colors(rng, points, cfg.colors, cfg.color_mode)
            if colors is None:
                continue
            params["colors"] = colors
            if cfg.color_ell is not None:
                params["color_ell"] = {c: _pick(rng, cfg.color_ell) for c in sorted(set(colors.values()))}
        if cfg.capacity is not None:
            lo = max(cfg.capacity[0], params["ell"], 1)
            hi = max(cfg.capacity[1], lo)
            if cfg.uniform_capacity:
                params["capacities"] = _pick(rng, (lo, hi))
            else:
                params["capacities"] = {q: _pick(rng, (lo, hi)) for q in locations}
        if cfg.opening_cost is not None:
            params["opening_cost"] = _pick(rng, cfg.opening_cost)
        params.update(cfg.extra)
        return Instance.from_matrix(dist, points=points, locations=locations, **params)
    raise ValueError("could not draw an instance matching the configuration")
