"""Instance, solution and report documents.

All documents are JSON with a fixed field order. Rationals are written as
strings (``"3/2"``, ``"7"``) so nothing passes through floating point, and a
document written by :func:`dump_instance` parses back to an equal instance and
re-serialises to the same bytes.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any, Mapping

from .errors import InvalidInstanceError, MalformedSolutionError
from .facility import FLSolution, fl_cost
from .metric import Clustering, Instance, euclidean_matrix, to_fraction

__all__ = [
    "INSTANCE_FORMAT",
    "SOLUTION_FORMAT",
    "instance_to_doc",
    "instance_from_doc",
    "dump_instance",
    "load_instance",
    "solution_to_doc",
    "fl_solution_to_doc",
    "solution_from_doc",
    "dumps",
    "instance_digest",
]

INSTANCE_FORMAT = "privclust-instance"
SOLUTION_FORMAT = "privclust-solution"
VERSION = 1


def dumps(doc: Mapping[str, Any]) -> str:
    """Canonical text of a document: two-space indent, insertion order, trailing newline."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _q(x: Fraction) -> str:
    return str(Fraction(x))


# ---------------------------------------------------------------------------
# instances


def instance_to_doc(inst: Instance) -> dict:
    name = inst.name
    caps: Any = None
    if isinstance(inst.capacities, int):
        caps = inst.capacities
    elif inst.capacities is not None:
        caps = {name(q): inst.capacities[q] for q in sorted(inst.locations)}
    return {
        "format": INSTANCE_FORMAT,
        "version": VERSION,
        "ids": list(inst.ids),
        "points": [name(p) for p in inst.points],
        "locations": [name(q) for q in inst.locations],
        "metric": {"matrix": [[_q(x) for x in row] for row in inst.dist]},
        "k": inst.k,
        "ell": inst.ell,
        "outliers": inst.outliers,
        "capacities": caps,
        "colors": None if inst.colors is None else {name(p): inst.colors[p] for p in sorted(inst.points)},
        "color_ell": None if inst.color_ell is None else {c: inst.color_ell[c] for c in sorted(inst.color_ell)},
        "opening_cost": None if inst.opening_cost is None else _q(inst.opening_cost),
    }


def _int_field(doc: Mapping, key: str, default: int) -> int:
    value = doc.get(key, default)
    if value is None:
        return default
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidInstanceError(f"field {key!r} must be an integer, got {value!r}")
    return value


def _count(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidInstanceError(f"{what} must be an integer, got {value!r}")
    return value


def _index(ids: list[str], names, what: str) -> list[int]:
    pos = {x: i for i, x in enumerate(ids)}
    if not isinstance(names, list):
        raise InvalidInstanceError(f"{what} must be a list of ids")
    try:
        return [pos[str(x)] for x in names]
    except KeyError as exc:
        raise InvalidInstanceError(f"{what} mentions unknown id {exc.args[0]!r}") from None


def instance_from_doc(doc: Mapping) -> Instance:
    """Parse and validate an instance document.

    ``ids`` defaults to the points followed by the remaining locations;
    ``locations`` defaults to the points. The metric is either an explicit
    ``matrix`` (rows in ``ids`` order) or ``euclidean`` coordinates, optionally
    with a ``denominator`` for rounding (default one million).
    """
    if not isinstance(doc, Mapping):
        raise InvalidInstanceError("an instance document must be a JSON object")
    fmt = doc.get("format", INSTANCE_FORMAT)
    if fmt != INSTANCE_FORMAT:
        raise InvalidInstanceError(f"not an instance document (format {fmt!r})")
    known = {"format", "version", "ids", "points", "locations", "metric", "k", "ell", "outliers",
             "capacities", "colors", "color_ell", "opening_cost"}
    extra = sorted(set(doc) - known)
    if extra:
        raise InvalidInstanceError(f"unknown instance fields: {', '.join(extra)}")
    if "points" not in doc or "metric" not in doc:
        raise InvalidInstanceError("an instance needs points and a metric")
    if not isinstance(doc["points"], list):
        raise InvalidInstanceError("points must be a list of ids")
    for key in ("locations", "ids"):
        if doc.get(key) is not None and not isinstance(doc[key], list):
            raise InvalidInstanceError(f"{key} must be a list of ids")
    points = [str(x) for x in doc["points"]]
    locations = [str(x) for x in doc.get("locations") or points]
    ids = doc.get("ids")
    if ids is None:
        ids = points + [q for q in locations if q not in set(points)]
    ids = [str(x) for x in ids]

    metric = doc["metric"]
    if not isinstance(metric, Mapping) or set(metric) not in ({"matrix"}, {"euclidean"}, {"euclidean", "denominator"}):
        raise InvalidInstanceError("metric must hold exactly one of 'matrix' or 'euclidean'")
    if "matrix" in metric:
        matrix = metric["matrix"]
        if not isinstance(matrix, list) or any(not isinstance(r, list) or len(r) != len(ids) for r in matrix):
            raise InvalidInstanceError("metric matrix must be square over the ids")
    else:
        coords = metric["euclidean"]
        denominator = metric.get("denominator", 10**6)
        if not isinstance(coords, list) or len(coords) != len(ids) or not all(isinstance(r, list) for r in coords):
            raise InvalidInstanceError("euclidean metric needs one coordinate vector per id")
        if len({len(r) for r in coords}) > 1:
            raise InvalidInstanceError("euclidean metric needs one coordinate vector per id")
        if isinstance(denominator, bool) or not isinstance(denominator, int) or denominator <= 0:
            raise InvalidInstanceError("denominator must be a positive integer")
        matrix = euclidean_matrix([[float(to_fraction(c)) for c in row] for row in coords], denominator)

    pts = _index(ids, points, "points")
    locs = _index(ids, locations, "locations")
    caps = doc.get("capacities")
    if isinstance(caps, Mapping):
        caps = {i: _count(caps[name], "capacity") for name, i in zip(caps, _index(ids, list(caps), "capacities"))}
    elif caps is not None and (isinstance(caps, bool) or not isinstance(caps, int)):
        raise InvalidInstanceError("capacities must be an integer or a mapping from location id")
    colors = doc.get("colors")
    if colors is not None:
        if not isinstance(colors, Mapping):
            raise InvalidInstanceError("colors must map point ids to color names")
        colors = {i: str(colors[name]) for name, i in zip(colors, _index(ids, list(colors), "colors"))}
    color_ell = doc.get("color_ell")
    if color_ell is not None:
        if not isinstance(color_ell, Mapping):
            raise InvalidInstanceError("color_ell must map colors to integers")
        color_ell = {str(c): _count(v, "color_ell value") for c, v in color_ell.items()}
    cost = doc.get("opening_cost")
    return Instance.from_matrix(
        matrix,
        ids=ids,
        points=pts,
        locations=locs,
        k=_int_field(doc, "k", 1),
        ell=_int_field(doc, "ell", 0),
        outliers=_int_field(doc, "outliers", 0),
        capacities=caps,
        colors=colors,
        color_ell=color_ell,
        opening_cost=None if cost is None else to_fraction(cost),
    )


def dump_instance(inst: Instance) -> str:
    return dumps(instance_to_doc(inst))


def load_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"instance is not valid JSON: {exc}") from exc
    return instance_from_doc(doc)


def instance_digest(inst: Instance) -> str:
    return hashlib.sha256(dump_instance(inst).encode()).hexdigest()


# ---------------------------------------------------------------------------
# solutions


def solution_to_doc(inst: Instance, sol: Clustering) -> dict:
    name = inst.name
    return {
        "format": SOLUTION_FORMAT,
        "version": VERSION,
        "clusters": [
            {"center": name(c), "members": [name(p) for p in members]}
            for c, members in zip(sol.centers, sol.clusters())
        ],
        "outliers": [name(p) for p in sorted(sol.outliers)],
        "radius": _q(sol.radius),
    }


def fl_solution_to_doc(inst: Instance, sol: FLSolution) -> dict:
    name = inst.name
    return {
        "format": SOLUTION_FORMAT,
        "version": VERSION,
        "clusters": [
            {"center": name(c), "members": [name(p) for p in members]}
            for c, members in zip(sol.centers, sol.clusters())
        ],
        "outliers": [],
        "connection": _q(sol.connection),
        "opening": _q(sol.opening),
        "total": _q(sol.total),
    }


def solution_from_doc(inst: Instance, doc: Mapping) -> tuple[Clustering, dict[str, Fraction]]:
    """Rebuild a clustering from a solution document.

    Returns the clustering (radius recomputed, empty clusters kept) and the
    stored numeric fields, so callers can compare them with recomputed ones.
    Ids unknown to the instance raise :class:`MalformedSolutionError`.
    """
    if not isinstance(doc, Mapping) or doc.get("format") != SOLUTION_FORMAT:
        raise MalformedSolutionError("not a solution document")
    pos = {x: i for i, x in enumerate(inst.ids)}

    def look(x, pool, what):
        i = pos.get(str(x))
        if i is None or i not in pool:
            raise MalformedSolutionError(f"{what} {x!r} is not part of the instance")
        return i

    pts, locs = set(inst.points), set(inst.locations)
    clusters = doc.get("clusters")
    if not isinstance(clusters, list):
        raise MalformedSolutionError("solution needs a list of clusters")
    centers, members = [], []
    for c in clusters:
        if not isinstance(c, Mapping) or "center" not in c or not isinstance(c.get("members"), list):
            raise MalformedSolutionError("every cluster needs a center and a member list")
        centers.append(look(c["center"], locs, "center"))
        members.append([look(p, pts, "point") for p in c["members"]])
    outliers = [look(p, pts, "outlier") for p in doc.get("outliers", [])]
    sol = Clustering.build(inst, centers, members, outliers=outliers, prune=False)
    stored = {}
    for key in ("radius", "connection", "opening", "total"):
        if key in doc:
            try:
                stored[key] = to_fraction(doc[key])
            except InvalidInstanceError as exc:
                raise MalformedSolutionError(str(exc)) from exc
    return sol, stored


def fl_from_clustering(inst: Instance, sol: Clustering) -> FLSolution:
    conn, opening = fl_cost(inst, sol.centers, sol.assignment)
    return FLSolution(centers=sol.centers, assignment=dict(sol.assignment), connection=conn, opening=opening)
