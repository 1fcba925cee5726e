"""Pointed spaces presented by extended metrics, finite truncations and
the relation algebra (composition, inverse, powers, images) on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from . import extdist
from .errors import InputError
from .extdist import INF, ExtDist

Point = Hashable


class Geometry:
    """An unpointed metric space with a ball enumerator.

    Subclasses must implement ``contains``, ``dist`` and ``ball``. The
    remaining hooks have correct but slow defaults; zoo geometries override
    them with bucketed versions.
    """

    name: str = "geometry"

    def contains(self, p) -> bool:
        raise NotImplementedError

    def dist(self, p, q) -> ExtDist:
        raise NotImplementedError

    def ball(self, center, r) -> list:
        """Sorted list of points within ``r`` of ``center``; ``r`` finite."""
        raise NotImplementedError

    def neighbors(self, p, K) -> Iterable:
        """Points within ``K`` of ``p`` (``p`` itself may be included)."""
        return self.ball(p, K)

    def ball_size(self, center, r, cap: int) -> int:
        """``len(ball(center, r))``, allowed to stop counting past ``cap``."""
        return len(self.ball(center, r))

    def origin(self):
        raise NotImplementedError

    def unit(self) -> ExtDist:
        """Natural step length; the smallest scale at which the space is chain connected."""
        return 1

    # coordinate and word structure, used by sequence descriptions
    def shift(self, p, vector):
        raise InputError(f"{self.name} has no coordinate structure")

    def step(self, p, letter):
        raise InputError(f"{self.name} has no generator steps")

    def letters(self) -> tuple:
        return ()

    def point_from_json(self, value):
        return value

    def point_to_json(self, p):
        return p

    def describe(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Geometry) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class CallableGeometry(Geometry):
    """Geometry assembled from plain callables, for ad-hoc spaces in tests."""

    def __init__(self, name, dist, ball, contains=None, origin=None):
        self.name = name
        self._dist = dist
        self._ball = ball
        self._contains = contains or (lambda p: True)
        self._origin = origin

    def contains(self, p):
        return self._contains(p)

    def dist(self, p, q):
        return self._dist(p, q)

    def ball(self, center, r):
        return sorted(self._ball(center, r))

    def origin(self):
        return self._origin

    def describe(self):
        raise InputError(f"{self.name} is an ad-hoc geometry with no file form")


@dataclass(frozen=True, eq=False)
class SpaceModel:
    """A pointed space: a geometry together with its base point."""

    geometry: Geometry
    base: Point

    def __post_init__(self):
        if not self.geometry.contains(self.base):
            raise InputError(f"base point {self.base!r} is not a point of {self.geometry.name}")

    @property
    def name(self) -> str:
        return self.geometry.name

    def dist(self, p, q) -> ExtDist:
        return self.geometry.dist(p, q)

    def enumerate(self, r) -> list:
        """Points within ``r`` of the base point, sorted."""
        return self.geometry.ball(self.base, r)

    def with_base(self, base) -> "SpaceModel":
        return SpaceModel(self.geometry, base)

    def radius(self, p) -> ExtDist:
        return self.geometry.dist(self.base, p)

    def __eq__(self, other):
        return (
            isinstance(other, SpaceModel)
            and self.geometry.name == other.geometry.name
            and self.base == other.base
        )

    def __hash__(self):
        return hash((self.geometry.name, self.base))

    def __repr__(self):
        return f"SpaceModel({self.geometry.name}, base={self.base!r})"


def check_point(space: SpaceModel, p):
    if not space.geometry.contains(p):
        raise InputError(f"{p!r} is not a point of {space.name}")
    return p


def distance(space: SpaceModel, p, q) -> ExtDist:
    """``d_X(p, q)``; raises InputError for points outside the space."""
    check_point(space, p)
    check_point(space, q)
    return space.geometry.dist(p, q)


class FiniteModel:
    """A finite set of points with the restricted metric.

    Either backed by a geometry (distances computed on demand, neighbor
    queries bucketed) or by an explicit distance matrix.
    """

    def __init__(
        self,
        points: Sequence,
        dist: Callable[[Point, Point], ExtDist],
        base=None,
        *,
        geometry: Geometry | None = None,
        key=None,
    ):
        self.points = tuple(points)
        self._index = {p: i for i, p in enumerate(self.points)}
        if len(self._index) != len(self.points):
            raise InputError("finite model points must be distinct")
        if base is not None and base not in self._index:
            raise InputError(f"base {base!r} is not among the model points")
        self.base = base
        self._dist = dist
        self.geometry = geometry
        self.key = key

    @classmethod
    def from_points(cls, geometry: Geometry | SpaceModel, points: Iterable, base=None):
        if isinstance(geometry, SpaceModel):
            geometry = geometry.geometry
        pts = tuple(sorted(set(points)))
        for p in pts:
            if not geometry.contains(p):
                raise InputError(f"{p!r} is not a point of {geometry.name}")
        return cls(pts, geometry.dist, base, geometry=geometry, key=(geometry.name, pts))

    @classmethod
    def from_matrix(cls, points: Sequence, matrix, base=None):
        """Model with an explicit distance matrix; entries are ExtDist values."""
        pts = tuple(points)
        n = len(pts)
        rows = [tuple(extdist.parse(v) for v in row) for row in matrix]
        if len(rows) != n or any(len(row) != n for row in rows):
            raise InputError("distance matrix must be square and match the points")
        index = {p: i for i, p in enumerate(pts)}

        def dist(p, q):
            return rows[index[p]][index[q]]

        model = cls(pts, dist, base, key=None)
        model._rows = rows
        return model

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p):
        return p in self._index

    def index(self, p) -> int:
        return self._index[p]

    def dist(self, p, q) -> ExtDist:
        if p not in self._index or q not in self._index:
            missing = p if p not in self._index else q
            raise InputError(f"{missing!r} is not a point of this finite model")
        return self._dist(p, q)

    def neighbors(self, p, K) -> list:
        """Model points within ``K`` of ``p``, excluding ``p``."""
        if self.geometry is not None:
            out = [q for q in self.geometry.neighbors(p, K) if q in self._index and q != p]
        else:
            out = [q for q in self.points if q != p and self._dist(p, q) <= K]
        return out

    def matrix(self) -> list[list]:
        if hasattr(self, "_rows"):
            return [list(row) for row in self._rows]
        return [[self._dist(p, q) for q in self.points] for p in self.points]

    def restrict(self, subset: Iterable) -> "FiniteModel":
        keep = set(subset)
        for p in keep:
            if p not in self._index:
                raise InputError(f"{p!r} is not a point of this finite model")
        pts = tuple(p for p in self.points if p in keep)
        base = self.base if self.base in keep else None
        key = None if self.key is None else (self.key[0], pts)
        model = FiniteModel(pts, self._dist, base, geometry=self.geometry, key=key)
        return model

    def same_carrier(self, other: "FiniteModel") -> bool:
        if self is other:
            return True
        return self.key is not None and self.key == other.key

    def diameter(self, subset: Iterable | None = None) -> ExtDist:
        pts = self.points if subset is None else tuple(subset)
        best = 0
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                d = self.dist(p, q)
                if d > best:
                    best = d
                    if best is INF:
                        return INF
        return best

    def __repr__(self):
        return f"FiniteModel({len(self.points)} points, base={self.base!r})"


def ball(space: SpaceModel, r) -> FiniteModel:
    """Finite model on the closed ball of radius ``r`` about the base point."""
    r = extdist.parse(r)
    if r is INF:
        raise InputError("ball radius must be finite")
    return FiniteModel.from_points(space.geometry, space.enumerate(r), space.base)


# Relation algebra ---------------------------------------------------------


@dataclass(frozen=True)
class Relation:
    """A finite binary relation on the points of a FiniteModel."""

    model: FiniteModel
    pairs: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        for x, y in self.pairs:
            if x not in self.model or y not in self.model:
                raise InputError(f"pair {(x, y)!r} is not in the carrier model")

    def __contains__(self, pair):
        return pair in self.pairs

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __eq__(self, other):
        return (
            isinstance(other, Relation)
            and self.model.same_carrier(other.model)
            and self.pairs == other.pairs
        )

    def __hash__(self):
        return hash(self.pairs)


def _same_carrier(E: Relation, F: Relation):
    if not E.model.same_carrier(F.model):
        raise InputError("relations live on different carrier models")


def diagonal(model: FiniteModel) -> Relation:
    return Relation(model, frozenset((p, p) for p in model.points))


def compose_relations(E: Relation, F: Relation) -> Relation:
    """``E ∘ F = {(x, y) : (x, z) ∈ E and (z, y) ∈ F for some z}``."""
    _same_carrier(E, F)
    by_first: dict = {}
    for z, y in F.pairs:
        by_first.setdefault(z, []).append(y)
    out = set()
    for x, z in E.pairs:
        for y in by_first.get(z, ()):
            out.add((x, y))
    return Relation(E.model, frozenset(out))


def inverse_relation(E: Relation) -> Relation:
    return Relation(E.model, frozenset((y, x) for x, y in E.pairs))


def union_relations(E: Relation, F: Relation) -> Relation:
    _same_carrier(E, F)
    return Relation(E.model, E.pairs | F.pairs)


def relation_power(E: Relation, n: int) -> Relation:
    """``E^0 = Δ`` and ``E^(n+1) = E^n ∘ E``."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise InputError(f"relation powers need an integer n >= 0, got {n!r}")
    result = diagonal(E.model)
    for _ in range(n):
        result = compose_relations(result, E)
    return result


def relation_span(model: FiniteModel, E: Relation) -> ExtDist:
    """``sup d(E)`` with ``sup ∅ = 0``."""
    if not model.same_carrier(E.model):
        raise InputError("relation does not live on this model")
    best = 0
    for x, y in E.pairs:
        d = model.dist(x, y)
        if d > best:
            best = d
    return best


def is_entourage(model: FiniteModel, E: Relation, K=None) -> bool:
    """Entourage of the bounded coarse structure; at scale ``K`` if given."""
    span = relation_span(model, E)
    if K is None:
        return span is not INF
    return span <= K


def image_relation(f, g, E: Relation, carrier: FiniteModel | None = None) -> Relation:
    """``(f × g)(E) = {(f(x), g(y)) : (x, y) ∈ E}``.

    ``f`` and ``g`` are MapModels (the carrier is then built on the image in
    the target space) or plain callables together with an explicit carrier.
    """
    images = set()
    for x, y in E.pairs:
        try:
            images.add((f(x), g(y)))
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise InputError(f"map undefined on {(x, y)!r}: {exc}") from exc
    if carrier is None:
        target = getattr(f, "target", None)
        if target is None or getattr(g, "target", None) != target:
            raise InputError("image_relation needs MapModels with a common target or a carrier")
        pts = {a for pair in images for a in pair} | {target.base}
        carrier = FiniteModel.from_points(target.geometry, pts, target.base)
    return Relation(carrier, frozenset(images))


def is_bounded(model: FiniteModel, subset: Iterable, K=None) -> bool:
    """Finite diameter (``<= K`` when a scale is given)."""
    d = model.diameter(tuple(subset))
    if K is None:
        return d is not INF
    return d <= K
