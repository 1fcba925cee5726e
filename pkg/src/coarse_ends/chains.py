"""K-chain components, coarsely connected components and annulus towers.

The tower is built in one pass: points of the ball of radius ``R`` are added
to a union-find structure in decreasing distance from the base point, and
the partition is snapshotted whenever the filtration crosses a radius of the
schedule. Each snapshot is the K-chain partition of the annulus
``{x : r_j <= d(ξ, x) <= R}``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from . import extdist
from .errors import InputError
from .extdist import INF, ExtDist
from .space import FiniteModel, SpaceModel

log = logging.getLogger(__name__)

DEFAULT_MAX_POINTS = 50_000


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, items=()):
        self.parent = {}
        self.size = {}
        for x in items:
            self.add(x)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        root = x
        parent = self.parent
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


class Partition:
    """A partition of a finite carrier; class ids are the smallest members."""

    def __init__(self, carrier: FiniteModel, class_of: dict):
        self.carrier = carrier
        self.class_of = class_of

    @classmethod
    def from_union_find(cls, carrier: FiniteModel, uf: UnionFind, points=None):
        points = carrier.points if points is None else points
        smallest = {}
        roots = {}
        for p in points:
            r = uf.find(p)
            roots[p] = r
            if r not in smallest or p < smallest[r]:
                smallest[r] = p
        return cls(carrier, {p: smallest[roots[p]] for p in points})

    def classes(self) -> dict:
        out: dict = {}
        for p in self.carrier.points:
            out.setdefault(self.class_of[p], []).append(p)
        return {k: out[k] for k in sorted(out)}

    @property
    def ids(self) -> list:
        return sorted(set(self.class_of.values()))

    def __len__(self):
        return len(set(self.class_of.values()))

    def same(self, p, q) -> bool:
        return self.class_of[p] == self.class_of[q]

    def labels(self) -> list[int]:
        """Integer labels in carrier order, numbered by sorted class id."""
        index = {c: i for i, c in enumerate(self.ids)}
        return [index[self.class_of[p]] for p in self.carrier.points]

    def refines(self, other: "Partition") -> bool:
        """Every class of ``self`` lies inside one class of ``other``."""
        seen = {}
        for p, c in self.class_of.items():
            d = other.class_of[p]
            if seen.setdefault(c, d) != d:
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, Partition) and self.class_of == other.class_of

    def __repr__(self):
        return f"Partition({len(self)} classes over {len(self.carrier)} points)"


def _use_geometry(model: FiniteModel, K) -> bool:
    """Bucketed neighbour queries pay off when a K-ball is small next to the model."""
    if model.geometry is None or not model.points:
        return False
    budget = 4 * len(model) + 64
    return model.geometry.ball_size(model.points[0], K, budget) <= budget


def _scale(K) -> ExtDist:
    K = extdist.parse(K)
    if K is INF:
        raise InputError("K must be finite; use coarsely_connected_components for K = ∞")
    return K


def k_chain_components(model: FiniteModel, K) -> Partition:
    """Partition into K-chain components: unions over all pairs at distance <= K."""
    K = _scale(K)
    uf = UnionFind(model.points)
    if _use_geometry(model, K):
        geo = model.geometry
        for p in model.points:
            for q in geo.neighbors(p, K):
                if q != p and q in model:
                    uf.union(p, q)
    else:
        pts = model.points
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                if model.dist(p, q) <= K:
                    uf.union(p, q)
    return Partition.from_union_find(model, uf)


def coarsely_connected_components(model: FiniteModel) -> Partition:
    """Classes of the relation ``d(x, y) < ∞``.

    Finite distance is transitive, so each point only has to be compared
    with one representative per class found so far.
    """
    reps: list = []
    class_of = {}
    for p in model.points:
        for rep in reps:
            if model.dist(p, rep) is not INF:
                class_of[p] = rep
                break
        else:
            reps.append(p)
            class_of[p] = p
    # reps are the first (hence smallest) members in carrier order only when sorted
    smallest = {}
    for p, rep in class_of.items():
        if rep not in smallest or p < smallest[rep]:
            smallest[rep] = p
    return Partition(model, {p: smallest[rep] for p, rep in class_of.items()})


# annulus towers ------------------------------------------------------------


@dataclass(frozen=True)
class AnnulusTower:
    """K-chain partitions of the annuli ``r_j <= d(ξ, x) <= R``.

    ``inclusions[j]`` maps each class id of level ``j + 1`` to the id of the
    level-``j`` class containing it.
    """

    space: SpaceModel
    K: ExtDist
    radii: tuple
    R: ExtDist
    levels: tuple
    inclusions: tuple
    radius_of: dict = field(repr=False, compare=False, default_factory=dict)

    def include(self, j: int, k: int, cls):
        """Image of a level-``k`` class at level ``j <= k``."""
        if not 0 <= j <= k < len(self.levels):
            raise InputError(f"no inclusion from level {k} to level {j}")
        for level in range(k - 1, j - 1, -1):
            cls = self.inclusions[level][cls]
        return cls

    def shell_classes(self, j: int) -> list:
        """Level-``j`` classes containing a point with radius > R - K."""
        cut = self.R - self.K
        part = self.levels[j]
        out = set()
        for p, c in part.class_of.items():
            if self.radius_of[p] > cut:
                out.add(c)
        return sorted(out)

    def class_at(self, j: int, p):
        return self.levels[j].class_of.get(p)


def _validate_schedule(radii, R):
    radii = tuple(extdist.parse(r) for r in radii)
    if not radii:
        raise InputError("the radius schedule must not be empty")
    if any(r is INF for r in radii) or R is INF:
        raise InputError("radii and horizon must be finite")
    if any(a >= b for a, b in zip(radii, radii[1:])):
        raise InputError(f"radii must be strictly increasing, got {list(map(extdist.to_json, radii))}")
    if radii[0] < 0:
        raise InputError("radii must be nonnegative")
    if not radii[-1] < R:
        raise InputError(f"outer horizon R={extdist.to_json(R)} must exceed every radius")
    return radii


def annulus_tower(space: SpaceModel, K, radii, R) -> AnnulusTower:
    K = _scale(K)
    R = extdist.parse(R)
    radii = _validate_schedule(radii, R)
    pts = space.enumerate(R)
    radius_of = {p: space.radius(p) for p in pts}
    order = sorted(pts, key=lambda p: (-radius_of[p], p))
    geo = space.geometry
    full = FiniteModel.from_points(geo, pts, space.base)
    bucketed = _use_geometry(full, K)
    uf = UnionFind()
    added: list = []
    added_set = set()
    snapshots: dict = {}
    idx = 0
    for j in range(len(radii) - 1, -1, -1):
        while idx < len(order) and radius_of[order[idx]] >= radii[j]:
            p = order[idx]
            uf.add(p)
            if bucketed:
                for q in geo.neighbors(p, K):
                    if q in added_set:
                        uf.union(p, q)
            else:
                for q in added:
                    if geo.dist(p, q) <= K:
                        uf.union(p, q)
            added.append(p)
            added_set.add(p)
            idx += 1
        carrier = full.restrict(added)
        snapshots[j] = Partition.from_union_find(carrier, uf)
    levels = tuple(snapshots[j] for j in range(len(radii)))
    inclusions = tuple(
        {c: levels[j].class_of[c] for c in levels[j + 1].ids} for j in range(len(radii) - 1)
    )
    log.debug("tower K=%s R=%s over %d points: %s", K, R, len(pts), [len(l) for l in levels])
    return AnnulusTower(space, K, radii, R, levels, inclusions, radius_of)


# end counting --------------------------------------------------------------


@dataclass(frozen=True)
class Thread:
    """A deepest-level class reaching the outer shell, with its class chain."""

    id: object
    chain: tuple  # class id per level, shallowest first
    shell_point: object
    size: int


@dataclass(frozen=True)
class EndReport:
    K: ExtDist
    radii: tuple
    horizons: tuple
    count: int | None
    threads: tuple
    level_counts: tuple
    schedule_stable: bool
    horizon_stable: bool
    tower: AnnulusTower = field(repr=False)
    outer: AnnulusTower = field(repr=False)
    outer_threads: dict = field(repr=False, default_factory=dict)

    @property
    def stabilized(self) -> bool:
        return self.schedule_stable and self.horizon_stable

    @property
    def space(self) -> SpaceModel:
        return self.tower.space

    def thread_ids(self) -> list:
        return [t.id for t in self.threads]

    def label(self, thread_id) -> int:
        return self.thread_ids().index(thread_id)

    def to_json(self) -> dict:
        pj = self.space.geometry.point_to_json
        return {
            "K": extdist.to_json(self.K),
            "radii": [extdist.to_json(r) for r in self.radii],
            "horizons": [extdist.to_json(r) for r in self.horizons],
            "count": self.count if self.count is not None else "not stabilized",
            "level_counts": list(self.level_counts),
            "stabilization": {"schedule_stable": self.schedule_stable, "horizon_stable": self.horizon_stable},
            "threads": [
                {
                    "id": pj(t.id),
                    "chain": [pj(c) for c in t.chain],
                    "shell_point": pj(t.shell_point),
                    "size": t.size,
                }
                for t in self.threads
            ],
        }

    def to_dot(self) -> str:
        return tower_dot(self.tower)


def tower_dot(tower: AnnulusTower) -> str:
    """Inclusion forest: one node per class per level, edges deeper -> shallower."""
    pj = tower.space.geometry.point_to_json
    lines = ["digraph tower {", "  rankdir=LR;"]
    for j, part in enumerate(tower.levels):
        classes = part.classes()
        for k, (cid, members) in enumerate(classes.items()):
            label = f"r={extdist.to_json(tower.radii[j])}\\n{pj(cid)}\\n{len(members)} pts"
            lines.append(f'  "L{j}_{k}" [label="{label}"];')
    for j, inc in enumerate(tower.inclusions):
        shallow = {c: k for k, c in enumerate(tower.levels[j].ids)}
        deep = {c: k for k, c in enumerate(tower.levels[j + 1].ids)}
        for c, d in sorted(inc.items(), key=lambda kv: deep[kv[0]]):
            lines.append(f'  "L{j + 1}_{deep[c]}" -> "L{j}_{shallow[d]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _threads(tower: AnnulusTower) -> list[Thread]:
    m = len(tower.levels) - 1
    classes = tower.levels[m].classes()
    out = []
    cut = tower.R - tower.K
    for cid in tower.shell_classes(m):
        members = classes[cid]
        shell = min((p for p in members if tower.radius_of[p] > cut), key=lambda p: (-tower.radius_of[p], p))
        chain = tuple(tower.include(j, m, cid) for j in range(m + 1))
        out.append(Thread(cid, chain, shell, len(members)))
    return out


def default_schedule(space: SpaceModel, K, max_points: int = DEFAULT_MAX_POINTS):
    """Geometric radii ``K·2^j`` (j = 1..m, R = K·2^(m+2)) with the largest
    m in 4, 3, 2 whose outer ball ``2R`` fits the point budget, falling back
    to linear radii ``K·1..K·m`` with ``R = K(m+2)`` for fast-growing spaces."""
    K = _scale(K)
    if K == 0:
        raise InputError("K must be positive to build a default schedule")
    geo = space.geometry
    candidates = []
    for m in (4, 3, 2):
        candidates.append((tuple(K * 2**j for j in range(1, m + 1)), K * 2 ** (m + 2)))
    for m in (3, 2):
        candidates.append((tuple(K * j for j in range(1, m + 1)), K * (m + 2)))
    for radii, R in candidates:
        if geo.ball_size(space.base, 2 * R, max_points) <= max_points:
            return tuple(map(extdist.normalize, radii)), extdist.normalize(R)
    raise InputError(f"{space.name}: even the smallest schedule exceeds {max_points} points; raise --max-points")


def implied_horizon(space: SpaceModel, K, radii, max_points: int = DEFAULT_MAX_POINTS):
    """Outer horizon for a user-given schedule: ``4·r_m`` when ``ball(2R)``
    fits the budget, else ``r_m + 2K`` (the linear default's margin)."""
    last = extdist.parse(radii[-1])
    for R in (4 * last, last + 2 * K):
        if R > last and space.geometry.ball_size(space.base, 2 * R, max_points) <= max_points:
            return extdist.normalize(R)
    raise InputError(f"{space.name}: no horizon for radii ending at {extdist.to_json(last)} fits {max_points} points")


def end_count(space: SpaceModel, K=None, radii=None, horizons=None, max_points: int = DEFAULT_MAX_POINTS) -> EndReport:
    """Count persistent K-chain components of ball complements.

    Threads are the deepest-level classes that reach the outer shell
    ``(R - K, R]``. The count is reported only when the threads are stable
    under dropping the last radius and under doubling the horizon.
    """
    K = _scale(K if K is not None else space.geometry.unit())
    if radii is None:
        radii, R = default_schedule(space, K, max_points)
        R2 = 2 * R
    else:
        radii = tuple(extdist.parse(r) for r in radii)
        if horizons is None:
            R = implied_horizon(space, K, radii, max_points)
            R2 = 2 * R
    if horizons is not None:
        R, R2 = (extdist.parse(h) for h in horizons)
        if not R < R2:
            raise InputError("horizons must satisfy R < R'")
        if space.geometry.ball_size(space.base, R2, max_points) > max_points:
            raise InputError(f"{space.name}: ball of radius {extdist.to_json(R2)} exceeds {max_points} points; raise --max-points")
    tower = annulus_tower(space, K, radii, R)
    outer = annulus_tower(space, K, radii, R2)
    threads = _threads(tower)
    outer_threads = {t.id: t for t in _threads(outer)}
    m = len(radii) - 1

    if m == 0:
        schedule_stable = True
    else:
        images = [tower.inclusions[m - 1][t.id] for t in threads]
        schedule_stable = len(set(images)) == len(images) and sorted(images) == tower.shell_classes(m - 1)

    outer_images = [outer.class_at(m, t.id) for t in threads]
    horizon_stable = (
        len(set(outer_images)) == len(outer_images) and sorted(outer_images, key=_sort_key) == sorted(outer_threads, key=_sort_key)
    )
    level_counts = tuple(len(level) for level in tower.levels)
    count = len(threads) if schedule_stable and horizon_stable else None
    return EndReport(
        K, tuple(radii), (R, R2), count, tuple(threads), level_counts,
        schedule_stable, horizon_stable, tower, outer, outer_threads,
    )


def _sort_key(p):
    return (p is None, p if p is not None else 0)
