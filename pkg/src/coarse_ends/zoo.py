"""The built-in spaces and their JSON descriptions.

Every geometry here knows how to enumerate balls around any centre and how
to list neighbours at scale ``K`` without scanning the whole truncation.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

from . import extdist
from .errors import InputError
from .extdist import INF
from .space import Geometry, SpaceModel


def _as_int(value, what="coordinate"):
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{what} must be an integer, got {value!r}")
    return value


def _floor_radius(r) -> int:
    if type(r) is int and r >= 0:
        return r
    r = extdist.parse(r)
    if r is INF:
        raise InputError("radius must be finite")
    return math.floor(r)


class Naturals(Geometry):
    name = "N"

    def contains(self, p):
        return isinstance(p, int) and not isinstance(p, bool) and p >= 0

    def dist(self, p, q):
        return abs(p - q)

    def ball(self, center, r):
        k = _floor_radius(r)
        return list(range(max(0, center - k), center + k + 1))

    def ball_size(self, center, r, cap):
        k = _floor_radius(r)
        return center + k + 1 - max(0, center - k)

    def origin(self):
        return 0

    def shift(self, p, vector):
        q = p + _as_int(vector, "shift")
        if q < 0:
            raise InputError(f"{p} + {vector} leaves N")
        return q

    def step(self, p, letter):
        if letter not in (1, -1):
            raise InputError(f"N steps are +1/-1, got {letter!r}")
        return self.shift(p, letter)

    def letters(self):
        return (1, -1)

    def point_from_json(self, value):
        p = _as_int(value, "point of N")
        if p < 0:
            raise InputError(f"{p} is not a natural number")
        return p

    def describe(self):
        return {"zoo": "N", "params": {}}


class Integers(Geometry):
    name = "Z"

    def contains(self, p):
        return isinstance(p, int) and not isinstance(p, bool)

    def dist(self, p, q):
        return abs(p - q)

    def ball(self, center, r):
        k = _floor_radius(r)
        return list(range(center - k, center + k + 1))

    def ball_size(self, center, r, cap):
        return 2 * _floor_radius(r) + 1

    def origin(self):
        return 0

    def shift(self, p, vector):
        return p + _as_int(vector, "shift")

    def step(self, p, letter):
        if letter not in (1, -1):
            raise InputError(f"Z steps are +1/-1, got {letter!r}")
        return p + letter

    def letters(self):
        return (1, -1)

    def point_from_json(self, value):
        return _as_int(value, "point of Z")

    def describe(self):
        return {"zoo": "Z", "params": {}}


@lru_cache(maxsize=64)
def _lattice_offsets(dim: int, norm: str, k: int) -> tuple:
    if norm == "linf":
        return tuple(itertools.product(range(-k, k + 1), repeat=dim))

    def rec(d, budget):
        if d == 0:
            yield ()
            return
        for x in range(-budget, budget + 1):
            for rest in rec(d - 1, budget - abs(x)):
                yield (x,) + rest

    return tuple(rec(dim, k))


class Lattice(Geometry):
    """``Z^d`` with the l1 or l-infinity metric; points are integer tuples."""

    def __init__(self, dim: int, norm: str = "l1"):
        if _as_int(dim, "dim") < 1:
            raise InputError("lattice dimension must be >= 1")
        if norm not in ("l1", "linf"):
            raise InputError(f"norm must be 'l1' or 'linf', got {norm!r}")
        self.dim = dim
        self.norm = norm
        self.name = f"Z^{dim}[{norm}]"

    def contains(self, p):
        return (
            isinstance(p, tuple)
            and len(p) == self.dim
            and all(isinstance(x, int) and not isinstance(x, bool) for x in p)
        )

    def dist(self, p, q):
        if self.norm == "l1":
            return sum(abs(a - b) for a, b in zip(p, q))
        return max(abs(a - b) for a, b in zip(p, q))

    def ball(self, center, r):
        offs = _lattice_offsets(self.dim, self.norm, _floor_radius(r))
        return sorted(tuple(c + o for c, o in zip(center, off)) for off in offs)

    def neighbors(self, p, K):
        offs = _lattice_offsets(self.dim, self.norm, _floor_radius(K))
        if self.dim == 2:
            x, y = p
            return [(x + a, y + b) for a, b in offs]
        return [tuple(c + o for c, o in zip(p, off)) for off in offs]

    def ball_size(self, center, r, cap):
        k = _floor_radius(r)
        if self.norm == "linf":
            return (2 * k + 1) ** self.dim
        return sum(2**j * math.comb(self.dim, j) * math.comb(k, j) for j in range(self.dim + 1))

    def origin(self):
        return (0,) * self.dim

    def shift(self, p, vector):
        if not (isinstance(vector, tuple) and len(vector) == self.dim):
            raise InputError(f"shift vector must have length {self.dim}, got {vector!r}")
        return tuple(a + b for a, b in zip(p, vector))

    def step(self, p, letter):
        # letter +k / -k moves along +e_k / -e_k (1-based)
        if not isinstance(letter, int) or letter == 0 or abs(letter) > self.dim:
            raise InputError(f"lattice letters are ±1..±{self.dim}, got {letter!r}")
        q = list(p)
        q[abs(letter) - 1] += 1 if letter > 0 else -1
        return tuple(q)

    def letters(self):
        return tuple(s * k for k in range(1, self.dim + 1) for s in (1, -1))

    def point_from_json(self, value):
        if not isinstance(value, list) or len(value) != self.dim:
            raise InputError(f"points of {self.name} are lists of {self.dim} integers")
        return tuple(_as_int(x) for x in value)

    def point_to_json(self, p):
        return list(p)

    def describe(self):
        return {"zoo": "Zd", "params": {"dim": self.dim, "norm": self.norm}}


class Tree(Geometry):
    """Rooted ``b``-ary tree with the path metric; vertices are digit tuples."""

    def __init__(self, branching: int):
        if _as_int(branching, "branching") < 1:
            raise InputError("branching must be >= 1")
        self.b = branching
        self.name = f"tree({branching})"

    def contains(self, p):
        return isinstance(p, tuple) and all(
            isinstance(x, int) and not isinstance(x, bool) and 0 <= x < self.b for x in p
        )

    def dist(self, p, q):
        n = 0
        for a, c in zip(p, q):
            if a != c:
                break
            n += 1
        return len(p) + len(q) - 2 * n

    def _descendants(self, node, depth, skip=None):
        out = [node]
        frontier = [node]
        for level in range(depth):
            nxt = []
            for v in frontier:
                for d in range(self.b):
                    if level == 0 and d == skip:
                        continue
                    nxt.append(v + (d,))
            out.extend(nxt)
            frontier = nxt
        return out

    def ball(self, center, r):
        k = _floor_radius(r)
        out = []
        for up in range(0, min(k, len(center)) + 1):
            anc = center[: len(center) - up]
            skip = center[len(center) - up] if up > 0 else None
            out.extend(self._descendants(anc, k - up, skip))
        return sorted(out)

    def _rooted_size(self, k):
        if self.b == 1:
            return k + 1
        return (self.b ** (k + 1) - 1) // (self.b - 1)

    def ball_size(self, center, r, cap):
        k = _floor_radius(r)
        if center == ():
            return self._rooted_size(k)
        bound = (min(k, len(center)) + 1) * self._rooted_size(k)
        if bound > cap:
            return bound
        return len(self.ball(center, r))

    def origin(self):
        return ()

    def step(self, p, letter):
        if letter == -1:
            if not p:
                raise InputError("the root has no parent")
            return p[:-1]
        if not isinstance(letter, int) or not 0 <= letter < self.b:
            raise InputError(f"tree letters are digits 0..{self.b - 1} or -1 (parent)")
        return p + (letter,)

    def letters(self):
        return tuple(range(self.b))

    def point_from_json(self, value):
        if not isinstance(value, list):
            raise InputError("tree vertices are lists of digits")
        p = tuple(_as_int(x, "digit") for x in value)
        if not self.contains(p):
            raise InputError(f"{value!r} is not a vertex of {self.name}")
        return p

    def point_to_json(self, p):
        return list(p)

    def describe(self):
        return {"zoo": "tree", "params": {"branching": self.b}}


def _reduce_word(word):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class FreeGroup(Geometry):
    """Cayley graph of the free group; elements are reduced words in ±1..±rank."""

    def __init__(self, rank: int):
        if _as_int(rank, "rank") < 1:
            raise InputError("rank must be >= 1")
        self.rank = rank
        self.name = f"free({rank})"

    def contains(self, p):
        return (
            isinstance(p, tuple)
            and all(isinstance(x, int) and x != 0 and abs(x) <= self.rank for x in p)
            and _reduce_word(p) == p
        )

    def dist(self, p, q):
        n = 0
        for a, c in zip(p, q):
            if a != c:
                break
            n += 1
        return len(p) + len(q) - 2 * n

    def _words(self, k):
        gens = [s * g for g in range(1, self.rank + 1) for s in (1, -1)]
        out = [()]
        frontier = [()]
        for _ in range(k):
            nxt = []
            for w in frontier:
                for g in gens:
                    if w and w[-1] == -g:
                        continue
                    nxt.append(w + (g,))
            out.extend(nxt)
            frontier = nxt
        return out

    def ball(self, center, r):
        k = _floor_radius(r)
        return sorted({_reduce_word(center + w) for w in self._words(k)})

    def ball_size(self, center, r, cap):
        k = _floor_radius(r)
        n = 2 * self.rank
        return 1 + sum(n * (n - 1) ** (j - 1) for j in range(1, k + 1))

    def origin(self):
        return ()

    def step(self, p, letter):
        if not isinstance(letter, int) or letter == 0 or abs(letter) > self.rank:
            raise InputError(f"free group letters are ±1..±{self.rank}")
        # p is reduced, so only the last letter can cancel
        if p and p[-1] == -letter:
            return p[:-1]
        return p + (letter,)

    def letters(self):
        return tuple(s * g for g in range(1, self.rank + 1) for s in (1, -1))

    def point_from_json(self, value):
        if not isinstance(value, list):
            raise InputError("free group elements are lists of letters")
        p = _reduce_word(tuple(_as_int(x, "letter") for x in value))
        if not self.contains(p):
            raise InputError(f"{value!r} is not a word in {self.name}")
        return p

    def point_to_json(self, p):
        return list(p)

    def describe(self):
        return {"zoo": "cayley", "params": {"group": "free", "rank": self.rank}}


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def _mat_inverse(m):
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise InputError("generator matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    inv = [row[n:] for row in aug]
    if any(x.denominator != 1 for row in inv for x in row):
        raise InputError("generator matrix is not invertible over the integers")
    return tuple(tuple(int(x) for x in row) for row in inv)


class MatrixGroup(Geometry):
    """Cayley graph of the group generated by integer unimodular matrices.

    The word metric is computed by breadth-first search from the identity,
    extended lazily sphere by sphere and shared across queries.
    """

    MAX_ELEMENTS = 2_000_000

    def __init__(self, generators):
        gens = []
        for g in generators:
            if isinstance(g, list):
                g = tuple(tuple(_as_int(x, "matrix entry") for x in row) for row in g)
            gens.append(g)
        if not gens:
            raise InputError("a matrix group needs at least one generator")
        n = len(gens[0])
        for g in gens:
            if len(g) != n or any(len(row) != n for row in g):
                raise InputError("generators must be square matrices of one size")
        self.n = n
        self.generators = tuple(gens)
        self.inverses = tuple(_mat_inverse(g) for g in gens)
        self.identity = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        self.name = "cayley" + repr([[list(r) for r in g] for g in gens]).replace(" ", "")
        self._length = {self.identity: 0}
        self._spheres = [[self.identity]]

    def _moves(self):
        return self.generators + self.inverses

    def _grow(self):
        frontier = self._spheres[-1]
        k = len(self._spheres)
        nxt = []
        for g in frontier:
            for m in self._moves():
                h = _mat_mul(g, m)
                if h not in self._length:
                    self._length[h] = k
                    nxt.append(h)
        if len(self._length) > self.MAX_ELEMENTS:
            raise InputError(f"{self.name}: word-metric search exceeded {self.MAX_ELEMENTS} elements")
        self._spheres.append(nxt)
        return bool(nxt)

    def _ensure(self, k):
        while len(self._spheres) <= k:
            if not self._grow():
                break

    def word_length(self, g) -> int:
        while g not in self._length:
            if not self._grow():
                raise InputError(f"{g!r} is not in the group")
        return self._length[g]

    def contains(self, p):
        return (
            isinstance(p, tuple)
            and len(p) == self.n
            and all(isinstance(row, tuple) and len(row) == self.n for row in p)
            and all(isinstance(x, int) and not isinstance(x, bool) for row in p for x in row)
        )

    def _inverse(self, g):
        return _mat_inverse(g)

    def dist(self, p, q):
        if p == q:
            return 0
        return self.word_length(_mat_mul(self._inverse(p), q))

    def _identity_ball(self, k):
        self._ensure(k)
        out = []
        for sphere in self._spheres[: k + 1]:
            out.extend(sphere)
        return out

    def ball(self, center, r):
        k = _floor_radius(r)
        return sorted(_mat_mul(center, w) for w in self._identity_ball(k))

    def ball_size(self, center, r, cap):
        k = _floor_radius(r)
        total = 0
        for j in range(k + 1):
            if j >= len(self._spheres):
                if total > cap or not self._grow():
                    break
            if j < len(self._spheres):
                total += len(self._spheres[j])
            if total > cap:
                return total
        return total

    def origin(self):
        return self.identity

    def step(self, p, letter):
        if not isinstance(letter, int) or letter == 0 or abs(letter) > len(self.generators):
            raise InputError(f"matrix group letters are ±1..±{len(self.generators)}")
        m = self.generators[letter - 1] if letter > 0 else self.inverses[-letter - 1]
        return _mat_mul(p, m)

    def letters(self):
        return tuple(s * g for g in range(1, len(self.generators) + 1) for s in (1, -1))

    def point_from_json(self, value):
        if not isinstance(value, list):
            raise InputError("matrix group elements are nested lists")
        p = tuple(tuple(_as_int(x, "matrix entry") for x in row) for row in value)
        if not self.contains(p):
            raise InputError(f"{value!r} is not a {self.n}x{self.n} integer matrix")
        return p

    def point_to_json(self, p):
        return [list(row) for row in p]

    def describe(self):
        return {
            "zoo": "cayley",
            "params": {"group": "matrix", "generators": [[list(r) for r in g] for g in self.generators]},
        }


class DisjointUnion(Geometry):
    """Parts at infinite distance from each other; points are ``(part, point)``."""

    def __init__(self, parts):
        if not parts:
            raise InputError("a disjoint union needs at least one part")
        self.parts = tuple(parts)
        self.name = "disjoint(" + ",".join(p.name for p in self.parts) + ")"

    def contains(self, p):
        return (
            isinstance(p, tuple)
            and len(p) == 2
            and isinstance(p[0], int)
            and 0 <= p[0] < len(self.parts)
            and self.parts[p[0]].contains(p[1])
        )

    def dist(self, p, q):
        if p[0] != q[0]:
            return INF
        return self.parts[p[0]].dist(p[1], q[1])

    def ball(self, center, r):
        i, c = center
        return [(i, q) for q in self.parts[i].ball(c, r)]

    def neighbors(self, p, K):
        i, c = p
        return [(i, q) for q in self.parts[i].neighbors(c, K)]

    def ball_size(self, center, r, cap):
        return self.parts[center[0]].ball_size(center[1], r, cap)

    def origin(self):
        return (0, self.parts[0].origin())

    def unit(self):
        return max(p.unit() for p in self.parts)

    def shift(self, p, vector):
        return (p[0], self.parts[p[0]].shift(p[1], vector))

    def step(self, p, letter):
        return (p[0], self.parts[p[0]].step(p[1], letter))

    def letters(self):
        seen = []
        for part in self.parts:
            for letter in part.letters():
                if letter not in seen:
                    seen.append(letter)
        return tuple(seen)

    def point_from_json(self, value):
        if not (isinstance(value, list) and len(value) == 2):
            raise InputError("disjoint-union points are [part, point]")
        i = _as_int(value[0], "part index")
        if not 0 <= i < len(self.parts):
            raise InputError(f"part index {i} out of range")
        return (i, self.parts[i].point_from_json(value[1]))

    def point_to_json(self, p):
        return [p[0], self.parts[p[0]].point_to_json(p[1])]

    def describe(self):
        return {"zoo": "disjoint_union", "params": {"parts": [p.describe() for p in self.parts]}}


class Rescaled(Geometry):
    """Same points, metric multiplied by a positive rational factor."""

    def __init__(self, factor, inner: Geometry):
        factor = extdist.parse_rational(factor)
        if factor <= 0:
            raise InputError("rescaling factor must be positive")
        self.factor = factor
        self.inner = inner
        self.name = f"rescale({extdist.to_json(Fraction(factor))},{inner.name})"

    def contains(self, p):
        return self.inner.contains(p)

    def dist(self, p, q):
        d = self.inner.dist(p, q)
        return INF if d is INF else extdist.normalize(self.factor * d)

    def ball(self, center, r):
        return self.inner.ball(center, Fraction(extdist.parse(r)) / self.factor)

    def neighbors(self, p, K):
        return self.inner.neighbors(p, Fraction(extdist.parse(K)) / self.factor)

    def ball_size(self, center, r, cap):
        return self.inner.ball_size(center, Fraction(extdist.parse(r)) / self.factor, cap)

    def origin(self):
        return self.inner.origin()

    def unit(self):
        return extdist.normalize(self.factor * self.inner.unit())

    def shift(self, p, vector):
        return self.inner.shift(p, vector)

    def step(self, p, letter):
        return self.inner.step(p, letter)

    def letters(self):
        return self.inner.letters()

    def point_from_json(self, value):
        return self.inner.point_from_json(value)

    def point_to_json(self, p):
        return self.inner.point_to_json(p)

    def describe(self):
        return {
            "zoo": "rescale",
            "params": {"factor": extdist.to_json(Fraction(self.factor)), "space": self.inner.describe()},
        }


# construction from descriptions --------------------------------------------

ZOO_KINDS = {
    "N": "natural numbers with |x - y|",
    "Z": "integers with |x - y|",
    "Zd": "integer lattice Z^d; params dim, norm ('l1' | 'linf')",
    "tree": "rooted b-ary tree with the path metric; params branching",
    "cayley": "Cayley graph word metric; params group 'free' + rank, or 'matrix' + generators",
    "disjoint_union": "parts at infinite distance; params parts (list of space objects)",
    "rescale": "metric multiplied by factor; params factor, space",
}


def _reject_unknown(obj: dict, allowed, where):
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise InputError(f"{where}: unknown field(s) {', '.join(extra)}")


def geometry_from_json(desc) -> Geometry:
    if not isinstance(desc, dict):
        raise InputError("space description must be a JSON object")
    _reject_unknown(desc, ("zoo", "params", "base", "schema"), "space")
    kind = desc.get("zoo")
    params = desc.get("params", {})
    if not isinstance(params, dict):
        raise InputError("space params must be an object")

    def need(*keys, optional=()):
        _reject_unknown(params, keys + tuple(optional), f"params of {kind}")
        missing = [k for k in keys if k not in params]
        if missing:
            raise InputError(f"params of {kind}: missing {', '.join(missing)}")

    if kind == "N":
        need()
        return Naturals()
    if kind == "Z":
        need()
        return Integers()
    if kind == "Zd":
        need("dim", optional=("norm",))
        return Lattice(params["dim"], params.get("norm", "l1"))
    if kind == "tree":
        need("branching")
        return Tree(params["branching"])
    if kind == "cayley":
        group = params.get("group")
        if group == "free":
            need("group", "rank")
            return FreeGroup(params["rank"])
        if group == "matrix":
            need("group", "generators")
            return MatrixGroup(params["generators"])
        raise InputError(f"cayley group must be 'free' or 'matrix', got {group!r}")
    if kind == "disjoint_union":
        need("parts")
        if not isinstance(params["parts"], list):
            raise InputError("disjoint_union parts must be a list")
        return DisjointUnion([geometry_from_json(p) for p in params["parts"]])
    if kind == "rescale":
        need("factor", "space")
        return Rescaled(params["factor"], geometry_from_json(params["space"]))
    raise InputError(f"unknown zoo kind {kind!r}; expected one of {', '.join(ZOO_KINDS)}")


def space_from_json(desc) -> SpaceModel:
    geometry = geometry_from_json(desc)
    base = geometry.point_from_json(desc["base"]) if "base" in desc else geometry.origin()
    return SpaceModel(geometry, base)


def space_to_json(space: SpaceModel) -> dict:
    out = dict(space.geometry.describe())
    out["base"] = space.geometry.point_to_json(space.base)
    return out


# convenience constructors ------------------------------------------------


def naturals() -> SpaceModel:
    return SpaceModel(Naturals(), 0)


def integers(base=0) -> SpaceModel:
    return SpaceModel(Integers(), base)


def lattice(dim: int, norm: str = "l1") -> SpaceModel:
    g = Lattice(dim, norm)
    return SpaceModel(g, g.origin())


def tree(branching: int = 2) -> SpaceModel:
    return SpaceModel(Tree(branching), ())


def free_group(rank: int = 2) -> SpaceModel:
    return SpaceModel(FreeGroup(rank), ())


def matrix_group(generators) -> SpaceModel:
    g = MatrixGroup(generators)
    return SpaceModel(g, g.identity)


def disjoint_union(*spaces: SpaceModel, part: int = 0) -> SpaceModel:
    g = DisjointUnion([s.geometry for s in spaces])
    return SpaceModel(g, (part, spaces[part].base))


def rescale(space: SpaceModel, factor) -> SpaceModel:
    return SpaceModel(Rescaled(factor, space.geometry), space.base)
