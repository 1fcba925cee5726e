"""Maps between pointed spaces and horizon-qualified certificates for the
map classes of coarse geometry (proper, bornologous, coarse, bornotopic,
coarse equivalence).

Verdicts follow a doubling rule: a property passes only when the measured
quantity agrees at horizon ``h`` and ``2h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import extdist
from .errors import InputError
from .extdist import INF, ExtDist
from .space import SpaceModel

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

# exact diameters above this many points are replaced by the radius bound
_DIAMETER_LIMIT = 2000


class MapModel:
    """A point map ``source -> target`` with a name and optional JSON form."""

    def __init__(self, source: SpaceModel, target: SpaceModel, fn: Callable, name: str, desc=None):
        self.source = source
        self.target = target
        self._fn = fn
        self.name = name
        self.desc = desc

    def __call__(self, p):
        q = self._fn(p)
        if not self.target.geometry.contains(q):
            raise InputError(f"{self.name}: image {q!r} of {p!r} is not a point of {self.target.name}")
        return q

    def preserves_base(self) -> bool:
        return self(self.source.base) == self.target.base

    def to_json(self):
        if self.desc is None:
            raise InputError(f"map {self.name} has no declarative form")
        return self.desc

    def __repr__(self):
        return f"MapModel({self.name}: {self.source.name} -> {self.target.name})"


def identity_map(space: SpaceModel) -> MapModel:
    return MapModel(space, space, lambda p: p, "id", {"kind": "identity"})


def compose_maps(f: MapModel, g: MapModel) -> MapModel:
    """``f ∘ g``: apply ``g`` first."""
    if g.target != f.source:
        if g.target.geometry != f.source.geometry:
            raise InputError(f"cannot compose: {g.name} lands in {g.target.name}, {f.name} starts in {f.source.name}")
    desc = None
    if f.desc is not None and g.desc is not None:
        steps = []
        for m in (g, f):
            steps.extend(m.desc["maps"] if m.desc.get("kind") == "compose" else [m.desc])
        desc = {"kind": "compose", "maps": steps}
    return MapModel(g.source, f.target, lambda p: f(g(p)), f"{f.name}∘{g.name}", desc)


# declarative maps ----------------------------------------------------------


def _vec(p):
    return (p,) if isinstance(p, int) else tuple(p)


def _unvec(v, target: SpaceModel):
    if isinstance(target.base, int):
        if len(v) != 1:
            raise InputError(f"{target.name} points are integers, got a vector of length {len(v)}")
        return v[0]
    return tuple(v)


def _reject_unknown(desc, allowed):
    extra = sorted(set(desc) - set(allowed) - {"kind", "schema", "name"})
    if extra:
        raise InputError(f"map {desc.get('kind')!r}: unknown field(s) {', '.join(extra)}")


def map_from_json(desc, source: SpaceModel, target: SpaceModel | None = None) -> MapModel:
    """Build a MapModel from its JSON description.

    ``compose`` lists maps in pipeline order (first applied first); an
    inner step may carry a ``"target"`` space object, otherwise it lands in
    the overall target.
    """
    from .zoo import space_from_json

    if not isinstance(desc, dict):
        raise InputError("map description must be a JSON object")
    target = target or source
    kind = desc.get("kind")
    name = desc.get("name", kind)

    if kind == "identity":
        _reject_unknown(desc, ())
        return MapModel(source, target, lambda p: p, name or "id", desc)

    if kind == "constant":
        _reject_unknown(desc, ("value",))
        value = target.geometry.point_from_json(desc["value"]) if "value" in desc else target.base
        return MapModel(source, target, lambda p: value, name, desc)

    if kind == "affine":
        _reject_unknown(desc, ("a", "b"))
        a = extdist.parse_rational(desc.get("a", 1))
        b = extdist.parse_rational(desc.get("b", 0))

        def affine(x):
            if not isinstance(x, int):
                raise InputError(f"affine maps act on integer points, got {x!r}")
            return math.floor(Fraction(a) * x + b)

        return MapModel(source, target, affine, name, desc)

    if kind == "polynomial":
        _reject_unknown(desc, ("coeffs",))
        coeffs = [extdist.parse_rational(c) for c in desc.get("coeffs", [])]
        if not coeffs:
            raise InputError("polynomial map needs coeffs")

        def poly(x):
            return math.floor(sum(Fraction(c) * x**k for k, c in enumerate(coeffs)))

        return MapModel(source, target, poly, name, desc)

    if kind == "linear":
        _reject_unknown(desc, ("matrix", "offset"))
        matrix = desc.get("matrix")
        if not (isinstance(matrix, list) and matrix and all(isinstance(r, list) for r in matrix)):
            raise InputError("linear map needs a matrix (list of rows)")
        rows = [[extdist.parse_rational(x) for x in row] for row in matrix]
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise InputError("linear map matrix rows must have equal length")
        offset = [extdist.parse_rational(x) for x in desc.get("offset", [0] * len(rows))]
        if len(offset) != len(rows):
            raise InputError("linear map offset must match the matrix height")

        def linear(p):
            v = _vec(p)
            if len(v) != width:
                raise InputError(f"linear map expects {width} coordinates, got {p!r}")
            out = [math.floor(sum(Fraction(c) * x for c, x in zip(row, v)) + o) for row, o in zip(rows, offset)]
            return _unvec(out, target)

        return MapModel(source, target, linear, name, desc)

    if kind == "word":
        _reject_unknown(desc, ("images",))
        images = desc.get("images")
        if not isinstance(images, dict):
            raise InputError("word map needs an images object letter -> list of letters")
        table = {}
        for k, v in images.items():
            try:
                letter = int(k)
            except ValueError as exc:
                raise InputError(f"word map letter {k!r} is not an integer") from exc
            if not isinstance(v, list):
                raise InputError("word map images are lists of letters")
            table[letter] = tuple(v)
        geo = target.geometry

        def word(p):
            q = target.base
            for letter in p:
                if letter in table:
                    img = table[letter]
                elif -letter in table and letter < 0:
                    img = tuple(-x for x in reversed(table[-letter]))
                else:
                    raise InputError(f"word map has no image for letter {letter}")
                for x in img:
                    q = geo.step(q, x)
            return q

        return MapModel(source, target, word, name, desc)

    if kind == "compose":
        _reject_unknown(desc, ("maps",))
        steps = desc.get("maps")
        if not isinstance(steps, list) or not steps:
            raise InputError("compose needs a non-empty list of maps")
        current = identity_map(source)
        for i, step in enumerate(steps):
            if not isinstance(step, dict):
                raise InputError("compose entries must be map objects")
            step = dict(step)
            tgt = space_from_json(step.pop("target")) if "target" in step else target
            if i == len(steps) - 1:
                tgt = target
            m = map_from_json(step, current.target, tgt)
            current = compose_maps(m, current)
        return MapModel(source, target, current._fn, name or current.name, desc)

    raise InputError(
        f"unknown map kind {kind!r}; expected identity, constant, affine, polynomial, linear, word or compose"
    )


# certificates --------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of one horizon-qualified check.

    ``witness`` is a pair of points for a failure (for bornotopy the source
    point and its two images); ``evidence`` holds the measured values at
    each horizon.
    """

    kind: str
    scale_in: ExtDist
    scale_out: ExtDist
    horizon: ExtDist
    verdict: str
    witness: tuple | None = None
    evidence: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json(self, point_json=lambda p: p) -> dict:
        out = {
            "kind": self.kind,
            "scale_in": extdist.to_json(self.scale_in),
            "scale_out": extdist.to_json(self.scale_out),
            "horizon": extdist.to_json(self.horizon),
            "verdict": self.verdict,
            "evidence": {str(k): extdist.to_json(v) if _is_dist(v) else v for k, v in self.evidence.items()},
        }
        if self.witness is not None:
            out["witness"] = [point_json(p) for p in self.witness]
        return out


def _is_dist(v):
    return v is INF or isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _finite(x, what):
    x = extdist.parse(x)
    if x is INF:
        raise InputError(f"{what} must be finite")
    return x


def _lipschitz(f: MapModel, K, r):
    """``sup d_Y(fx, fy)`` over ``x, y`` in ``ball(r)`` with ``d_X(x, y) <= K``."""
    geo = f.source.geometry
    pts = f.source.enumerate(r)
    inside = set(pts)
    images = {x: f(x) for x in pts}
    tgt = f.target.geometry
    best, pair = 0, None
    for x in pts:
        fx = images[x]
        for y in geo.neighbors(x, K):
            if y == x or y not in inside:
                continue
            d = tgt.dist(fx, images[y])
            if d > best:
                best, pair = d, (x, y)
                if best is INF:
                    return best, pair
    return best, pair


def certify_bornologous(f: MapModel, K, r=16) -> Certificate:
    """Measure ``L(r) = sup{d(fx, fy) : x, y ∈ ball(r), d(x, y) <= K}``.

    Pass when ``L(r) = L(2r)``; fail when ∞ appears or ``L`` strictly grows
    over ``r < 2r < 4r`` (the witness is the maximizing pair at ``4r``);
    inconclusive otherwise.
    """
    K = _finite(K, "scale K")
    r = _finite(r, "horizon r")
    L1, p1 = _lipschitz(f, K, r)
    L2, p2 = _lipschitz(f, K, 2 * r)
    evidence = {f"L({extdist.to_json(r)})": L1, f"L({extdist.to_json(2 * r)})": L2}
    if L2 is INF:
        return Certificate("bornologous", K, INF, 2 * r, FAIL, p2, evidence)
    if L1 == L2:
        return Certificate("bornologous", K, L1, 2 * r, PASS, None, evidence)
    L4, p4 = _lipschitz(f, K, 4 * r)
    evidence[f"L({extdist.to_json(4 * r)})"] = L4
    if L4 is INF or L4 > L2:
        return Certificate("bornologous", K, L4, 4 * r, FAIL, p4, evidence)
    return Certificate("bornologous", K, L2, 4 * r, INCONCLUSIVE, None, evidence)


def _diameter(geo, pts):
    if len(pts) <= _DIAMETER_LIMIT:
        best = 0
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                d = geo.dist(p, q)
                if d > best:
                    best = d
        return best
    return None


def certify_proper(f: MapModel, rho, horizon=16) -> Certificate:
    """Compare ``f^{-1}(ball_Y(rho)) ∩ ball_X(h)`` at ``h`` and ``2h``.

    Pass when the preimage stops growing; otherwise inconclusive with the
    farthest new preimage point as witness.
    """
    rho = _finite(rho, "radius rho")
    h = _finite(horizon, "horizon")
    tgt = f.target

    def preimage(radius):
        return [x for x in f.source.enumerate(radius) if tgt.radius(f(x)) <= rho]

    P1, P2 = preimage(h), preimage(2 * h)
    geo = f.source.geometry
    diam = _diameter(geo, P1)
    evidence = {"preimage_size(h)": len(P1), "preimage_size(2h)": len(P2)}
    if diam is None:
        radius = max((f.source.radius(x) for x in P1), default=0)
        diam = 2 * radius if radius is not INF else INF
        evidence["diameter_is_bound"] = True
    if set(P1) == set(P2):
        return Certificate("proper", rho, diam, 2 * h, PASS, None, evidence)
    new = sorted(set(P2) - set(P1), key=lambda x: (f.source.radius(x), x))
    return Certificate("proper", rho, diam, 2 * h, INCONCLUSIVE, (new[-1], f(new[-1])), evidence)


def _check_parallel(f: MapModel, g: MapModel):
    if f.source.geometry != g.source.geometry or f.target.geometry != g.target.geometry:
        raise InputError(f"{f.name} and {g.name} do not share source and target")


def _displacement(f, g, r):
    best, arg = 0, None
    tgt = f.target.geometry
    for x in f.source.enumerate(r):
        d = tgt.dist(f(x), g(x))
        if d > best:
            best, arg = d, x
    return best, arg


def certify_bornotopic(f: MapModel, g: MapModel, r=16) -> Certificate:
    """``D(r) = sup{d(fx, gx) : x ∈ ball(r)}``; pass iff finite and ``D(2r) <= D(r)``."""
    _check_parallel(f, g)
    r = _finite(r, "horizon r")
    D1, _ = _displacement(f, g, r)
    D2, x2 = _displacement(f, g, 2 * r)
    evidence = {f"D({extdist.to_json(r)})": D1, f"D({extdist.to_json(2 * r)})": D2}
    if D2 is not INF and D2 <= D1:
        return Certificate("bornotopy", 0, D1, 2 * r, PASS, None, evidence)
    witness = (x2, f(x2), g(x2)) if x2 is not None else None
    return Certificate("bornotopy", 0, D2, 2 * r, FAIL, witness, evidence)


def _combine(verdicts):
    if any(v == FAIL for v in verdicts):
        return FAIL
    if all(v == PASS for v in verdicts):
        return PASS
    return INCONCLUSIVE


def certify_coarse(f: MapModel, K=1, r=16, rho=None) -> Certificate:
    """Proper and bornologous at the given scales."""
    born = certify_bornologous(f, K, r)
    prop = certify_proper(f, rho if rho is not None else K, r)
    evidence = {"bornologous": born.verdict, "proper": prop.verdict}
    witness = born.witness if born.verdict == FAIL else prop.witness
    verdict = _combine([born.verdict, prop.verdict])
    return Certificate("coarse", born.scale_in, born.scale_out, born.horizon, verdict, witness if verdict != PASS else None, evidence)


@dataclass
class CertificateBundle:
    """Every certificate produced for one map (or one pair of maps)."""

    certificates: dict
    base_preserving: dict

    def verdict(self, kind: str) -> str:
        return self.certificates[kind].verdict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates.values())


def verify_map(f: MapModel, K=1, r=16, rho=None) -> CertificateBundle:
    """Bornologous, proper, coarse and (self-)bornotopy certificates for ``f``."""
    certs = {
        "bornologous": certify_bornologous(f, K, r),
        "proper": certify_proper(f, rho if rho is not None else K, r),
        "coarse": certify_coarse(f, K, r, rho),
        "bornotopy": certify_bornotopic(f, f, r),
    }
    return CertificateBundle(certs, {f.name: f.preserves_base()})


def certify_coarse_equivalence(f: MapModel, g: MapModel, K=1, r=16, rho=None) -> CertificateBundle:
    """``f: X -> Y`` and ``g: Y -> X`` coarse with both composites close to the identity."""
    if f.target.geometry != g.source.geometry or g.target.geometry != f.source.geometry:
        raise InputError(f"{f.name} and {g.name} are not maps in opposite directions")
    gf = compose_maps(g, f)
    fg = compose_maps(f, g)
    certs = {
        "coarse[f]": certify_coarse(f, K, r, rho),
        "coarse[g]": certify_coarse(g, K, r, rho),
        "bornotopy[g∘f~id]": certify_bornotopic(gf, identity_map(f.source), r),
        "bornotopy[f∘g~id]": certify_bornotopic(fg, identity_map(g.source), r),
    }
    return CertificateBundle(certs, {"f": f.preserves_base(), "g": g.preserves_base()})
