"""Finitely described coarse sequences ``s: (N, 0) -> (X, ξ)``.

Every kind evaluates deterministically at any index inside its horizon
(``horizon is None`` means the description covers all of N) and carries a
declared jump bound, the bornologous witness at the scale of N's generators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

from .. import extdist
from ..errors import CertificationError, HorizonError, InputError
from ..extdist import INF, ExtDist
from ..space import SpaceModel

TRUE = "true"
FALSE = "false"
UNKNOWN = "unknown"


# strictly monotone index maps ---------------------------------------------


class MonotoneWitness:
    """A strictly increasing map ``κ: N -> N``.

    Given by explicit ``values`` for the first indices, continued by an affine
    rule ``i ↦ slope·i + offset`` or by a derived callable ``fn`` (defined up
    to ``limit``). With neither, the domain ends at ``len(values) - 1``.
    """

    def __init__(self, values=(), slope=None, offset=0, fn: Callable | None = None, limit=None, label=None):
        self.values = tuple(int(v) for v in values)
        self.slope = slope
        self.offset = offset
        self.fn = fn
        self.limit = limit
        self.label = label
        if any(v < 0 for v in self.values):
            raise InputError("witness values must be natural numbers")
        for i, (a, b) in enumerate(zip(self.values, self.values[1:])):
            if b <= a:
                raise InputError(f"witness is not strictly increasing at index {i + 1}")
        if slope is not None:
            if not isinstance(slope, int) or slope < 1 or not isinstance(offset, int):
                raise InputError("affine witness rule needs an integer slope >= 1 and integer offset")
            n = len(self.values)
            if slope * n + offset < 0 or (n and slope * n + offset <= self.values[-1]):
                raise InputError("affine witness rule does not continue the explicit values monotonically")
        if not self.values and fn is None and slope is None:
            raise InputError("empty witness")

    @classmethod
    def identity(cls):
        return cls((), 1, 0, label="id")

    @classmethod
    def affine(cls, slope: int, offset: int = 0):
        return cls((), slope, offset, label=f"{slope}i+{offset}")

    @property
    def horizon(self) -> int | None:
        """Last index of the domain, or None when unbounded."""
        if self.slope is not None:
            return None
        if self.fn is not None:
            return self.limit
        return len(self.values) - 1

    def __call__(self, i: int) -> int:
        if i < 0:
            raise InputError("witness indices are natural numbers")
        if i < len(self.values):
            return self.values[i]
        if self.slope is not None:
            return self.slope * i + self.offset
        if self.fn is not None and (self.limit is None or i <= self.limit):
            return self.fn(i)
        raise HorizonError(f"witness undefined at {i} (domain ends at {self.horizon})")

    def defined(self, i: int) -> bool:
        h = self.horizon
        return i >= 0 and (h is None or i <= h)

    def table(self, n: int) -> list[int]:
        """``[κ(0), ..., κ(n)]``, truncated to the domain."""
        h = self.horizon
        top = n if h is None else min(n, h)
        return [self(i) for i in range(top + 1)]

    def with_value(self, i: int, value: int) -> "MonotoneWitness":
        """Copy with ``κ(i)`` replaced (monotonicity rechecked)."""
        h = self.horizon
        n = max(len(self.values), i + 1)
        if h is not None:
            n = min(n, h + 1)
        vals = [self(k) for k in range(n)]
        vals[i] = value
        return MonotoneWitness(vals, self.slope, self.offset, self.fn, self.limit, self.label)

    def last_preimage(self, j: int) -> int:
        """Largest ``n`` in the domain with ``κ(n) <= j`` (``-1`` if none)."""
        if self(0) > j:
            return -1
        lo, hi = 0, 1
        h = self.horizon
        while (h is None or hi <= h) and self(hi) <= j:
            lo, hi = hi, hi * 2
        if h is not None:
            hi = min(hi, h + 1)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self(mid) <= j:
                lo = mid
            else:
                hi = mid
        return lo

    def max_step(self) -> int:
        """Largest gap ``κ(i+1) - κ(i)`` known in closed form (explicit part and rule)."""
        n = len(self.values)
        steps = [b - a for a, b in zip(self.values, self.values[1:])]
        if self.slope is not None:
            steps.append(self.slope)
            if n:
                steps.append(self(n) - self.values[-1])
        elif self.fn is not None:
            raise InputError("the step of a derived witness has no closed form")
        return max(steps, default=1)

    def to_json(self, n: int = 64):
        out = {"values": self.table(n) if self.slope is None else list(self.values)}
        if self.slope is not None:
            out["slope"] = self.slope
            out["offset"] = self.offset
        return out

    @classmethod
    def from_json(cls, desc):
        if isinstance(desc, list):
            return cls(desc)
        if not isinstance(desc, dict):
            raise InputError("witness must be a list or an object")
        extra = set(desc) - {"values", "slope", "offset"}
        if extra:
            raise InputError(f"witness: unknown field(s) {', '.join(sorted(extra))}")
        return cls(desc.get("values", ()), desc.get("slope"), desc.get("offset", 0))

    def __repr__(self):
        if self.label:
            return f"MonotoneWitness({self.label})"
        return f"MonotoneWitness({list(self.values[:8])}{'...' if len(self.values) > 8 else ''})"


def compose_witnesses(outer: MonotoneWitness, inner: MonotoneWitness) -> MonotoneWitness:
    """``outer ∘ inner``: if ``s = t∘inner`` and ``t = u∘outer`` then ``s = u∘(outer∘inner)``."""
    if outer.slope is not None and inner.slope is not None and not outer.values and not inner.values:
        return MonotoneWitness.affine(outer.slope * inner.slope, outer.slope * inner.offset + outer.offset)
    limit = inner.horizon
    oh = outer.horizon
    if oh is not None:
        cap = inner.last_preimage(oh)
        if cap < 0:
            raise InputError("witness composition has an empty domain")
        limit = cap if limit is None else min(limit, cap)
    return MonotoneWitness((), fn=lambda i: outer(inner(i)), limit=limit, label="composite")


def replay_witness(s, t, kappa: MonotoneWitness, n: int) -> int | None:
    """First ``i <= n`` with ``s(i) != t(κ(i))`` (or outside a domain); None if all agree."""
    for i in range(n + 1):
        try:
            if s(i) != t(kappa(i)):
                return i
        except HorizonError:
            return i
    return None


@dataclass(frozen=True)
class Verdict:
    """Three-valued answer for an infinitary relation checked at a horizon."""

    status: str
    witness: MonotoneWitness | None = None
    counterexample: int | None = None
    horizon: tuple = ()
    reason: str = ""

    def __bool__(self):
        return self.status == TRUE

    def to_json(self) -> dict:
        out = {"status": self.status, "horizon": list(self.horizon)}
        if self.witness is not None:
            out["witness"] = self.witness.table(self.horizon[0] if self.horizon else 16)
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.reason:
            out["reason"] = self.reason
        return out


# sequences -------------------------------------------------------------


def _check_index(i):
    if isinstance(i, bool) or not isinstance(i, int) or i < 0:
        raise InputError(f"sequence indices are natural numbers, got {i!r}")


class CoarseSequence:
    """Base class; subclasses implement ``_eval`` and ``describe``."""

    kind = "sequence"
    space: SpaceModel
    bound: ExtDist
    horizon: int | None = None

    def __init__(self, space: SpaceModel):
        self.space = space
        self._cache: dict = {}
        self._radii: dict = {}

    def __call__(self, i: int):
        if i in self._cache:
            return self._cache[i]
        _check_index(i)
        if self.horizon is not None and i > self.horizon:
            raise HorizonError(f"{self.kind} sequence is described up to index {self.horizon}, asked for {i}")
        p = self._eval(i)
        self._cache[i] = p
        return p

    def _eval(self, i):
        raise NotImplementedError

    def defined(self, i: int) -> bool:
        return self.horizon is None or i <= self.horizon

    def top(self, n: int) -> int:
        """``min(n, horizon)``."""
        return n if self.horizon is None else min(n, self.horizon)

    def values(self, n: int) -> list:
        """``[s(0), ..., s(n)]`` truncated to the horizon."""
        return [self(i) for i in range(self.top(n) + 1)]

    def radius(self, i: int) -> ExtDist:
        r = self._radii.get(i)
        if r is None:
            r = self._radii[i] = self.space.radius(self(i))
        return r

    def describe(self) -> dict:
        raise NotImplementedError

    def key(self) -> str:
        return json.dumps(self.canonical().describe(), sort_keys=True)

    def canonical(self) -> "CoarseSequence":
        return self

    def to_json(self) -> dict:
        return self.describe()

    def __repr__(self):
        return f"<{type(self).__name__} in {self.space.name} bound={self.bound}>"


def eval_seq(s: CoarseSequence, i: int):
    return s(i)


def _jump_sup(seq: CoarseSequence, stop: int):
    geo = seq.space.geometry
    best, arg = 0, None
    prev = seq(0)
    for i in range(1, seq.top(stop) + 1):
        cur = seq(i)
        d = geo.dist(prev, cur)
        if d > best:
            best, arg = d, i - 1
        prev = cur
    return best, arg


def _declared(bound, computed):
    if bound is None:
        return computed
    return extdist.parse(bound)


def _scale_vector(v, k: int):
    if isinstance(v, tuple):
        return tuple(k * x for x in v)
    return k * v


class PrefixAffine(CoarseSequence):
    """Explicit prefix followed by an affine tail in a coordinate space.

    For ``i >= len(prefix)`` the value is ``p + (i div q)·v + offsets[i mod q]``
    with ``q = len(offsets)`` (``offsets`` defaults to the single zero
    shift). Without a tail the sequence is explicit and finite.
    """

    kind = "prefix_affine"

    def __init__(self, space: SpaceModel, prefix, p=None, v=None, offsets=None, bound=None):
        super().__init__(space)
        geo = space.geometry
        self.prefix = tuple(prefix)
        if not self.prefix:
            raise InputError("prefix must contain at least s(0)")
        for x in self.prefix:
            if not geo.contains(x):
                raise InputError(f"prefix point {x!r} is not a point of {space.name}")
        if self.prefix[0] != space.base:
            raise InputError(f"sequence starts at {self.prefix[0]!r}, not at the base point {space.base!r}")
        self.has_tail = p is not None
        if self.has_tail:
            if v is None:
                raise InputError("affine tail needs both p and v")
            if not geo.contains(p):
                raise InputError(f"tail anchor {p!r} is not a point of {space.name}")
            self.p, self.v = p, v
            zero = _scale_vector(v, 0)
            self.offsets = tuple(offsets) if offsets else (zero,)
            geo.shift(p, v)  # validates the vector shape
            self.horizon = None
            period = len(self.offsets)
            probe = len(self.prefix) + 2 * period + 1
        else:
            self.horizon = len(self.prefix) - 1
            probe = self.horizon
        computed, _ = _jump_sup(self, probe)
        self.computed_bound = computed
        self.bound = _declared(bound, computed)

    def _eval(self, i):
        if i < len(self.prefix):
            return self.prefix[i]
        q = len(self.offsets)
        geo = self.space.geometry
        x = geo.shift(self.p, _scale_vector(self.v, i // q))
        off = self.offsets[i % q]
        return geo.shift(x, off) if off != _scale_vector(self.v, 0) else x

    def describe(self):
        pj = self.space.geometry.point_to_json
        out = {"kind": self.kind, "prefix": [pj(x) for x in self.prefix], "bound": extdist.to_json(self.bound)}
        if self.has_tail:
            vj = list(self.v) if isinstance(self.v, tuple) else self.v
            out["tail"] = {"p": pj(self.p), "v": vj}
            if len(self.offsets) > 1:
                out["tail"]["offsets"] = [list(o) if isinstance(o, tuple) else o for o in self.offsets]
        return out


def explicit(space: SpaceModel, points, bound=None) -> PrefixAffine:
    """A finite sequence given point by point."""
    return PrefixAffine(space, points, bound=bound)


def ray(space: SpaceModel, v, bound=None) -> PrefixAffine:
    """``i ↦ ξ + i·v`` in a coordinate space."""
    return PrefixAffine(space, [space.base], space.base, v, bound=bound)


class RayRule(CoarseSequence):
    """Walk from the base point: apply ``path`` letters, then ``cycle`` forever."""

    kind = "ray_rule"

    def __init__(self, space: SpaceModel, path=(), cycle=(), bound=None):
        super().__init__(space)
        self.path = tuple(path)
        self.cycle = tuple(cycle)
        self._walk = [space.base]
        self.horizon = None if self.cycle else len(self.path)
        computed, _ = _jump_sup(self, len(self.path) + 2 * len(self.cycle) + 1)
        self.computed_bound = computed
        self.bound = _declared(bound, computed)

    def _letter(self, k):
        if k < len(self.path):
            return self.path[k]
        return self.cycle[(k - len(self.path)) % len(self.cycle)]

    def _eval(self, i):
        geo = self.space.geometry
        walk = self._walk
        while len(walk) <= i:
            walk.append(geo.step(walk[-1], self._letter(len(walk) - 1)))
        return walk[i]

    def describe(self):
        return {
            "kind": self.kind,
            "path": list(self.path),
            "cycle": list(self.cycle),
            "bound": extdist.to_json(self.bound),
        }


class Interleave(CoarseSequence):
    """``t(2j) = a(j)``, ``t(2j+1) = b(j)``.

    Refuses when the pointwise gap ``d(a(i), b(i))`` grows between the
    certification prefix ``N`` and ``2N``. The declared bound is the jump
    supremum over ``t(0..4N)``; the analytic bound ``gap + min(bound a,
    bound b)`` is kept as ``analytic_bound``.
    """

    kind = "interleave"

    def __init__(self, a: CoarseSequence, b: CoarseSequence, N: int = 256):
        if a.space != b.space:
            raise InputError("interleave needs two sequences in the same pointed space")
        super().__init__(a.space)
        self.a, self.b = a, b
        if a.horizon is None and b.horizon is None:
            self.horizon = None
        else:
            ha = a.horizon if a.horizon is not None else b.horizon + 1
            hb = b.horizon if b.horizon is not None else a.horizon
            # t(2j) needs a(j), t(2j+1) needs b(j)
            self.horizon = min(2 * ha, 2 * hb + 1)
        geo = a.space.geometry
        top = min(a.top(2 * N), b.top(2 * N))
        gaps = [geo.dist(a(i), b(i)) for i in range(top + 1)]
        g1 = extdist.ext_max(gaps[: min(N, top) + 1])
        g2 = extdist.ext_max(gaps)
        if g2 is INF or g2 > g1:
            idx = next(i for i, g in enumerate(gaps) if g == g2)
            raise CertificationError(f"pointwise gap grows ({extdist.to_json(g1)} -> {extdist.to_json(g2)}); not bornotopic", index=idx)
        self.gap = g2
        self.analytic_bound = g2 + min(a.bound, b.bound)
        computed, _ = _jump_sup(self, 4 * N)
        self.bound = computed

    def _eval(self, i):
        j, odd = divmod(i, 2)
        return self.b(j) if odd else self.a(j)

    def witnesses(self) -> tuple[MonotoneWitness, MonotoneWitness]:
        """``a = t∘(2i)`` and ``b = t∘(2i+1)``."""
        wa, wb = MonotoneWitness.affine(2, 0), MonotoneWitness.affine(2, 1)
        if self.horizon is not None:
            wa = MonotoneWitness([2 * i for i in range(self.horizon // 2 + 1)])
            wb = MonotoneWitness([2 * i + 1 for i in range((self.horizon - 1) // 2 + 1)])
        return wa, wb

    def describe(self):
        return {"kind": self.kind, "a": self.a.describe(), "b": self.b.describe()}


def interleave_even_odd(a: CoarseSequence, b: CoarseSequence, N: int = 256) -> Interleave:
    return Interleave(a, b, N)


class Transported(CoarseSequence):
    """Base swap: value ``ξ2`` at index 0 and ``s(i)`` for ``i > 0``."""

    kind = "transported"

    def __init__(self, s: CoarseSequence, new_base):
        geo = s.space.geometry
        if not geo.contains(new_base):
            raise InputError(f"{new_base!r} is not a point of {s.space.name}")
        if geo.dist(s.space.base, new_base) is INF:
            raise InputError("the new base point lies in a different coarsely connected component")
        super().__init__(s.space.with_base(new_base))
        self.inner = s
        self.horizon = s.horizon
        first = geo.dist(new_base, s(1)) if s.defined(1) else 0
        self.bound = extdist.ext_max([s.bound, first])

    def _eval(self, i):
        return self.space.base if i == 0 else self.inner(i)

    def describe(self):
        pj = self.space.geometry.point_to_json
        return {"kind": self.kind, "from": pj(self.inner.space.base), "seq": self.inner.describe()}


def transport_base(s: CoarseSequence, new_base) -> CoarseSequence:
    """``T21(s)``. Transporting back to the original base returns the original."""
    if new_base == s.space.base:
        return s
    if isinstance(s, Transported):
        if new_base == s.inner.space.base:
            return s.inner
        return Transported(s.inner, new_base)
    return Transported(s, new_base)


def transport_witness(kappa: MonotoneWitness) -> MonotoneWitness:
    """``κ'`` with ``κ'(0) = 0`` and ``κ'(i) = κ(i)`` otherwise."""
    if kappa(0) == 0:
        return kappa
    return kappa.with_value(0, 0)


class Reindexed(CoarseSequence):
    """``s∘κ`` for a strictly monotone ``κ`` with ``κ(0) = 0``."""

    kind = "reindexed"

    def __init__(self, s: CoarseSequence, kappa: MonotoneWitness):
        if kappa(0) != 0:
            raise InputError("a reindexing must fix 0 so the sequence stays anchored")
        super().__init__(s.space)
        self.inner, self.kappa = s, kappa
        limits = []
        if kappa.horizon is not None:
            limits.append(kappa.horizon)
        if s.horizon is not None:
            limits.append(kappa.last_preimage(s.horizon))
        self.horizon = min(limits) if limits else None
        try:
            step = kappa.max_step()
            self.bound = s.bound * step if s.bound is not INF else INF
        except InputError:
            self.bound, _ = _jump_sup(self, 256)

    def _eval(self, i):
        return self.inner(self.kappa(i))

    def describe(self):
        return {"kind": self.kind, "seq": self.inner.describe(), "witness": self.kappa.to_json()}


def even_subsequence(s: CoarseSequence) -> Reindexed:
    return Reindexed(s, MonotoneWitness.affine(2, 0))


class Pushforward(CoarseSequence):
    """``f∘s``; with ``rebase`` the value at 0 is replaced by the target base
    (the base-point transport), allowing maps that move the base."""

    kind = "pushforward"

    def __init__(self, f, s: CoarseSequence, rebase: bool = False, r=16):
        from ..maps import PASS, certify_coarse

        if f.source.geometry != s.space.geometry:
            raise InputError(f"{f.name} starts in {f.source.name}, the sequence lives in {s.space.name}")
        source = f.source if f.source.base == s.space.base else f.source.with_base(s.space.base)
        moved = f(s.space.base) != f.target.base
        if moved and not rebase:
            raise InputError(f"{f.name} does not send the base point to the target base point")
        super().__init__(f.target)
        self.f, self.inner, self.rebase = f, s, moved
        self.horizon = s.horizon
        cache = f.__dict__.setdefault("_certificates", {})
        key = (s.bound, r, source.base)
        if key not in cache:
            g = f if source is f.source else type(f)(source, f.target, f._fn, f.name, f.desc)
            cache[key] = certify_coarse(g, s.bound if s.bound > 0 else 1, r)
        cert = cache[key]
        if cert.verdict != PASS:
            raise CertificationError(f"{f.name} is not certified coarse ({cert.verdict}) at scale {extdist.to_json(s.bound)}")
        self.certificate = cert
        bound = cert.scale_out
        if self.rebase and s.defined(1):
            bound = extdist.ext_max([bound, f.target.geometry.dist(f.target.base, f(s(1)))])
        self.bound = bound

    def _eval(self, i):
        if i == 0 and self.rebase:
            return self.space.base
        return self.f(self.inner(i))

    def canonical(self):
        if self.f.desc == {"kind": "identity"} and not self.rebase and self.space == self.inner.space:
            return self.inner.canonical()
        return self

    def describe(self):
        return {
            "kind": self.kind,
            "map": self.f.to_json() if self.f.desc is not None else self.f.name,
            "seq": self.inner.describe(),
            "rebase": self.rebase,
        }


def push_forward(f, s: CoarseSequence, rebase: bool = False) -> Pushforward:
    return Pushforward(f, s, rebase)


class Joined(CoarseSequence):
    """The one-step confluence sequence.

    Block ``n`` is ``t(κ(n)), ..., t(κ(n+1))`` followed by
    ``u(λ(n)), ..., u(λ(n+1))``; it starts at ``B(n) = κ(n) + λ(n) + 2n``
    (with ``κ(0) = λ(0) = 0``).
    """

    kind = "joined"

    def __init__(self, s, t, u, kappa: MonotoneWitness, lam: MonotoneWitness):
        super().__init__(t.space)
        self.s, self.t, self.u = s, t, u
        self.kappa, self.lam = kappa, lam
        limits = [h for h in (kappa.horizon, lam.horizon, s.horizon) if h is not None]
        if t.horizon is not None:
            limits.append(kappa.last_preimage(t.horizon))
        if u.horizon is not None:
            limits.append(lam.last_preimage(u.horizon))
        self.n_max = min(limits) if limits else None
        self.horizon = None if self.n_max is None else self.start(self.n_max)
        self.bound = extdist.ext_max([s.bound, t.bound, u.bound])

    def start(self, n: int) -> int:
        return self.kappa(n) + self.lam(n) + 2 * n

    def _block(self, j: int) -> int:
        lo, hi = 0, 1
        while (self.n_max is None or hi <= self.n_max) and self.start(hi) <= j:
            lo, hi = hi, hi * 2
        if self.n_max is not None:
            hi = min(hi, self.n_max + 1)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.start(mid) <= j:
                lo = mid
            else:
                hi = mid
        return lo

    def _eval(self, j):
        n = self._block(j)
        off = j - self.start(n)
        if self.n_max is not None and n == self.n_max:
            return self.t(self.kappa(n))
        t_len = self.kappa(n + 1) - self.kappa(n) + 1
        if off < t_len:
            return self.t(self.kappa(n) + off)
        return self.u(self.lam(n) + off - t_len)

    def t_witness(self) -> MonotoneWitness:
        """``t = v∘w``: ``w(j) = j + λ(n) + 2n`` for ``κ(n) <= j < κ(n+1)``."""
        kappa, lam = self.kappa, self.lam

        def w(j):
            n = kappa.last_preimage(j)
            return j + lam(n) + 2 * n

        limit = None if self.n_max is None else kappa(self.n_max)
        return MonotoneWitness((), fn=w, limit=limit, label="join-t")

    def u_witness(self) -> MonotoneWitness:
        """``u = v∘w``: ``w(j) = j + κ(n+1) + 2n + 1`` for ``λ(n) <= j < λ(n+1)``."""
        kappa, lam, n_max = self.kappa, self.lam, self.n_max

        def w(j):
            n = lam.last_preimage(j)
            if n_max is not None and n >= n_max:
                return self.start(n_max) - 1 if n_max > 0 else 0
            return j + kappa(n + 1) + 2 * n + 1

        limit = None if n_max is None else lam(n_max)
        return MonotoneWitness((), fn=w, limit=limit, label="join-u")

    def describe(self):
        return {
            "kind": self.kind,
            "t": self.t.describe(),
            "u": self.u.describe(),
            "kappa": self.kappa.to_json(),
            "lambda": self.lam.to_json(),
        }


# certification ------------------------------------------------------------


@dataclass(frozen=True)
class SeqCertificate:
    """Bornologous and escape evidence for a sequence at horizon ``N``."""

    N: int
    jump_sup: ExtDist
    jump_index: int | None
    escape_N: ExtDist
    escape_2N: ExtDist
    anchored: bool

    @property
    def escape_grows(self) -> bool:
        return self.escape_2N > self.escape_N

    @property
    def passed(self) -> bool:
        return self.anchored and self.escape_grows

    def to_json(self):
        return {
            "N": self.N,
            "jump_sup": extdist.to_json(self.jump_sup),
            "jump_index": self.jump_index,
            "escape": [extdist.to_json(self.escape_N), extdist.to_json(self.escape_2N)],
            "escape_grows": self.escape_grows,
            "anchored": self.anchored,
        }


def certify_coarse_seq(s: CoarseSequence, N: int = 256) -> SeqCertificate:
    """Jump supremum over ``i < 2N`` and the escape minima
    ``min_{i∈[N/2,N]} d(ξ, s(i))`` and ``min_{i∈[N,2N]} d(ξ, s(i))``.

    Finite descriptions are certified at ``N = horizon // 2``. Raises
    CertificationError when a jump exceeds the declared bound.
    """
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise InputError("N must be a positive integer")
    if s.horizon is not None:
        N = max(1, min(N, s.horizon // 2))
    stop = s.top(2 * N)
    geo = s.space.geometry
    best, arg = 0, None
    for i in range(stop):
        d = geo.dist(s(i), s(i + 1))
        if d > s.bound:
            raise CertificationError(
                f"jump d(s({i}), s({i + 1})) = {extdist.to_json(d)} exceeds the declared bound {extdist.to_json(s.bound)}",
                index=i,
            )
        if d > best:
            best, arg = d, i
    e1 = min(s.radius(i) for i in range(N // 2, min(N, stop) + 1))
    e2 = min(s.radius(i) for i in range(min(N, stop), stop + 1))
    return SeqCertificate(N, best, arg, e1, e2, s(0) == s.space.base)


# JSON ---------------------------------------------------------------------


_KINDS = ("prefix_affine", "ray_rule", "pushforward", "interleave", "transported", "reindexed")


def _fields(desc, allowed, kind):
    extra = set(desc) - set(allowed) - {"kind", "schema", "name"}
    if extra:
        raise InputError(f"sequence {kind}: unknown field(s) {', '.join(sorted(extra))}")


def _vector(geo, value):
    if isinstance(value, list):
        return tuple(extdist.parse_rational(x) if isinstance(x, str) else x for x in value)
    return value


def seq_from_json(desc, space: SpaceModel) -> CoarseSequence:
    """Build a sequence in ``space`` (whose base is the sequence's ``s(0)``)."""
    from ..maps import map_from_json
    from ..zoo import space_from_json

    if not isinstance(desc, dict):
        raise InputError("sequence description must be a JSON object")
    kind = desc.get("kind")
    geo = space.geometry
    bound = desc.get("bound")

    if kind == "prefix_affine":
        _fields(desc, ("prefix", "tail", "bound"), kind)
        prefix = desc.get("prefix", [geo.point_to_json(space.base)])
        if not isinstance(prefix, list):
            raise InputError("prefix must be a list of points")
        pts = [geo.point_from_json(x) for x in prefix]
        tail = desc.get("tail")
        if tail is None:
            return PrefixAffine(space, pts, bound=bound)
        if not isinstance(tail, dict):
            raise InputError("tail must be an object with p and v")
        _fields(tail, ("p", "v", "offsets"), "tail")
        if "p" not in tail or "v" not in tail:
            raise InputError("tail needs p and v")
        offsets = [_vector(geo, o) for o in tail["offsets"]] if "offsets" in tail else None
        return PrefixAffine(space, pts, geo.point_from_json(tail["p"]), _vector(geo, tail["v"]), offsets, bound)

    if kind == "ray_rule":
        _fields(desc, ("path", "cycle", "bound"), kind)
        return RayRule(space, desc.get("path", []), desc.get("cycle", []), bound)

    if kind == "pushforward":
        _fields(desc, ("map", "seq", "source", "rebase"), kind)
        source = space_from_json(desc["source"]) if "source" in desc else space
        inner = seq_from_json(_require(desc, "seq"), source)
        f = map_from_json(_require(desc, "map"), source, space)
        return Pushforward(f, inner, bool(desc.get("rebase", False)))

    if kind == "interleave":
        _fields(desc, ("a", "b"), kind)
        return Interleave(seq_from_json(_require(desc, "a"), space), seq_from_json(_require(desc, "b"), space))

    if kind == "transported":
        _fields(desc, ("seq", "from"), kind)
        origin = geo.point_from_json(_require(desc, "from"))
        inner = seq_from_json(_require(desc, "seq"), space.with_base(origin))
        return transport_base(inner, space.base)

    if kind == "reindexed":
        _fields(desc, ("seq", "witness"), kind)
        inner = seq_from_json(_require(desc, "seq"), space)
        return Reindexed(inner, MonotoneWitness.from_json(_require(desc, "witness")))

    raise InputError(f"unknown sequence kind {kind!r}; expected one of {', '.join(_KINDS)}")


def _require(desc, key):
    if key not in desc:
        raise InputError(f"sequence {desc.get('kind')}: missing field {key!r}")
    return desc[key]


def seq_to_json(s: CoarseSequence) -> dict:
    return s.describe()


__all__ = [
    "TRUE", "FALSE", "UNKNOWN", "MonotoneWitness", "compose_witnesses", "replay_witness", "Verdict",
    "CoarseSequence", "eval_seq", "PrefixAffine", "explicit", "ray", "RayRule", "Interleave",
    "interleave_even_odd", "Transported", "transport_base", "transport_witness", "Reindexed",
    "even_subsequence", "Pushforward", "push_forward", "Joined", "SeqCertificate", "certify_coarse_seq",
    "seq_from_json", "seq_to_json",
]
