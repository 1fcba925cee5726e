"""Common supersequences for two sequences in the same end.

Two constructions are tried. If the sequences are close (bounded pointwise
gap) the even/odd interleave contains both. Otherwise the sequences are
stitched together in stages: at stage ``k`` a block of ``s`` and a block of
``t`` are joined by K-chain bridges that stay outside the ball of radius
``ρ_k``, so the result keeps escaping while visiting both.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .. import extdist
from ..errors import CertificationError, HorizonError, InputError
from ..extdist import INF
from .core import CoarseSequence, Interleave, MonotoneWitness, PrefixAffine, replay_witness


@dataclass(frozen=True)
class Supersequence:
    """``u`` with ``s = u∘ws`` and ``t = u∘wt``, plus the evidence gathered."""

    u: CoarseSequence
    ws: MonotoneWitness
    wt: MonotoneWitness
    route: str
    evidence: dict = field(default_factory=dict)

    def replay(self, s: CoarseSequence, t: CoarseSequence, n: int = 256) -> bool:
        for seq, w in ((s, self.ws), (t, self.wt)):
            top = n if w.horizon is None else min(n, w.horizon)
            top = seq.top(top)
            if self.u.horizon is not None:
                top = min(top, w.last_preimage(self.u.horizon))
            if top < 1 or replay_witness(seq, self.u, w, top) is not None:
                return False
        return True

    def to_json(self, n: int = 32) -> dict:
        return {
            "route": self.route,
            "witness_s": self.ws.table(n),
            "witness_t": self.wt.table(n),
            "evidence": {k: extdist.to_json(v) if v is INF or isinstance(v, int) else v for k, v in self.evidence.items()},
        }


def by_interleave(s: CoarseSequence, t: CoarseSequence, N: int = 256) -> Supersequence | None:
    try:
        u = Interleave(s, t, N)
    except (CertificationError, HorizonError):
        return None
    ws, wt = u.witnesses()
    return Supersequence(u, ws, wt, "interleave", {"gap": u.gap})


def _bfs_bridge(geo, radius_of: dict, floor, K, start, goal):
    """Shortest K-chain from ``start`` to ``goal`` through points of
    ``radius_of`` (a ball) whose radius is at least ``floor``."""
    if start == goal:
        return [start]
    prev = {start: None}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        for q in geo.neighbors(p, K):
            if q in prev:
                continue
            r = radius_of.get(q)
            if r is None or r < floor:
                continue
            prev[q] = p
            if q == goal:
                path = [q]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            queue.append(q)
    return None


def _cut(seq: CoarseSequence, radii, R, K, limit: int):
    """Stage boundaries ``a_k`` and the last index ``A`` of ``seq`` inside ``ball(R)``.

    ``a_k`` is the first index after which ``seq`` stays at radius >= ``ρ_k``
    up to ``A``; ``A`` is the last index before ``seq`` first leaves
    ``ball(R)``.
    """
    rad = []
    A = None
    for i in range(limit + 1):
        if not seq.defined(i):
            return None
        r = seq.radius(i)
        if r > R:
            A = i - 1
            break
        rad.append(r)
    if A is None or A < 1:
        return None
    cuts = [0]
    for rho in radii:
        i = A
        while i > 0 and rad[i - 1] >= rho:
            i -= 1
        if rad[i] < rho:
            return None
        cuts.append(max(i, cuts[-1] + 1))
    if cuts[-1] > A:
        return None
    return cuts, A


def by_bridges(s: CoarseSequence, t: CoarseSequence, radius_of: dict, radii, R, K, limit: int = 1 << 16) -> Supersequence | None:
    """Stage construction inside ``ball(R)`` (``radius_of`` lists its points).

    Stage ``k`` (with ``ρ_0 = 0``) is ``s(a_k..a_{k+1}-1)``, a bridge to
    ``t(b_k)``, ``t(b_k..b_{k+1}-1)``, and a bridge back to ``s(a_{k+1})``;
    every bridge of stage ``k`` stays at radius >= ``ρ_k``. The last stage
    ends with ``t``'s block, so ``u`` covers ``s(0..A_s)`` and ``t(0..A_t)``.
    """
    if s.space != t.space:
        raise InputError("sequences live in different pointed spaces")
    geo = s.space.geometry
    cs, ct = _cut(s, radii, R, K, limit), _cut(t, radii, R, K, limit)
    if cs is None or ct is None:
        return None
    (a, As), (b, At) = cs, ct
    a = a + [As + 1]
    b = b + [At + 1]
    floors = [0] + list(radii)
    u: list = []
    ws: list[int] = []
    wt: list[int] = []
    stage_min = []

    def emit_block(seq, lo, hi, table):
        for i in range(lo, hi):
            table.append(len(u))
            u.append(seq(i))

    def emit_bridge(x, y, floor):
        path = _bfs_bridge(geo, radius_of, floor, K, x, y)
        if path is None:
            return False
        u.extend(path[1:-1])
        return True

    for k in range(len(floors)):
        start = len(u)
        emit_block(s, a[k], a[k + 1], ws)
        if not emit_bridge(s(a[k + 1] - 1), t(b[k]), floors[k]):
            return None
        emit_block(t, b[k], b[k + 1], wt)
        if k + 1 < len(floors):
            if not emit_bridge(t(b[k + 1] - 1), s(a[k + 1]), floors[k]):
                return None
        stage_min.append(min(s.space.radius(x) for x in u[start:]) if k else 0)
    # t(0) = ξ = u(0): let t's witness start at 0
    if u[0] == t(0):
        wt[0] = 0
    try:
        seq = PrefixAffine(s.space, u)
    except InputError:
        return None
    bound = extdist.ext_max([s.bound, t.bound, K])
    if seq.bound > bound:
        return None
    seq.bound = bound
    evidence = {"stages": len(floors), "covered_s": As, "covered_t": At, "stage_minima": [extdist.to_json(m) for m in stage_min],
                "stage_floors": [extdist.to_json(f) for f in floors]}
    return Supersequence(seq, MonotoneWitness(ws), MonotoneWitness(wt), "bridges", evidence)


def stage_escape_ok(sup: Supersequence) -> bool:
    """Every stage stays outside its ball: stage minimum >= stage floor."""
    mins = sup.evidence.get("stage_minima")
    if mins is None:
        return True
    floors = sup.evidence["stage_floors"]
    return all(extdist.parse(m) >= extdist.parse(f) for m, f in zip(mins, floors))
