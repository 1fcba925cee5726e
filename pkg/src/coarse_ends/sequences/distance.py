"""The metric ``d_S`` on coarse sequences, computed constructively.

Values: 0 (same sequence), 1 (one is a subsequence of the other), 2 (a
common supersequence was built and replayed), ∞ (the tails live in
different ends), or Unknown (``None``). No other value can be produced.
"""

from __future__ import annotations

from collections import OrderedDict, deque
from dataclasses import dataclass, field
from functools import lru_cache

from .. import extdist
from ..chains import DEFAULT_MAX_POINTS, EndReport, end_count
from ..errors import CertificationError, InputError
from ..extdist import INF
from .core import FALSE, TRUE, CoarseSequence, Verdict
from .subseq import is_subsequence
from .supersequence import Supersequence, by_bridges, by_interleave, stage_escape_ok


@dataclass(frozen=True)
class Params:
    """Horizons shared by the sequence and ends machinery."""

    N: int = 256
    M: int = 1024
    K: object = None
    radii: tuple | None = None
    horizons: tuple | None = None
    max_points: int = DEFAULT_MAX_POINTS

    def __post_init__(self):
        if self.N < 1 or self.M < self.N:
            raise InputError("need 1 <= N <= M")


@lru_cache(maxsize=64)
def _report(space, K, radii, horizons, max_points) -> EndReport:
    return end_count(space, K, radii, horizons, max_points)


def report_for(space, params: Params, K=None) -> EndReport:
    """EndReport for ``space`` at scale ``K`` (memoized per parameter set)."""
    K = extdist.parse(K if K is not None else params.K if params.K is not None else space.geometry.unit())
    radii = tuple(params.radii) if params.radii is not None else None
    horizons = tuple(params.horizons) if params.horizons is not None else None
    return _report(space, K, radii, horizons, params.max_points)


@dataclass
class DistanceResult:
    value: object  # 0, 1, 2, INF or None (Unknown)
    trace: dict = field(default_factory=dict)
    verdicts: tuple = ()
    supersequence: Supersequence | None = None

    @property
    def known(self) -> bool:
        return self.value is not None

    def label(self) -> str:
        if self.value is None:
            return "Unknown"
        if self.value is INF:
            return "∞"
        return str(self.value)

    def to_json(self) -> dict:
        out = {"d_S": "unknown" if self.value is None else extdist.to_json(self.value), "trace": self.trace}
        if self.supersequence is not None:
            out["supersequence"] = self.supersequence.to_json()
        return out


def _scale(s, t, params: Params):
    K = params.K if params.K is not None else extdist.ext_max([s.bound, t.bound, s.space.geometry.unit()])
    return extdist.parse(K)


_SEARCH_LABELS: OrderedDict = OrderedDict()


def _search_labels(report: EndReport) -> dict:
    """Breadth-first component labels of the region searched below, computed
    once per report (the reference keeps ``id`` from being reused)."""
    hit = _SEARCH_LABELS.get(id(report))
    if hit is not None and hit[0] is report:
        _SEARCH_LABELS.move_to_end(id(report))
        return hit[1]
    outer = report.outer
    K, floor = outer.K, outer.radii[-1]
    geo = outer.space.geometry
    radius_of = outer.radius_of
    labels: dict = {}
    for seed, r in radius_of.items():
        if r < floor or seed in labels:
            continue
        labels[seed] = seed
        queue = deque([seed])
        while queue:
            p = queue.popleft()
            for q in geo.neighbors(p, K):
                if q in labels:
                    continue
                rq = radius_of.get(q)
                if rq is None or rq < floor:
                    continue
                labels[q] = seed
                queue.append(q)
    _SEARCH_LABELS[id(report)] = (report, labels)
    if len(_SEARCH_LABELS) > 64:
        _SEARCH_LABELS.popitem(last=False)
    return labels


def separated_by_search(s: CoarseSequence, t: CoarseSequence, report: EndReport) -> bool | None:
    """Breadth-first search for a K-chain joining the tails of ``s`` and
    ``t`` outside the deepest radius inside ``ball(R')``.

    True when no chain exists (certified distinct at this horizon), False
    when one does, None when a tail point cannot be located.
    """
    R = report.tower.R

    def tail_point(seq):
        for i in range(1 << 16):
            if not seq.defined(i):
                return None
            if seq.radius(i) > R:
                return seq(i - 1)
        return None

    x, y = tail_point(s), tail_point(t)
    if x is None or y is None:
        return None
    labels = _search_labels(report)
    lx, ly = labels.get(x), labels.get(y)
    if lx is None or ly is None:
        return None
    return lx != ly


def _ends_verdict(s, t, report: EndReport):
    from ..classify import classify_sequence

    try:
        cs, ct = classify_sequence(s, report), classify_sequence(t, report)
    except InputError as exc:
        return None, str(exc)
    if not (cs.known and ct.known):
        return None, cs.reason or ct.reason
    if cs.id == ct.id:
        return "same", ""
    os_, ot = report.outer.class_at(len(report.radii) - 1, cs.id), report.outer.class_at(len(report.radii) - 1, ct.id)
    if os_ != ot:
        return "different", ""
    return None, "threads merge at the doubled horizon"


def common_supersequence(s, t, report: EndReport, params: Params) -> Supersequence | None:
    """Interleave when the pair is close, otherwise the staged bridge construction."""
    sup = by_interleave(s, t, params.N)
    if sup is None:
        tower = report.tower
        sup = by_bridges(s, t, tower.radius_of, tower.radii, tower.R, tower.K)
    if sup is None:
        return None
    if not sup.replay(s, t, params.N):
        return None
    try:
        from .core import certify_coarse_seq

        certify_coarse_seq(sup.u, params.N)
    except CertificationError:
        return None
    if not stage_escape_ok(sup):
        return None
    return sup


def sequence_distance(s: CoarseSequence, t: CoarseSequence, params: Params | None = None,
                      report: EndReport | None = None, infinity_route: str = "ends") -> DistanceResult:
    """``d_S(s, t)`` in ``{0, 1, 2, ∞}`` or Unknown (value ``None``).

    ``infinity_route="ends"`` decides ∞ and gates 2 by tower classification;
    ``"search"`` uses breadth-first separation and tries the supersequence
    constructions directly, which keeps it independent of the union-find
    partition.
    """
    if s.space != t.space:
        raise InputError("sequences live in different pointed spaces")
    if infinity_route not in ("ends", "search"):
        raise InputError("infinity_route must be 'ends' or 'search'")
    params = params or Params()
    trace: dict = {}
    if s.key() == t.key():
        return DistanceResult(0, {"reason": "identical descriptions"})
    n = min(s.top(params.N), t.top(params.N))
    prefix_equal = all(s(i) == t(i) for i in range(n + 1))
    if prefix_equal and s.horizon == t.horizon and s.horizon is not None:
        return DistanceResult(0, {"reason": "equal finite sequences"})

    st = is_subsequence(s, t, params.N, params.M)
    ts = is_subsequence(t, s, params.N, params.M)
    trace["s⊑t"], trace["t⊑s"] = st.status, ts.status
    verdicts = (st, ts)
    if prefix_equal:
        trace["reason"] = "equal on the certification prefix with different descriptions"
        return DistanceResult(None, trace, verdicts)
    if st.status == TRUE or ts.status == TRUE:
        return DistanceResult(1, trace, verdicts)

    if report is None:
        try:
            report = report_for(s.space, params, _scale(s, t, params))
        except InputError as exc:  # the point budget is a horizon, not a fault
            trace["reason"] = str(exc)
            return DistanceResult(None, trace, verdicts)
    both_false = st.status == FALSE and ts.status == FALSE

    if infinity_route == "ends":
        ends, why = _ends_verdict(s, t, report)
        trace["ends"] = ends or f"unknown: {why}"
        if ends == "different":
            return DistanceResult(INF, trace, verdicts)
        if ends != "same" or not both_false:
            return DistanceResult(None, trace, verdicts)
    else:
        sep = separated_by_search(s, t, report)
        trace["search"] = {True: "separated", False: "connected", None: "unknown"}[sep]
        if sep is True:
            return DistanceResult(INF, trace, verdicts)
        if not both_false:
            return DistanceResult(None, trace, verdicts)

    sup = common_supersequence(s, t, report, params)
    if sup is None:
        trace["supersequence"] = "not constructed"
        return DistanceResult(None, trace, verdicts)
    trace["supersequence"] = sup.route
    return DistanceResult(2, trace, verdicts, sup)


def distance_value_label(value) -> str:
    return DistanceResult(value).label()


__all__ = [
    "Params", "report_for", "DistanceResult", "separated_by_search", "common_supersequence",
    "sequence_distance", "Verdict",
]
