"""Tail classification of coarse sequences against an annulus tower."""

from __future__ import annotations

from dataclasses import dataclass

from . import extdist
from .chains import EndReport
from .errors import HorizonError, InputError
from .extdist import ExtDist
from .sequences.core import CoarseSequence

SCAN_FLOOR = 4096


@dataclass(frozen=True)
class EndClass:
    """The thread a sequence's tails settle in; ``id is None`` means Unknown."""

    id: object
    representative: CoarseSequence
    K: ExtDist
    chain: tuple = ()
    exit_index: int | None = None
    reason: str = ""

    @property
    def known(self) -> bool:
        return self.id is not None

    def to_json(self) -> dict:
        pj = self.representative.space.geometry.point_to_json
        out = {"id": pj(self.id) if self.known else None, "K": extdist.to_json(self.K)}
        if self.known:
            out["chain"] = [pj(c) for c in self.chain]
            out["exit_index"] = self.exit_index
        else:
            out["reason"] = self.reason
        return out


def _scan_limit(report: EndReport) -> int:
    R = report.horizons[1]
    unit = report.space.geometry.unit()
    return max(SCAN_FLOOR, int(8 * R / unit) + 1)


def classify_sequence(s: CoarseSequence, report: EndReport, limit: int | None = None) -> EndClass:
    """Thread containing the tails of ``s`` at every level of the tower.

    At level ``j`` the tail is ``s(N_j), ..., s(A)`` where ``A`` is the last
    index before ``s`` first leaves ``ball(R)`` and ``N_j`` follows the last
    visit to the open ball of radius ``r_j`` before ``A``. Refuses when the
    declared jump bound exceeds ``K``.
    """
    tower = report.tower
    if s.space != tower.space:
        raise InputError(f"sequence lives in {s.space!r}, the tower in {tower.space!r}")
    if s.bound > tower.K:
        raise InputError(
            f"jump bound {extdist.to_json(s.bound)} exceeds K = {extdist.to_json(tower.K)}; tails cannot be classified at this scale"
        )
    limit = limit or _scan_limit(report)
    R = tower.R
    radii = []
    exit_index = None
    try:
        for i in range(limit + 1):
            r = s.radius(i)
            if r > R:
                exit_index = i
                break
            radii.append(r)
    except HorizonError:
        return EndClass(None, s, tower.K, reason="sequence ends before leaving the ball of radius R")
    if exit_index is None:
        return EndClass(None, s, tower.K, reason=f"sequence stays in the ball of radius {extdist.to_json(R)} for {limit} steps")
    A = exit_index - 1
    chain = []
    for j, rj in enumerate(tower.radii):
        start = A
        while start > 0 and radii[start - 1] >= rj:
            start -= 1
        if radii[start] < rj:
            return EndClass(None, s, tower.K, reason=f"last point before exit lies inside radius {extdist.to_json(rj)}")
        part = tower.levels[j]
        classes = {part.class_of[s(i)] for i in range(start, A + 1)}
        if len(classes) != 1:
            return EndClass(None, s, tower.K, reason=f"tail straddles {len(classes)} classes at level {j}")
        chain.append(classes.pop())
    for j in range(len(chain) - 1):
        if tower.inclusions[j][chain[j + 1]] != chain[j]:
            return EndClass(None, s, tower.K, reason=f"tail classes at levels {j}, {j + 1} are not nested")
    thread = chain[-1]
    if thread not in report.thread_ids():
        return EndClass(None, s, tower.K, reason="tail class does not reach the outer shell")
    return EndClass(thread, s, tower.K, tuple(chain), exit_index)
