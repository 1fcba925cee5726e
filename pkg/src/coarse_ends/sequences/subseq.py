"""The subsequence relation by greedy leftmost matching.

Leftmost matching is optimal: if any embedding of ``s(0..N)`` into
``t(0..M)`` exists, matching each ``s(i)`` at the first admissible position
finds one. A miss becomes a certified ``False`` only when ``t`` has already
escaped beyond every point of the unmatched prefix of ``s``.
"""

from __future__ import annotations

from typing import Callable, Sequence

from ..errors import HorizonError, InputError
from .core import FALSE, TRUE, UNKNOWN, CoarseSequence, MonotoneWitness, Verdict


def next_match(t_at: Callable[[int], object], x, start: int, stop: int) -> int | None:
    """First ``j`` in ``[start, stop]`` with ``t(j) == x``."""
    for j in range(start, stop + 1):
        if t_at(j) == x:
            return j
    return None


def greedy_match(s_values: Sequence, t_at: Callable[[int], object], stop: int):
    """Match ``s_values`` into ``t(0..stop)`` greedily.

    Returns ``(kappa, None)`` on success or ``(partial_kappa, i)`` where
    ``i`` is the first index of ``s`` that cannot be placed.
    """
    kappa: list[int] = []
    j = 0
    for i, x in enumerate(s_values):
        hit = next_match(t_at, x, j, stop)
        if hit is None:
            return kappa, i
        kappa.append(hit)
        j = hit + 1
    return kappa, None


def is_subsequence_str(s: Sequence, t: Sequence) -> bool:
    """Greedy test on finite strings or lists."""
    _, fail = greedy_match(s, t.__getitem__, len(t) - 1)
    return fail is None


def _same_space(s: CoarseSequence, t: CoarseSequence):
    if s.space != t.space:
        raise InputError(f"sequences live in different pointed spaces ({s.space!r} vs {t.space!r})")


def is_subsequence(s: CoarseSequence, t: CoarseSequence, N: int = 256, M: int = 1024) -> Verdict:
    """Decide ``s ⊑ t`` on the prefix ``s(0..N)`` against ``t(0..M)``, then ``t(0..2M)``.

    True carries the greedy witness. False (a certified miss) carries the
    first unmatchable index and requires ``t``'s escape radius on
    ``(M', 2M']`` to exceed the radii of ``s(0..i)`` plus both jump bounds
    and to grow from the preceding window. Anything else is Unknown.
    """
    _same_space(s, t)
    if M < N:
        raise InputError("the search horizon M must be at least N")
    n = s.top(N)
    s_vals = s.values(n)
    fail = None
    limit = M
    for limit in (M, 2 * M):
        stop = t.top(limit)
        kappa, fail = greedy_match(s_vals, t, stop)
        if fail is None:
            return Verdict(TRUE, MonotoneWitness(kappa), horizon=(n, stop))
    stop = t.top(2 * M)
    if stop < 2 * M:
        return Verdict(UNKNOWN, horizon=(n, stop), reason="t is described only up to its horizon")
    certified, reason = _certified_miss(s, t, fail, M)
    if certified:
        return Verdict(FALSE, counterexample=fail, horizon=(n, 2 * M))
    return Verdict(UNKNOWN, horizon=(n, 2 * M), reason=reason)


def _certified_miss(s, t, fail: int, M: int):
    reach = max(s.radius(i) for i in range(fail + 1))
    margin = s.bound + t.bound
    try:
        late = min(t.radius(j) for j in range(M + 1, 2 * M + 1))
        early = min(t.radius(j) for j in range(M // 2 + 1, M + 1))
    except HorizonError:
        return False, "t is too short for the escape check"
    if not late > reach + margin:
        return False, "t has not escaped past the unmatched prefix"
    if not late > early:
        return False, "t's escape does not grow"
    return True, ""


def replay_subsequence(s: CoarseSequence, t: CoarseSequence, verdict: Verdict) -> bool:
    """Recheck a verdict against direct evaluation.

    True: ``s(i) == t(κ(i))`` for the matched prefix. False: the
    counterexample ``s(i)`` is absent from ``t`` after the greedy position
    of ``s(i-1)``, up to the horizon used.
    """
    n, stop = verdict.horizon
    if verdict.status == TRUE:
        return all(s(i) == t(verdict.witness(i)) for i in range(n + 1))
    if verdict.status == FALSE:
        i = verdict.counterexample
        kappa, fail = greedy_match(s.values(i), t, stop)
        if fail != i:
            return False
        start = kappa[i - 1] + 1 if i > 0 else 0
        x = s(i)
        return all(t(j) != x for j in range(start, stop + 1))
    return True
