"""One-step confluence (the diamond) and its extension along zig-zag chains."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InputError
from .core import CoarseSequence, Joined, MonotoneWitness, compose_witnesses, replay_witness

UP = "up"  # u_i ⊑ u_{i+1}, witness κ with u_i = u_{i+1}∘κ
DOWN = "down"  # u_{i+1} ⊑ u_i, witness κ with u_{i+1} = u_i∘κ

WORKING_PREFIX = 256


@dataclass(frozen=True)
class JoinResult:
    v: CoarseSequence
    t_witness: MonotoneWitness  # t = v∘t_witness
    u_witness: MonotoneWitness  # u = v∘u_witness


def _anchor(w: MonotoneWitness) -> MonotoneWitness:
    # s(0) = t(0) = ξ, so the witness may always start at 0
    return w if w(0) == 0 else w.with_value(0, 0)


def _check(s, t, w: MonotoneWitness, what: str, n: int):
    top = n if w.horizon is None else min(n, w.horizon)
    top = s.top(top)
    if t.horizon is not None:
        top = min(top, w.last_preimage(t.horizon))
    bad = replay_witness(s, t, w, top)
    if bad is not None:
        raise InputError(f"{what} does not replay at index {bad}")


def join_pair(s: CoarseSequence, t: CoarseSequence, u: CoarseSequence,
              kappa: MonotoneWitness, lam: MonotoneWitness, n: int = WORKING_PREFIX) -> JoinResult:
    """Common supersequence ``v`` of ``t`` and ``u`` given ``s = t∘κ = u∘λ``.

    The witnesses are replayed on ``s(0..n)`` first; a mismatch is an input
    error naming the index.
    """
    if not (s.space == t.space == u.space):
        raise InputError("join_pair needs s, t, u in the same pointed space")
    kappa, lam = _anchor(kappa), _anchor(lam)
    _check(s, t, kappa, "s = t∘κ", n)
    _check(s, u, lam, "s = u∘λ", n)
    v = Joined(s, t, u, kappa, lam)
    return JoinResult(v, v.t_witness(), v.u_witness())


@dataclass(frozen=True)
class MergeResult:
    u: CoarseSequence
    first_witness: MonotoneWitness  # u_0 = u∘first_witness
    last_witness: MonotoneWitness  # u_n = u∘last_witness


def merge_chain(chain, n: int = WORKING_PREFIX) -> MergeResult:
    """Fold a zig-zag ``u_0, ..., u_n`` into one common supersequence.

    ``chain[0]`` is ``(u_0, None, None)``; every later entry is
    ``(u_{i+1}, direction, κ)`` with direction ``"up"`` (``u_i = u_{i+1}∘κ``)
    or ``"down"`` (``u_{i+1} = u_i∘κ``). Induction on the length: an up-link
    is absorbed by one join, a down-link by composing witnesses.
    """
    if not chain:
        raise InputError("empty chain")
    first = chain[0][0] if isinstance(chain[0], tuple) else chain[0]
    v = first
    alpha = MonotoneWitness.identity()  # u_0 = v∘alpha
    beta = MonotoneWitness.identity()  # u_k = v∘beta
    prev = first
    for k, link in enumerate(chain[1:], start=1):
        try:
            nxt, direction, gamma = link
        except (TypeError, ValueError) as exc:
            raise InputError(f"chain link {k} must be (sequence, direction, witness)") from exc
        if nxt.space != prev.space:
            raise InputError(f"chain link {k} changes the pointed space")
        if direction == UP:
            _check(prev, nxt, gamma, f"link {k} (u_{k - 1} = u_{k}∘κ)", n)
            joined = join_pair(prev, nxt, v, gamma, beta, n)
            alpha = compose_witnesses(joined.u_witness, alpha)
            beta = joined.t_witness
            v = joined.v
        elif direction == DOWN:
            _check(nxt, prev, gamma, f"link {k} (u_{k} = u_{k - 1}∘κ)", n)
            beta = compose_witnesses(beta, gamma)
        else:
            raise InputError(f"chain link {k}: direction must be 'up' or 'down', got {direction!r}")
        prev = nxt
    return MergeResult(v, alpha, beta)
