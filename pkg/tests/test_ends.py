"""Tail classification, σ reports, induced class maps and the cross-check."""

import pytest

from coarse_ends import zoo
from coarse_ends.chains import end_count
from coarse_ends.classify import classify_sequence
from coarse_ends.ends import (
    EQUIVALENT,
    INEQUIVALENT,
    compose_class_maps,
    crosscheck_equivalence,
    generate_representatives,
    sigma,
    sigma_dot,
    sigma_map,
)
from coarse_ends.errors import CertificationError, InputError
from coarse_ends.maps import identity_map, map_from_json
from coarse_ends.sequences import (
    MonotoneWitness,
    Params,
    PrefixAffine,
    RayRule,
    Reindexed,
    even_subsequence,
    push_forward,
    ray,
    report_for,
    sequence_distance,
    transport_base,
)

from .seqgen import walk_then_ray

Z = zoo.integers()
N = zoo.naturals()
Z2 = zoo.lattice(2, "l1")
P = Params(N=64, M=256)


def affine(a, b=0, source=Z, target=None):
    return map_from_json({"kind": "affine", "a": a, "b": b}, source, target)


def side(report, tid):
    """+1 or -1: which half-line of ℤ a thread's shell point lies on."""
    t = next(t for t in report.threads if t.id == tid)
    return 1 if t.shell_point > 0 else -1


class TestClassify:
    def test_integer_rays(self):
        rep = end_count(Z, 1)
        plus, minus = classify_sequence(ray(Z, 1), rep), classify_sequence(ray(Z, -1), rep)
        assert plus.known and minus.known and plus.id != minus.id
        assert side(rep, plus.id) == 1 and side(rep, minus.id) == -1

    def test_naturals(self):
        rep = end_count(N, 1)
        assert classify_sequence(ray(N, 1), rep).id == rep.threads[0].id

    def test_tail_ignores_prefix(self):
        rep = end_count(Z, 1)
        s = walk_then_ray(Z, [0, -1, -2, -3, -2, -1, 0], 1)
        assert classify_sequence(s, rep).id == classify_sequence(ray(Z, 1), rep).id

    def test_jump_too_big(self):
        with pytest.raises(InputError):
            classify_sequence(ray(Z, 2), end_count(Z, 1))

    def test_other_space(self):
        with pytest.raises(InputError):
            classify_sequence(ray(N, 1), end_count(Z, 1))

    def test_bounded_tail_is_unknown(self):
        s = PrefixAffine(Z, [0, 1], 1, 0, bound=1)  # stuck at 1
        assert not classify_sequence(s, end_count(Z, 1)).known


class TestSigma:
    def test_three_rays(self):
        seqs = [ray(Z, 1), ray(Z, -1), push_forward(affine(2), ray(Z, 1))]
        rep = sigma(Z, seqs, P)
        assert rep.class_count == 2
        groups = sorted(rep.classes.values())
        assert groups == [[0, 2], [1]]
        assert not rep.contradictions()

    def test_single_sequence(self):
        rep = sigma(Z, [ray(Z, 1)], P, auto_representatives=False)
        assert rep.class_count == 1

    def test_representatives_fill_in(self):
        rep = sigma(Z, [ray(Z, 1)], P)
        assert rep.class_count == 2 and len(rep.representatives) == 2

    def test_disjoint_union_copy_zero(self):
        U = zoo.disjoint_union(zoo.integers(), zoo.integers())
        seqs = [PrefixAffine(U, [(0, 0)], (0, 0), 1), PrefixAffine(U, [(0, 0)], (0, 0), -1)]
        rep = sigma(U, seqs, P)
        assert rep.class_count == 2
        assert all(tid[0] == 0 for tid in rep.classes)

    def test_rejections_are_recorded(self):
        seqs = [ray(Z, 1), PrefixAffine(Z, [0, 1], 1, 0, bound=1), ray(N, 1)]
        rep = sigma(Z, seqs, P)
        assert set(rep.failures) == {1, 2}
        assert [r["status"] for r in rep.to_json()["partition"]] == ["classified", "rejected", "rejected"]

    def test_default_scale_is_largest_bound(self):
        rep = sigma(Z, [ray(Z, 1), ray(Z, 3)], P, auto_representatives=False)
        assert rep.end_report.K == 3

    def test_representatives_classify_into_their_thread(self):
        for space in (Z, N, Z2, zoo.lattice(2, "linf")):
            rep = end_count(space, 1)
            reps = generate_representatives(rep)
            assert set(reps) == set(rep.thread_ids())
            for tid, s in reps.items():
                assert classify_sequence(s, rep).id == tid

    def test_dot(self):
        rep = sigma(Z, [ray(Z, 1)], P)
        text = sigma_dot(rep, sigma_map(affine(-1), rep, params=P))
        assert text.startswith("digraph sigma {") and text.count("->") == 2


class TestSigmaMap:
    def test_identity(self):
        rep = sigma(Z, [ray(Z, 1), ray(Z, -1)], P)
        cm = sigma_map(identity_map(Z), rep, rep, P)
        assert cm.mapping == {t: t for t in rep.classes} and not cm.violations

    def test_doubling_keeps_sides(self):
        rep = sigma(Z, [ray(Z, 1), ray(Z, -1)], P)
        cm = sigma_map(affine(2), rep, rep, P)
        assert sorted(cm.mapping.values()) == sorted(rep.classes)
        assert all(side(rep.end_report, k) == side(rep.end_report, v) for k, v in cm.mapping.items())
        assert set(cm.checks.values()) == {"consistent"}

    def test_negation_swaps(self):
        rep = sigma(Z, [ray(Z, 1), ray(Z, -1)], P)
        cm = sigma_map(affine(-1), rep, rep, P)
        assert all(k != v for k, v in cm.mapping.items())

    def test_collapse_into_plane(self):
        f = map_from_json({"kind": "linear", "matrix": [[1], [0]]}, Z, Z2)
        rep = sigma(Z, [ray(Z, 1), ray(Z, -1)], P)
        target = sigma(Z2, [], P)
        cm = sigma_map(f, rep, target, P)
        assert len(set(cm.mapping.values())) == 1 and None not in cm.mapping.values()

    def test_uncertified_map_refused(self):
        sq = map_from_json({"kind": "polynomial", "coeffs": [0, 0, 1]}, Z)
        rep = sigma(Z, [ray(Z, 1)], P)
        with pytest.raises(CertificationError, match="not certified coarse"):
            sigma_map(sq, rep, rep, P)

    def test_composition(self):
        rep = sigma(Z, [ray(Z, 1), ray(Z, -1)], P)
        f, g = affine(2, 1), affine(-3)
        gf = map_from_json({"kind": "compose", "maps": [f.desc, g.desc]}, Z)
        assert sigma_map(gf, rep, rep, P).mapping == compose_class_maps(
            sigma_map(g, rep, rep, P), sigma_map(f, rep, rep, P)
        )

    def test_json(self):
        rep = sigma(Z, [ray(Z, 1)], P)
        out = sigma_map(affine(2), rep, rep, P).to_json(Z)
        assert out["map"] == "affine" and len(out["mapping"]) == 2 and out["violations"] == []


class TestCrosscheck:
    def test_same(self):
        s = ray(Z, 1)
        rec = crosscheck_equivalence(s, s, P)
        assert (rec.ends, rec.sequence, rec.agree) == (EQUIVALENT, EQUIVALENT, True)

    def test_opposite(self):
        rec = crosscheck_equivalence(ray(Z, 1), ray(Z, -1), P)
        assert (rec.ends, rec.sequence, rec.agree) == (INEQUIVALENT, INEQUIVALENT, True)
        assert rec.d_S == "∞"

    def test_even_subsequence(self):
        s = ray(Z, 1)
        rec = crosscheck_equivalence(s, even_subsequence(s), P)
        assert (rec.ends, rec.sequence, rec.d_S) == (EQUIVALENT, EQUIVALENT, "1")

    def test_through_supersequence(self):
        a = walk_then_ray(Z, [0, 1, 0], 1)
        b = walk_then_ray(Z, [0, -1, 0], 1)
        rec = crosscheck_equivalence(a, b, P)
        assert rec.agree is True and rec.d_S == "2"


def test_base_point_transport_is_equipotent():
    Z5 = zoo.integers(5)
    seqs = [ray(Z, 1), ray(Z, -1), walk_then_ray(Z, [0, 1, 2, 1], -1)]
    a = sigma(Z, seqs, P)
    moved = [transport_base(s, 5) for s in seqs]
    assert all(m.space == Z5 for m in moved)
    b = sigma(Z5, moved, P)
    assert a.class_count == b.class_count
    assert sorted(a.classes.values()) == sorted(b.classes.values())


def test_report_for_is_memoized():
    assert report_for(Z, P, 1) is report_for(Z, P, 1)


def test_over_budget_is_unknown():
    # jump bound 2 in the binary tree: no tower at K = 2 fits the point budget
    T = zoo.tree(2)
    s = Reindexed(RayRule(T, (), (0,)), MonotoneWitness.affine(2))
    t = Reindexed(RayRule(T, (), (1,)), MonotoneWitness.affine(2))
    d = sequence_distance(s, t, P)
    assert d.value is None and "exceeds" in d.trace["reason"]
    rec = crosscheck_equivalence(s, t, P)
    assert rec.agree is None and not rec.contradiction
