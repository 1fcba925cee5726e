"""Acceptance suite: one test, and one PASS/FAIL line, per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
the terminal summary under "acceptance criteria".
"""

import itertools
import random
import time
from collections import Counter

import numpy as np
import pytest

from coarse_ends import zoo
from coarse_ends.chains import end_count, k_chain_components
from coarse_ends.ends import compose_class_maps, crosscheck_equivalence, sigma, sigma_map
from coarse_ends.errors import CertificationError, CoarseError
from coarse_ends.extdist import INF
from coarse_ends.maps import certify_bornotopic, certify_coarse_equivalence, map_from_json
from coarse_ends.sequences import (
    DOWN,
    UP,
    MonotoneWitness,
    Params,
    Reindexed,
    certify_coarse_seq,
    compose_witnesses,
    interleave_even_odd,
    join_pair,
    merge_chain,
    sequence_distance,
    transport_base,
)
from coarse_ends.sequences.subseq import is_subsequence_str, next_match
from coarse_ends.space import FiniteModel

from .conftest import ACCEPTANCE_LINES
from .oracles import count_distinct_subsequences, grid_components, neighbor_components
from .seqgen import FUZZ_SPACES, random_base_seq, random_integer_seq, random_pair, rng_for

FUZZ_PAIRS = 10_000
FUZZ = Params(N=32, M=128)
P = Params(N=64, M=256)


def record(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


# 1. end counts ------------------------------------------------------------


def _lattice_offsets(dim, norm, K):
    out = []
    for v in itertools.product(range(-K, K + 1), repeat=dim):
        size = sum(map(abs, v)) if norm == "l1" else max(map(abs, v))
        if 0 < size <= K:
            out.append(v)
    return out


def _lattice_case(dim, norm, R):
    size = (lambda v: sum(map(abs, v))) if norm == "l1" else (lambda v: max(map(abs, v)))
    pts = [v for v in itertools.product(range(-R, R + 1), repeat=dim) if size(v) <= R]
    offsets = _lattice_offsets(dim, norm, 1)
    return pts, size, lambda p: (tuple(a + b for a, b in zip(p, o)) for o in offsets)


def _tree_case(R):
    pts = [w for n in range(R + 1) for w in itertools.product((0, 1), repeat=n)]
    return pts, len, lambda p: ([p[:-1]] if p else []) + [p + (0,), p + (1,)]


def _oracle(pts, radius, neighbors, radii, R, K=1):
    """Level counts and thread count from BFS on the truncation ``ball(R)``."""
    levels = []
    for r in radii:
        levels.append(neighbor_components([p for p in pts if r <= radius(p) <= R], neighbors))
    deepest = levels[-1]
    threads = {deepest[p] for p in deepest if radius(p) > R - K}
    return [len(set(lv.values())) for lv in levels], len(threads)


def _end_cases():
    zr = lambda p: abs(p)
    line = lambda p: (p - 1, p + 1)
    cases = []
    # (name, space, radii, horizons, truncation, radius, neighbours, expected count)
    cases.append(("Z", zoo.integers(), None, None, list(range(-64, 65)), zr, line, 2))
    cases.append(("N", zoo.naturals(), None, None, list(range(0, 65)), zr, line, 1))
    for norm in ("l1", "linf"):
        pts, size, nb = _lattice_case(2, norm, 32)
        cases.append((f"Z2[{norm}]", zoo.lattice(2, norm), (2, 4, 8, 16), (32, 64), pts, size, nb, 1))
    pts, size, nb = _lattice_case(3, "l1", 12)
    cases.append(("Z3", zoo.lattice(3, "l1"), (2, 4, 8), (12, 24), pts, size, nb, 1))
    # copy 1 is at infinite distance, so ball(R) about (0, 0) is copy 0 only
    union_pts = [(0, x) for x in range(-64, 65)]
    cases.append(("Z⊔Z", zoo.disjoint_union(zoo.integers(), zoo.integers()), None, None, union_pts,
                  lambda p: abs(p[1]), lambda p: ((0, p[1] - 1), (0, p[1] + 1)), 2))
    pts, size, nb = _tree_case(5)
    cases.append(("tree(2)", zoo.tree(2), None, None, pts, size, nb, None))
    return cases


def test_criterion_1_end_counts():
    failures, notes = [], []
    for name, space, radii, horizons, pts, radius, nb, expected in _end_cases():
        start = time.perf_counter()
        rep = end_count(space, 1, radii, horizons)
        elapsed = time.perf_counter() - start
        R = rep.horizons[0]
        # the truncation must be exactly ball(R), within the oracle's size limit
        truncation_ok = len(pts) <= 5000 and set(pts) == set(space.enumerate(R))
        levels, threads = _oracle(pts, radius, nb, rep.radii, R)
        ok = (
            truncation_ok
            and rep.count == expected
            and list(rep.level_counts) == levels
            and len(rep.threads) == threads
            and elapsed < 5
        )
        if expected is None:
            ok = ok and list(rep.level_counts) == [2, 4, 8] and not rep.stabilized
        shown = rep.count if rep.count is not None else f"not stabilized {list(rep.level_counts)}"
        notes.append(f"{name}={shown} ({elapsed:.2f}s)")
        if not ok:
            failures.append(f"{name}: engine {rep.count} {rep.level_counts}, oracle {levels} threads {threads}")
    record(1, not failures, "; ".join(failures or notes))


# 2 and 4: the shared fuzz suite --------------------------------------------


@pytest.fixture(scope="module")
def fuzz_suite():
    rng = rng_for(20261016)
    rows = []
    rejected = 0
    while len(rows) < FUZZ_PAIRS:
        s, t = random_pair(rng)
        try:
            certify_coarse_seq(s, FUZZ.N)
            certify_coarse_seq(t, FUZZ.N)
        except CertificationError:
            rejected += 1
            continue
        d = sequence_distance(s, t, FUZZ)
        rows.append((s, t, d, crosscheck_equivalence(s, t, FUZZ)))
    return rows, rejected


def _replays(s, u, w, n):
    """Independent replay: ``w`` strictly increasing and ``s(i) = u(w(i))``."""
    table = w.table(s.top(n))
    if any(a >= b for a, b in zip(table, table[1:])):
        return False
    return all(u.defined(j) and u(j) == s(i) for i, j in enumerate(table))


def test_criterion_2_value_set(fuzz_suite):
    rows, rejected = fuzz_suite
    values = Counter()
    bad = 0
    for s, t, d, _ in rows:
        values[d.label()] += 1
        if not (d.value is None or d.value is INF or (type(d.value) is int and d.value in (0, 1, 2))):
            bad += 1
        elif d.value == 2:
            sup = d.supersequence
            if sup is None or not (_replays(s, sup.u, sup.ws, FUZZ.N) and _replays(t, sup.u, sup.wt, FUZZ.N)):
                bad += 1
    spaces = len({s.space.name for s, *_ in rows})
    detail = f"{len(rows)} pairs over {spaces} spaces, {bad} violations, values {dict(sorted(values.items()))}"
    record(2, bad == 0 and len(rows) >= 10_000, detail)


SIGMA_ZOO = (
    zoo.naturals(), zoo.integers(), zoo.lattice(2, "l1"), zoo.lattice(2, "linf"), zoo.lattice(3, "l1"),
    zoo.disjoint_union(zoo.integers(), zoo.integers()), zoo.rescale(zoo.integers(), 2), zoo.tree(2),
    zoo.free_group(2), zoo.matrix_group([[[1, 1, 0], [0, 1, 0], [0, 0, 1]], [[1, 0, 0], [0, 1, 1], [0, 0, 1]]]),
)


def test_criterion_4_sigma_consistency(fuzz_suite):
    rows, _ = fuzz_suite
    mismatches, counts, contradictions, compared = [], [], 0, 0
    for space in SIGMA_ZOO:
        rep = end_count(space, space.geometry.unit())
        if not rep.stabilized:
            counts.append(f"{space.name}=skipped (not stabilized)")
            continue
        rng = random.Random(space.name)
        seqs = [random_base_seq(rng, space) for _ in range(6)] if space in FUZZ_SPACES else []
        seqs = [s for s in seqs if s.bound <= rep.K]
        sig = sigma(space, seqs, Params(N=64, M=256, K=rep.K))
        counts.append(f"{space.name}={sig.class_count}/{rep.count}")
        if sig.class_count != rep.count:
            mismatches.append(space.name)
        contradictions += len(sig.contradictions())
        compared += len(sig.crosscheck)
    for *_, rec in rows:
        compared += 1
        contradictions += rec.contradiction
    decided = sum(rec.agree is not None for *_, rec in rows)
    detail = (
        f"classes/threads {', '.join(counts)}; {contradictions} contradictions over {compared} "
        f"cross-checked pairs ({decided} fuzz pairs decided by both routes)"
    )
    record(4, not mismatches and contradictions == 0, detail)


# 3. confluence --------------------------------------------------------------


def _random_witness(rng, top=3):
    """A strictly increasing witness with w(0) = 0."""
    if rng.random() < 0.5:
        return MonotoneWitness.affine(rng.randint(1, top))
    values = list(itertools.accumulate([0] + [rng.randint(1, top) for _ in range(rng.randint(1, 6))]))
    slope = rng.randint(1, top)
    # the affine rule continues the table: w(i) = last + slope·(i - (n - 1))
    return MonotoneWitness(values, slope, values[-1] - slope * (len(values) - 1))


def _join_instance(rng):
    """(s, t, u, κ, λ) with s = t∘κ = u∘λ."""
    space = rng.choice(FUZZ_SPACES)
    t = random_base_seq(rng, space)
    mu, lam = _random_witness(rng), _random_witness(rng)
    kind = rng.randrange(3)
    if kind == 0:  # u = t∘μ, κ = μ∘λ
        u = Reindexed(t, mu)
        kappa = compose_witnesses(mu, lam)
    elif kind == 1:  # u interleaves s with itself
        kappa = mu
        s0 = Reindexed(t, kappa)
        u = interleave_even_odd(s0, s0, 64)
        lam = MonotoneWitness.affine(2, rng.randint(0, 1))
    else:  # u = t
        u, kappa = t, mu
        lam = mu
    s = Reindexed(t, kappa)
    return s, t, u, kappa, lam


# Inputs must certify at N_IN. A join places t(j) at an index of v no later
# than j plus the matching index in u, so each nested join can double the
# index at which escape shows; outputs of a k-link merge are certified at
# 2^k·N_IN.
N_IN = 64


def _valid(*seqs):
    try:
        return all(certify_coarse_seq(x, N_IN).passed for x in seqs)
    except CertificationError:
        return False


def _bound_ok(v, inputs, links):
    cert = certify_coarse_seq(v, N_IN << links)
    return cert.passed and cert.jump_sup <= v.bound <= max(x.bound for x in inputs)


def _random_chain(rng, links=4):
    space = rng.choice(FUZZ_SPACES)
    cur = random_base_seq(rng, space)
    chain = [(cur, None, None)]
    for _ in range(links):
        if rng.random() < 0.5:
            w = _random_witness(rng)
            nxt = Reindexed(cur, w)
            chain.append((nxt, DOWN, w))
        elif isinstance(cur, Reindexed) and rng.random() < 0.6:
            chain.append((cur.inner, UP, cur.kappa))
            nxt = cur.inner
        else:
            nxt = interleave_even_odd(cur, cur, 64)
            chain.append((nxt, UP, MonotoneWitness.affine(2, rng.randint(0, 1))))
        cur = nxt
    return chain


def test_criterion_3_confluence():
    rng = rng_for(3)
    joins = chains = invalid = 0
    failures = []
    while joins < 1000:
        s, t, u, kappa, lam = _join_instance(rng)
        if not _valid(s, t, u):
            invalid += 1
            continue
        joins += 1
        try:
            res = join_pair(s, t, u, kappa, lam)
            ok = _replays(t, res.v, res.t_witness, N_IN) and _replays(u, res.v, res.u_witness, N_IN)
            ok = ok and _bound_ok(res.v, (s, t, u), 1)
        except CoarseError as exc:
            ok, res = False, exc
        if not ok:
            failures.append(f"join {joins}: {res!r}")
    while chains < 200:
        chain = _random_chain(rng)
        seqs = [c[0] for c in chain]
        if not _valid(*seqs):
            invalid += 1
            continue
        chains += 1
        try:
            res = merge_chain(chain)
            ok = _replays(seqs[0], res.u, res.first_witness, N_IN)
            ok = ok and _replays(seqs[-1], res.u, res.last_witness, N_IN)
            ok = ok and _bound_ok(res.u, seqs, 4)
        except CoarseError as exc:
            ok, res = False, exc
        if not ok:
            failures.append(f"chain {chains}: {res!r}")
    detail = f"{joins} joins, {chains} four-link chains, {len(failures)} failures ({invalid} invalid draws skipped)"
    if failures:
        detail += f" (first: {failures[0]})"
    record(3, not failures, detail)


# 5. invariance ----------------------------------------------------------------


def _affine(a, b, source, target=None):
    return map_from_json({"kind": "affine", "a": a, "b": b}, source, target)


def _composable_pairs():
    Zs, Ns, Z2 = zoo.integers(), zoo.naturals(), zoo.lattice(2, "l1")
    embed = {"kind": "linear", "matrix": [[1], [0]]}
    pairs = []
    affines = [(1, 0), (-1, 0), (2, 1), (-2, 0), (3, -1), (1, 5)]
    for (a, b), (c, d) in itertools.islice(itertools.permutations(affines, 2), 12):
        pairs.append((Zs, Zs, Zs, {"kind": "affine", "a": a, "b": b}, {"kind": "affine", "a": c, "b": d}))
    for m in ([[0, -1], [1, 0]], [[1, 1], [0, 1]], [[2, 0], [0, 1]]):
        pairs.append((Zs, Z2, Z2, embed, {"kind": "linear", "matrix": m}))
    for a, b in ((1, 0), (-1, 0), (2, 3)):
        pairs.append((Ns, Zs, Zs, {"kind": "affine", "a": 1, "b": 0}, {"kind": "affine", "a": a, "b": b}))
    for a in (2, -1):
        pairs.append((Zs, Zs, Z2, {"kind": "affine", "a": a, "b": 0}, embed))
    return pairs


def _functoriality():
    reports = {}

    def rep(space):
        if space not in reports:
            reports[space] = sigma(space, [], P)
        return reports[space]

    bad = []
    pairs = _composable_pairs()
    for k, (X, Y, W, fd, gd) in enumerate(pairs):
        f = map_from_json(fd, X, Y)
        g = map_from_json(gd, Y, W)
        gf = map_from_json({"kind": "compose", "maps": [dict(fd, target=zoo.space_to_json(Y)), gd]}, X, W)
        sf = sigma_map(f, rep(X), rep(Y), P)
        sg = sigma_map(g, rep(Y), rep(W), P)
        sgf = sigma_map(gf, rep(X), rep(W), P)
        composed = compose_class_maps(sg, sf)
        if sgf.mapping != composed or None in composed.values():
            bad.append(k)
    return len(pairs), bad


def _bornotopy():
    Zs = zoo.integers()
    src = sigma(Zs, [], P)
    bad = []
    for (a, b), (c, d) in (((1, 0), (1, 1)), ((2, 0), (2, 3))):
        f, g = _affine(a, b, Zs), _affine(c, d, Zs)
        close = certify_bornotopic(f, g).passed
        same = sigma_map(f, src, src, P).mapping == sigma_map(g, src, src, P).mapping
        if not (close and same):
            bad.append(f"{a}x+{b} vs {c}x+{d}")
    return bad


def _coarse_equivalence():
    Zs, twoZ = zoo.integers(), zoo.rescale(zoo.integers(), 2)
    f, g = _affine("1/2", 0, Zs, twoZ), _affine(2, 0, twoZ, Zs)
    cert = certify_coarse_equivalence(f, g, 1)
    a, b = sigma(Zs, [], P), sigma(twoZ, [], P)
    sf, sg = sigma_map(f, a, b, P), sigma_map(g, b, a, P)
    gf, fg = compose_class_maps(sg, sf), compose_class_maps(sf, sg)
    bijective = len(set(sf.mapping.values())) == len(a.classes) == len(b.classes)
    ok = cert.passed and bijective and gf == {k: k for k in a.classes} and fg == {k: k for k in b.classes}
    return ok, len(a.classes)


def _base_point():
    Zs, Z5 = zoo.integers(), zoo.integers(5)
    rng = rng_for(5)
    seqs = [random_integer_seq(rng) for _ in range(12)]
    a = sigma(Zs, seqs, P)
    b = sigma(Z5, [transport_base(s, 5) for s in seqs], P)
    equipotent = a.class_count == b.class_count and sorted(a.classes.values()) == sorted(b.classes.values())
    moved = 0
    labels = Counter()
    for _ in range(100):
        s, t = random_pair(rng, Zs)
        d1 = sequence_distance(s, t, P)
        d2 = sequence_distance(transport_base(s, 5), transport_base(t, 5), P)
        labels[d1.label()] += 1
        moved += d1.label() == d2.label()
    return equipotent, moved, labels


def test_criterion_5_invariance():
    n_pairs, func_bad = _functoriality()
    born_bad = _bornotopy()
    ce_ok, n_classes = _coarse_equivalence()
    equipotent, preserved, labels = _base_point()
    ok = n_pairs >= 20 and not func_bad and not born_bad and ce_ok and equipotent and preserved == 100
    detail = (
        f"(a) {n_pairs - len(func_bad)}/{n_pairs} composable pairs functorial; "
        f"(b) bornotopic pairs {'agree' if not born_bad else 'differ: ' + ', '.join(born_bad)}; "
        f"(c) Z<->2Z inverse bijections on {n_classes} classes: {ce_ok}; "
        f"(d) base 0 -> 5 equipotent: {equipotent}, d_S preserved on {preserved}/100 pairs {dict(labels)}"
    )
    record(5, ok, detail)


# 6. oracle equivalence ------------------------------------------------------


def _random_model(rng):
    """A FiniteModel and a way to compute its BFS oracle."""
    kind = rng.random()
    if kind < 0.8:
        dim = rng.choice((1, 2, 3))
        norm = rng.choice(("l1", "linf"))
        n = rng.randint(1, 2000)
        side = max(2, int(round((n * rng.uniform(1.2, 4)) ** (1 / dim))))
        coords = np.unique(np.array([[rng.randrange(side) for _ in range(dim)] for _ in range(n)]), axis=0)
        K = rng.choice((1, 1, 2, 3))
        if dim == 1:
            geo, pts = zoo.Integers(), [int(c[0]) for c in coords]
            oracle = {int(k[0]): v[0] for k, v in grid_components(coords, K, norm).items()}
        else:
            geo = zoo.Lattice(dim, norm)
            pts = [tuple(int(x) for x in c) for c in coords]
            oracle = grid_components(coords, K, norm)
        return FiniteModel(pts, geo.dist, geometry=geo), K, oracle
    # non-lattice: subsets of the binary tree or of Z⊔Z, with a dense distance matrix
    if kind < 0.9:
        geo = zoo.Tree(2)
        pts = list({tuple(rng.randrange(2) for _ in range(rng.randint(0, 9))) for _ in range(rng.randint(1, 300))})
    else:
        geo = zoo.disjoint_union(zoo.integers(), zoo.integers()).geometry
        pts = list({(rng.randrange(2), rng.randrange(-80, 80)) for _ in range(rng.randint(1, 300))})
    K = rng.choice((1, 2, 3))
    D = np.array([[geo.dist(p, q) if geo.dist(p, q) is not INF else 10**9 for q in pts] for p in pts])
    adj = D <= K
    label = {}
    for i, p in enumerate(pts):
        if p in label:
            continue
        comp = np.zeros(len(pts), dtype=bool)
        frontier = comp.copy()
        frontier[i] = comp[i] = True
        while frontier.any():
            frontier = adj[frontier].any(axis=0) & ~comp
            comp |= frontier
        members = [pts[j] for j in np.flatnonzero(comp)]
        rep = min(members)
        for q in members:
            label[q] = rep
    return FiniteModel(pts, geo.dist, geometry=geo), K, label


def _same_partition(class_of, oracle):
    pairs = {}
    for p, c in class_of.items():
        if pairs.setdefault(c, oracle[p]) != oracle[p]:
            return False
    return len(set(class_of.values())) == len(set(oracle.values()))


def _canonical_strings(n):
    """Strings of length n over {0,1,2} whose letters first appear in order
    0, 1, 2 (one per orbit of the letter permutations)."""
    out = []
    for w in itertools.product(range(3), repeat=n):
        seen = -1
        ok = True
        for x in w:
            if x > seen + 1:
                ok = False
                break
            seen = max(seen, x)
        if ok:
            out.append(w)
    return out


def _greedy_count(t):
    """Strings accepted by greedy matching into ``t``, counted along the
    library's next-match steps (each step checked against ``t``)."""
    n = len(t)
    at = t.__getitem__
    accepted = [1] * (n + 1)  # accepted[p]: strings matchable from position p
    for p in range(n - 1, -1, -1):
        total = 1
        for c in (0, 1, 2):
            j = next_match(at, c, p, n - 1)
            if j is None:
                continue
            if not (p <= j < n and t[j] == c and c not in t[p:j]):
                return -1
            total += accepted[j + 1]
        accepted[p] = total
    return accepted[0]


def _exhaustive_small(max_t=5):
    """Direct library calls on every pair with |t| <= max_t and |s| <= |t| + 1."""
    words = {n: list(itertools.product("abc", repeat=n)) for n in range(max_t + 2)}
    mismatches = pairs = 0
    for n in range(max_t + 1):
        for t in words[n]:
            subs = {c for k in range(n + 1) for c in itertools.combinations(t, k)}
            for k in range(n + 2):
                for s in words[k]:
                    pairs += 1
                    mismatches += is_subsequence_str(s, t) != (s in subs)
    return pairs, mismatches


def test_criterion_6_oracle_equivalence():
    start = time.perf_counter()
    rng = rng_for(6)
    uf_bad = 0
    largest = 0
    for _ in range(500):
        model, K, oracle = _random_model(rng)
        largest = max(largest, len(model.points))
        part = k_chain_components(model, K)
        uf_bad += not _same_partition(part.class_of, oracle)
    pairs, direct_bad = _exhaustive_small()
    strings = 0
    count_bad = 0
    for n in range(1, 13):
        canon = _canonical_strings(n)
        strings += len(canon)
        exhaustive = count_distinct_subsequences(np.array(canon, dtype=np.int64))
        for t, e in zip(canon, exhaustive):
            count_bad += _greedy_count(t) != e
    elapsed = time.perf_counter() - start
    detail = (
        f"union-find vs BFS on 500 models (up to {largest} points): {uf_bad} mismatches; "
        f"greedy vs exhaustive: {direct_bad} mismatches over {pairs} direct pairs (|t| <= 5), "
        f"{count_bad} over all {strings} canonical t with |t| <= 12; {elapsed:.1f}s"
    )
    record(6, uf_bad == 0 and direct_bad == 0 and count_bad == 0 and elapsed < 60, detail)
