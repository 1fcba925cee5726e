"""σ(X, ξ) from a family of coarse sequences, induced maps σ(f), and the
cross-check between the sequence calculus and the ends picture."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

from . import extdist
from .chains import EndReport
from .classify import EndClass, classify_sequence
from .errors import CoarseError, InputError
from .maps import MapModel
from .sequences.core import CoarseSequence, RayRule, certify_coarse_seq, even_subsequence, push_forward
from .sequences.distance import Params, report_for, sequence_distance

log = logging.getLogger(__name__)

EQUIVALENT = "equivalent"
INEQUIVALENT = "inequivalent"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class CrosscheckRecord:
    ends: str
    sequence: str
    d_S: str
    agree: bool | None  # None when either route is unknown

    @property
    def contradiction(self) -> bool:
        return self.agree is False

    def to_json(self):
        return {"ends": self.ends, "sequence": self.sequence, "d_S": self.d_S, "agree": self.agree}


def _ends_route(s, t, report) -> str:
    cs, ct = classify_sequence(s, report), classify_sequence(t, report)
    if not (cs.known and ct.known):
        return UNKNOWN
    if cs.id == ct.id:
        return EQUIVALENT
    m = len(report.radii) - 1
    if report.outer.class_at(m, cs.id) != report.outer.class_at(m, ct.id):
        return INEQUIVALENT
    return UNKNOWN


def crosscheck_equivalence(s: CoarseSequence, t: CoarseSequence, params: Params | None = None,
                           report: EndReport | None = None) -> CrosscheckRecord:
    """Same thread? versus d_S finite? (the latter by supersequence
    construction or breadth-first separation, never by the union-find)."""
    params = params or Params()
    if report is None:
        K = extdist.ext_max([s.bound, t.bound, s.space.geometry.unit()])
        try:
            report = report_for(s.space, params, K)
        except InputError:
            return CrosscheckRecord(UNKNOWN, UNKNOWN, "Unknown", None)
    try:
        ends = _ends_route(s, t, report)
    except InputError:
        ends = UNKNOWN
    d = sequence_distance(s, t, params, report, infinity_route="search")
    if d.value is None:
        seq = UNKNOWN
    elif d.value is extdist.INF:
        seq = INEQUIVALENT
    else:
        seq = EQUIVALENT
    agree = None if UNKNOWN in (ends, seq) else ends == seq
    return CrosscheckRecord(ends, seq, d.label(), agree)


# representatives ----------------------------------------------------------


def _letter_path(geo, base, goal, inside: dict):
    if base == goal:
        return []
    prev = {base: None}
    queue = deque([base])
    letters = geo.letters()
    while queue:
        p = queue.popleft()
        for a in letters:
            try:
                q = geo.step(p, a)
            except InputError:
                continue
            if q in prev or q not in inside:
                continue
            prev[q] = (p, a)
            if q == goal:
                word = []
                while prev[q] is not None:
                    q, a = prev[q]
                    word.append(a)
                return word[::-1]
            queue.append(q)
    return None


def _cycle_escapes(geo, space, start, cycle, outer, level, target_class, stop) -> bool:
    p = start
    r = space.radius(p)
    while r <= stop:
        for a in cycle:
            try:
                p = geo.step(p, a)
            except InputError:
                return False
            q_r = space.radius(p)
            if q_r <= stop and q_r >= outer.radii[level] and outer.class_at(level, p) != target_class:
                return False
        nr = space.radius(p)
        if not nr > r:
            return False
        r = nr
    return True


def generate_representatives(report: EndReport) -> dict:
    """One ray-rule sequence per thread: a letter path from the base to the
    thread's shell point, then a short cycle whose iterates strictly escape
    while staying in the thread's class at the doubled horizon."""
    space = report.space
    geo = space.geometry
    letters = geo.letters()
    if not letters:
        return {}
    inside = report.tower.radius_of
    m = len(report.radii) - 1
    out = {}
    cycles = [(a,) for a in letters] + [(a, b) for a in letters for b in letters if a != b]
    for thread in report.threads:
        path = _letter_path(geo, space.base, thread.shell_point, inside)
        if path is None:
            continue
        target = report.outer.class_at(m, thread.id)
        for cycle in cycles:
            if not _cycle_escapes(geo, space, thread.shell_point, cycle, report.outer, m, target, report.horizons[1]):
                continue
            seq = RayRule(space, path, cycle)
            if seq.bound > report.K:
                continue
            cls = classify_sequence(seq, report)
            if cls.known and cls.id == thread.id:
                out[thread.id] = seq
                break
    return out


# sigma ----------------------------------------------------------------------


@dataclass
class SigmaReport:
    space: object
    inputs: list
    assignments: list  # EndClass, or None when the input was rejected
    failures: dict  # input index -> message
    representatives: dict  # thread id -> CoarseSequence
    end_report: EndReport
    crosscheck: list = field(default_factory=list)  # (i, j, CrosscheckRecord)

    @property
    def classes(self) -> dict:
        """Thread id -> indices of the inputs classified into it."""
        out: dict = {}
        for i, cls in enumerate(self.assignments):
            if cls is not None and cls.known:
                out.setdefault(cls.id, []).append(i)
        for tid in self.representatives:
            out.setdefault(tid, [])
        return {k: out[k] for k in sorted(out)}

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def member(self, thread_id):
        """A sequence in the given class (an input first, else the representative)."""
        for i in self.classes.get(thread_id, []):
            return self.inputs[i]
        return self.representatives.get(thread_id)

    def contradictions(self) -> list:
        return [(i, j, rec) for i, j, rec in self.crosscheck if rec.contradiction]

    def to_json(self) -> dict:
        pj = self.space.geometry.point_to_json
        ids = list(self.classes)
        labels = {tid: k for k, tid in enumerate(ids)}
        rows = []
        for i, cls in enumerate(self.assignments):
            if i in self.failures:
                rows.append({"input": i, "status": "rejected", "reason": self.failures[i]})
            elif cls is None or not cls.known:
                rows.append({"input": i, "status": "unknown", "reason": cls.reason if cls else ""})
            else:
                rows.append({"input": i, "status": "classified", "class": labels[cls.id], "thread": pj(cls.id)})
        return {
            "space": self.space.name,
            "class_count": self.class_count,
            "classes": [
                {
                    "label": labels[tid],
                    "thread": pj(tid),
                    "inputs": members,
                    "representative": self.representatives[tid].describe() if tid in self.representatives else None,
                }
                for tid, members in self.classes.items()
            ],
            "partition": rows,
            "crosscheck": [{"pair": [i, j], **rec.to_json()} for i, j, rec in self.crosscheck],
            "ends": self.end_report.to_json(),
        }


def sigma(space, seqs, params: Params | None = None, auto_representatives: bool = True,
          crosscheck: bool = True) -> SigmaReport:
    """Partition ``seqs`` into sequential-end classes and cross-check pairs.

    ``K`` defaults to the largest declared jump bound (at least the
    geometry's unit step). Sequences that fail certification are recorded
    and skipped.
    """
    params = params or Params()
    seqs = list(seqs)
    failures = {}
    ok = []
    for i, s in enumerate(seqs):
        if s.space != space:
            failures[i] = f"sequence lives in {s.space!r}"
            continue
        try:
            cert = certify_coarse_seq(s, params.N)
            if not cert.anchored:
                raise InputError("sequence does not start at the base point")
            if not cert.escape_grows:
                raise InputError("escape evidence does not grow (not proper at this horizon)")
        except CoarseError as exc:
            failures[i] = str(exc)
            continue
        ok.append(i)
    K = params.K
    if K is None:
        K = extdist.ext_max([seqs[i].bound for i in ok] + [space.geometry.unit()])
    report = report_for(space, params, K)
    assignments: list = [None] * len(seqs)
    for i in ok:
        try:
            assignments[i] = classify_sequence(seqs[i], report)
        except InputError as exc:
            failures[i] = str(exc)
    reps = generate_representatives(report) if auto_representatives else {}
    result = SigmaReport(space, seqs, assignments, failures, reps, report)
    if crosscheck:
        family = [i for i in ok if i not in failures]
        for a in range(len(family)):
            for b in range(a + 1, len(family)):
                i, j = family[a], family[b]
                result.crosscheck.append((i, j, crosscheck_equivalence(seqs[i], seqs[j], params, report)))
    log.info("sigma: %d classes over %d inputs (%d rejected)", result.class_count, len(seqs), len(failures))
    return result


# induced maps ---------------------------------------------------------------


@dataclass
class ClassMap:
    """``σ(f)`` on the computed classes: source thread id -> target thread id."""

    f: MapModel
    mapping: dict
    checks: dict
    violations: list
    target: EndReport

    def to_json(self, source_space) -> dict:
        ps = source_space.geometry.point_to_json
        pt = self.target.space.geometry.point_to_json
        return {
            "map": self.f.name,
            "mapping": [
                {"source": ps(k), "target": pt(v) if v is not None else None, "check": self.checks.get(k)}
                for k, v in self.mapping.items()
            ],
            "violations": [ps(v) for v in self.violations],
        }


class _TargetClassifier:
    """Classifies pushed sequences against a fixed target report.

    A pushed sequence may jump further than the target's ``K``. It is then
    classified in a coarser tower, and the result is translated back
    through the target's thread representatives (which are valid at every
    larger scale).
    """

    def __init__(self, report: EndReport, params: Params, reps: dict | None = None):
        self.report = report
        self.params = params
        self._reps = reps
        self._coarser: dict = {}

    @property
    def reps(self) -> dict:
        if self._reps is None:
            self._reps = generate_representatives(self.report)
        return self._reps

    def _translation(self, K):
        if K not in self._coarser:
            coarse = report_for(self.report.space, self.params, K)
            table: dict = {}
            for tid, rep in self.reps.items():
                cid = classify_sequence(rep, coarse).id
                table[cid] = None if cid in table else tid  # collisions stay unknown
            if len(self.reps) < len(self.report.threads):
                table = {}
            self._coarser[K] = (coarse, table)
        return self._coarser[K]

    def classify(self, seq: CoarseSequence) -> EndClass:
        if seq.bound <= self.report.K:
            return classify_sequence(seq, self.report)
        coarse, table = self._translation(seq.bound)
        cls = classify_sequence(seq, coarse)
        if not cls.known:
            return cls
        tid = table.get(cls.id)
        if tid is None:
            return EndClass(None, seq, coarse.K, reason="coarser thread has no unique counterpart in the target report")
        return EndClass(tid, seq, coarse.K, cls.chain, cls.exit_index)


def _pushed(f: MapModel, s: CoarseSequence, target_space):
    from .sequences.core import transport_base

    pushed = push_forward(f, s, rebase=True)
    if pushed.space != target_space:
        pushed = transport_base(pushed, target_space.base)
    return pushed


def pushed_bound(f: MapModel, s: CoarseSequence):
    return push_forward(f, s, rebase=True).bound


def sigma_map(f: MapModel, src: SigmaReport, target=None, params: Params | None = None) -> ClassMap:
    """Push one member of each source class through ``f`` and classify it
    in the target; a second member (another input, or the even-index
    subsequence) checks well-definedness.

    ``target`` may be an EndReport, a SigmaReport, or None (a report for
    ``f.target`` at the largest pushed jump bound is built). Refuses maps
    that do not certify as coarse.
    """
    params = params or Params()
    members = {tid: src.member(tid) for tid in src.classes}
    reps = None
    if isinstance(target, SigmaReport):
        reps = target.representatives or None
        target = target.end_report
    if target is None:
        bounds = [pushed_bound(f, s) for s in members.values() if s is not None]
        K = extdist.ext_max(bounds + [f.target.geometry.unit()])
        target = report_for(f.target, params, K)
    if f.target != target.space and f.target.geometry != target.space.geometry:
        raise InputError(f"map lands in {f.target!r}, target report is over {target.space!r}")
    clf = _TargetClassifier(target, params, reps)
    mapping, checks, violations = {}, {}, []
    for tid, s in members.items():
        if s is None:
            mapping[tid] = None
            continue
        first = clf.classify(_pushed(f, s, target.space))
        mapping[tid] = first.id
        others = [src.inputs[i] for i in src.classes[tid] if src.inputs[i] is not s]
        second_seq = others[0] if others else even_subsequence(s)
        try:
            second = clf.classify(_pushed(f, second_seq, target.space))
        except CoarseError as exc:
            checks[tid] = f"unchecked: {exc}"
            continue
        if not (first.known and second.known):
            checks[tid] = "unknown"
        elif first.id == second.id:
            checks[tid] = "consistent"
        else:
            checks[tid] = "violation"
            violations.append(tid)
    return ClassMap(f, mapping, checks, violations, target)


def compose_class_maps(g_map: ClassMap, f_map: ClassMap) -> dict:
    """``σ(g)∘σ(f)`` as a plain dict."""
    return {k: (g_map.mapping.get(v) if v is not None else None) for k, v in f_map.mapping.items()}


def sigma_dot(report: SigmaReport, class_map: ClassMap | None = None) -> str:
    pj = report.space.geometry.point_to_json
    lines = ["digraph sigma {", "  rankdir=LR;"]
    for k, (tid, members) in enumerate(report.classes.items()):
        lines.append(f'  "src{k}" [label="{report.space.name}\\n{pj(tid)}\\n{len(members)} inputs"];')
    if class_map is not None:
        tgt = class_map.target
        tp = tgt.space.geometry.point_to_json
        tids = tgt.thread_ids()
        for k, tid in enumerate(tids):
            lines.append(f'  "tgt{k}" [label="{tgt.space.name}\\n{tp(tid)}"];')
        src_ids = list(report.classes)
        for sid, tid in class_map.mapping.items():
            if tid is not None and tid in tids:
                lines.append(f'  "src{src_ids.index(sid)}" -> "tgt{tids.index(tid)}" [label="{class_map.f.name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "EndClass", "classify_sequence", "CrosscheckRecord", "crosscheck_equivalence",
    "generate_representatives", "SigmaReport", "sigma", "ClassMap", "sigma_map",
    "compose_class_maps", "sigma_dot", "EQUIVALENT", "INEQUIVALENT", "UNKNOWN",
]
