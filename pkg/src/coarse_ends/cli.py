"""Command-line front end.

Exit codes:
  0  success
  1  bad input (malformed JSON, unknown fields, refused sequence or map)
  2  ends not stabilized (``ends compute`` only)
  3  a requested verification failed (``map verify``), or ``sigma compute``
     found a well-definedness violation or contradictory cross-check
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

from . import extdist
from .chains import DEFAULT_MAX_POINTS, end_count
from .ends import sigma, sigma_dot, sigma_map
from .errors import CoarseError
from .maps import CertificateBundle, certify_bornotopic, certify_coarse_equivalence, map_from_json, verify_map
from .sequences.core import certify_coarse_seq, seq_from_json
from .sequences.distance import Params, sequence_distance
from .sequences.subseq import is_subsequence
from .zoo import ZOO_KINDS, space_from_json, space_to_json

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNSTABLE = 2
EXIT_FAILED = 3

SCHEMA = 1
FORMATS = ("json", "dot", "text")
CHECKS = ("all", "bornologous", "proper", "coarse", "bornotopic", "coarse-equivalence")

log = logging.getLogger("coarse_ends")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    command: str
    space: str | None = None
    seqs: list = field(default_factory=list)
    map: str | None = None
    target: str | None = None
    other: str | None = None
    check: str = "all"
    K: object = None
    radii: tuple | None = None
    horizons: tuple | None = None
    N: int = 256
    M: int = 1024
    max_points: int = DEFAULT_MAX_POINTS
    fmt: str = "json"
    seed: int | None = None
    out: str | None = None
    representatives: bool = True

    def params(self) -> Params:
        return Params(self.N, self.M, self.K, self.radii, self.horizons, self.max_points)


# parsing -----------------------------------------------------------------


def _scalar(text: str, what: str):
    try:
        value = extdist.parse(text if "/" in text or text == "inf" else int(text))
    except (ValueError, CoarseError) as exc:
        raise UsageError(f"{what}: expected an integer, 'p/q' or 'inf', got {text!r}") from exc
    return value


def _list(text: str, what: str) -> tuple:
    return tuple(_scalar(x.strip(), what) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coarse-ends", description="Coarse ends, sequential ends and certified coarse maps.")
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def common(sp, space=True):
        if space:
            sp.add_argument("--space", required=True, help="space description (JSON file)")
        sp.add_argument("-K", dest="K", help="chain scale (integer, 'p/q')")
        sp.add_argument("--radii", help="comma-separated annulus radii r_1 < ... < r_m")
        sp.add_argument("--horizon", help="outer radius R, or 'R,R2' for both horizons")
        sp.add_argument("-N", dest="N", type=int, default=256, help="certification prefix (default 256)")
        sp.add_argument("-M", dest="M", type=int, default=1024, help="search horizon (default 1024)")
        sp.add_argument("--max-points", type=int, default=DEFAULT_MAX_POINTS, help="ball budget for default schedules")
        sp.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
        sp.add_argument("--seed", type=int, help="recorded in the report; the pipelines are deterministic")
        sp.add_argument("--out", help="write the report here instead of stdout")

    ends = sub.add_parser("ends").add_subparsers(dest="action", required=True, parser_class=_Parser)
    common(ends.add_parser("compute", help="count ends with the annulus tower"))

    sig = sub.add_parser("sigma").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sc = sig.add_parser("compute", help="partition sequences into sequential ends")
    common(sc)
    sc.add_argument("--seq", action="append", default=[], help="sequence file (object or list); repeatable")
    sc.add_argument("--map", help="also compute the induced map of this map")
    sc.add_argument("--target", help="target space of --map (default: the source space)")
    sc.add_argument("--no-representatives", dest="representatives", action="store_false",
                    help="do not generate one ray per thread")

    seq = sub.add_parser("seq").add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, text in (("distance", "d_S of two sequences"), ("subseq", "is the first a subsequence of the second?")):
        sp = seq.add_parser(name, help=text)
        common(sp)
        sp.add_argument("--seq", action="append", default=[], help="sequence file; give exactly two")

    mp = sub.add_parser("map").add_subparsers(dest="action", required=True, parser_class=_Parser)
    mv = mp.add_parser("verify", help="certify a map")
    common(mv)
    mv.add_argument("--map", required=True, help="map description (JSON file)")
    mv.add_argument("--target", help="target space (default: the source space)")
    mv.add_argument("--other", "--inverse", dest="other",
                    help="second map: compared for bornotopic, inverse for coarse-equivalence")
    mv.add_argument("--check", choices=CHECKS, default="all")

    zoo = sub.add_parser("zoo").add_subparsers(dest="action", required=True, parser_class=_Parser)
    zl = zoo.add_parser("list", help="list the space kinds")
    zl.add_argument("--format", dest="fmt", choices=("json", "text"), default="text")
    zl.add_argument("--out")
    return p


def parse_config(argv) -> RunConfig:
    """Parse and validate every override before any computation."""
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(command=f"{ns.group} {ns.action}", fmt=ns.fmt, out=ns.out)
    if ns.group == "zoo":
        return cfg
    cfg.space = ns.space
    cfg.seqs = list(getattr(ns, "seq", []) or [])
    cfg.map = getattr(ns, "map", None)
    cfg.target = getattr(ns, "target", None)
    cfg.other = getattr(ns, "other", None)
    cfg.check = getattr(ns, "check", "all")
    cfg.representatives = getattr(ns, "representatives", True)
    cfg.seed = ns.seed
    cfg.N, cfg.M, cfg.max_points = ns.N, ns.M, ns.max_points
    if cfg.N < 1 or cfg.M < cfg.N:
        raise UsageError("need 1 <= N <= M")
    if cfg.max_points < 1:
        raise UsageError("--max-points must be positive")
    if ns.K is not None:
        cfg.K = _scalar(ns.K, "-K")
        if not (extdist.is_finite(cfg.K) and cfg.K > 0):
            raise UsageError("-K must be a positive finite scale")
    if ns.radii is not None:
        cfg.radii = _list(ns.radii, "--radii")
        if not cfg.radii:
            raise UsageError("--radii is empty")
    if ns.horizon is not None:
        h = _list(ns.horizon, "--horizon")
        if len(h) not in (1, 2):
            raise UsageError("--horizon takes R or R,R2")
        cfg.horizons = h if len(h) == 2 else (h[0], 2 * h[0])
        if cfg.radii is None:
            raise UsageError("--horizon needs --radii")
    if cfg.command in ("seq distance", "seq subseq") and len(cfg.seqs) != 2:
        raise UsageError(f"{cfg.command} needs exactly two --seq files")
    if cfg.fmt == "dot" and cfg.command not in ("ends compute", "sigma compute"):
        raise UsageError(f"--format dot is not available for {cfg.command}")
    if cfg.check in ("bornotopic", "coarse-equivalence") and cfg.other is None:
        raise UsageError(f"--check {cfg.check} needs --other/--inverse")
    return cfg


# loading -------------------------------------------------------------------


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if isinstance(data, dict) and "schema" in data:
        if data["schema"] != SCHEMA:
            raise UsageError(f"{path}: unsupported schema {data['schema']!r} (expected {SCHEMA})")
        data = {k: v for k, v in data.items() if k != "schema"}
    return data


def _in_file(path, fn, *args):
    try:
        return fn(*args)
    except CoarseError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed description ({exc})") from exc


def _load_space(path):
    return _in_file(path, space_from_json, load_json(path))


def _load_seqs(path, space) -> list:
    data = load_json(path)
    items = data if isinstance(data, list) else [data]
    return [_in_file(path, seq_from_json, item, space) for item in items]


def _load_map(path, source, target):
    return _in_file(path, map_from_json, load_json(path), source, target)


# commands ------------------------------------------------------------------


def _envelope(cfg: RunConfig, body: dict) -> dict:
    out = {"schema": SCHEMA, "command": cfg.command}
    if cfg.seed is not None:
        out["seed"] = cfg.seed
    out.update(body)
    return out


def cmd_ends(cfg: RunConfig):
    space = _load_space(cfg.space)
    report = end_count(space, cfg.K, cfg.radii, cfg.horizons, cfg.max_points)
    code = EXIT_OK if report.count is not None else EXIT_UNSTABLE
    if cfg.fmt == "dot":
        return report.to_dot(), code
    body = _envelope(cfg, {"space": space_to_json(space), "report": report.to_json()})
    if cfg.fmt == "text":
        count = report.count if report.count is not None else "not stabilized"
        lines = [
            f"space: {space.name} (base {space.geometry.point_to_json(space.base)})",
            f"K: {extdist.to_json(report.K)}",
            f"radii: {', '.join(str(extdist.to_json(r)) for r in report.radii)}",
            f"horizons: {', '.join(str(extdist.to_json(r)) for r in report.horizons)}",
            f"level counts: {', '.join(map(str, report.level_counts))}",
            f"ends: {count}",
        ]
        return "\n".join(lines) + "\n", code
    return body, code


def cmd_sigma(cfg: RunConfig):
    space = _load_space(cfg.space)
    seqs = [s for path in cfg.seqs for s in _load_seqs(path, space)]
    params = cfg.params()
    f = None
    target = space
    if cfg.map is not None:
        target = _load_space(cfg.target) if cfg.target else space
        f = _load_map(cfg.map, space, target)
    report = sigma(space, seqs, params, auto_representatives=cfg.representatives)
    class_map = None
    if f is not None:
        tgt_report = sigma(target, [], params) if target != space else report
        class_map = sigma_map(f, report, tgt_report, params)
    bad = bool(report.contradictions()) or bool(class_map and class_map.violations)
    code = EXIT_FAILED if bad else EXIT_OK
    if cfg.fmt == "dot":
        return sigma_dot(report, class_map), code
    body = {"space": space_to_json(space), "sigma": report.to_json()}
    if class_map is not None:
        body["target"] = space_to_json(target)
        body["sigma_map"] = class_map.to_json(space)
    if cfg.fmt == "text":
        pj = space.geometry.point_to_json
        lines = [f"space: {space.name}", f"classes: {report.class_count}"]
        for k, (tid, members) in enumerate(report.classes.items()):
            lines.append(f"  [{k}] thread {pj(tid)}: inputs {members}")
        for i, why in sorted(report.failures.items()):
            lines.append(f"  rejected input {i}: {why}")
        for i, j, rec in report.crosscheck:
            lines.append(f"  pair ({i}, {j}): ends {rec.ends}, sequences {rec.sequence} (d_S = {rec.d_S})")
        if class_map is not None:
            tp = target.geometry.point_to_json
            for sid, tid in class_map.mapping.items():
                shown = tp(tid) if tid is not None else "unknown"
                lines.append(f"  sigma({f.name}): {pj(sid)} -> {shown} [{class_map.checks.get(sid)}]")
        return "\n".join(lines) + "\n", code
    return _envelope(cfg, body), code


def _two(cfg):
    space = _load_space(cfg.space)
    pair = []
    for path in cfg.seqs:
        seqs = _load_seqs(path, space)
        if len(seqs) != 1:
            raise UsageError(f"{path}: expected a single sequence")
        _in_file(path, certify_coarse_seq, seqs[0], cfg.N)
        pair.append(seqs[0])
    return space, pair


def cmd_distance(cfg: RunConfig):
    space, (s, t) = _two(cfg)
    result = sequence_distance(s, t, cfg.params())
    if cfg.fmt == "text":
        lines = [result.label()] + [f"  {k}: {v}" for k, v in sorted(result.trace.items())]
        return "\n".join(lines) + "\n", EXIT_OK
    body = {"space": space_to_json(space), "value": result.label(), "result": result.to_json()}
    return _envelope(cfg, body), EXIT_OK


def cmd_subseq(cfg: RunConfig):
    space, (s, t) = _two(cfg)
    verdict = is_subsequence(s, t, cfg.N, cfg.M)
    if cfg.fmt == "text":
        return f"{verdict.status}\n", EXIT_OK
    return _envelope(cfg, {"space": space_to_json(space), "verdict": verdict.to_json()}), EXIT_OK


def cmd_verify_map(cfg: RunConfig):
    source = _load_space(cfg.space)
    target = _load_space(cfg.target) if cfg.target else source
    f = _load_map(cfg.map, source, target)
    K = cfg.K if cfg.K is not None else source.geometry.unit()
    if cfg.check == "coarse-equivalence":
        g = _load_map(cfg.other, target, source)
        bundle = certify_coarse_equivalence(f, g, K)
        requested = list(bundle.certificates)
    else:
        bundle = verify_map(f, K)
        if cfg.check == "bornotopic":
            g = _load_map(cfg.other, source, target)
            bundle.certificates["bornotopic"] = certify_bornotopic(f, g)
            bundle.base_preserving[g.name] = g.preserves_base()
        requested = ["bornologous", "proper", "coarse"] if cfg.check == "all" else [cfg.check]
    ok = all(bundle.certificates[k].passed for k in requested)
    code = EXIT_OK if ok else EXIT_FAILED
    if cfg.fmt == "text":
        lines = [f"{k}: {c.verdict}" for k, c in bundle.certificates.items()]
        lines.append("result: " + ("pass" if ok else "fail"))
        return "\n".join(lines) + "\n", code
    body = {
        "map": f.to_json(),
        "requested": requested,
        "certificates": _bundle_json(bundle, source, target),
        "base_preserving": bundle.base_preserving,
        "passed": ok,
    }
    return _envelope(cfg, body), code


def _bundle_json(bundle: CertificateBundle, source, target) -> dict:
    def pj(p):
        for geo in (source.geometry, target.geometry):
            if geo.contains(p):
                return geo.point_to_json(p)
        return repr(p)

    return {k: c.to_json(pj) for k, c in bundle.certificates.items()}


def cmd_zoo(cfg: RunConfig):
    if cfg.fmt == "json":
        return _envelope(cfg, {"zoo": [{"kind": k, "description": v} for k, v in ZOO_KINDS.items()]}), EXIT_OK
    return "".join(f"{k:16} {v}\n" for k, v in ZOO_KINDS.items()), EXIT_OK


COMMANDS = {
    "ends compute": cmd_ends,
    "sigma compute": cmd_sigma,
    "seq distance": cmd_distance,
    "seq subseq": cmd_subseq,
    "map verify": cmd_verify_map,
    "zoo list": cmd_zoo,
}


# entry point ---------------------------------------------------------------


def _setup_logging():
    raw = os.environ.get("COARSE_ENDS_LOG", "WARNING").upper()
    level = int(raw) if raw.isdigit() else logging.getLevelName(raw)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def render(payload) -> str:
    if isinstance(payload, str):
        return payload
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def main(argv=None) -> int:
    _setup_logging()
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        payload, code = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CoarseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_INPUT
    text = render(payload)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
