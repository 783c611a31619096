"""Command-line front end: pattern files, reports and DOT export.

Pattern grammar (one directive per line, ``#`` starts a comment)::

    qubits <n>
    plane <a> <P> <Q>
    edge <a> <b>
    stab <word>
    angle <a> <radians>
    igauge [<a> ...]
    ocomp [<a> ...]

Exit codes: 0 ok, 1 parse error, 2 invalid pair or sets, 3 closed time-like
curve where an order is required, 4 simulator guard.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from mbqcorder import ctc, flow, sim, transforms
from mbqcorder.exceptions import (
    IndexOutOfRange,
    InvalidPair,
    InvalidStabilizer,
    MBQCError,
    MixedSource,
    NoSelfLoop,
    NotRunnable,
    PatternError,
    PatternSyntaxError,
    RankMismatch,
    SelfLoopAtQubit,
    SimulationError,
    WrongStabCount,
)
from mbqcorder.flow import ProcessingRelations
from mbqcorder.gf2 import BitMatrix
from mbqcorder.stabilizer import XY, GeneratorMatrix, Plane, from_letters, graph_state

EXIT_OK, EXIT_PARSE, EXIT_PAIR, EXIT_CTC, EXIT_GUARD = 0, 1, 2, 3, 4


# -- pattern files ---------------------------------------------------------------


@dataclass
class Pattern:
    n: int
    edges: tuple[tuple[int, int], ...] = ()
    words: tuple[str, ...] = ()
    planes: tuple[Plane, ...] = ()
    angles: tuple[float, ...] = ()
    declared_igauge: tuple[int, ...] | None = None
    declared_ocomp: tuple[int, ...] | None = None
    path: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.planes:
            self.planes = (XY,) * self.n
        if not self.angles:
            self.angles = (0.0,) * self.n

    def generator_matrix(self) -> GeneratorMatrix:
        if self.words:
            return from_letters(self.words, self.planes)
        return graph_state(self.edges, self.n, self.planes)


def _int(tok: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise PatternSyntaxError(f"expected an integer, got {tok!r}", line) from None


def parse_text(text: str, path: str | None = None) -> Pattern:
    """Parse pattern-file text; errors carry 1-based line numbers."""
    n = None
    refs: list[tuple[int, int]] = []  # (qubit, line) for range checks
    planes: dict[int, Plane] = {}
    angles: dict[int, float] = {}
    edges: list[tuple[int, int]] = []
    words: list[str] = []
    first_edge = first_stab = None
    igauge = ocomp = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        key, args = toks[0], toks[1:]
        if key == "qubits":
            if n is not None or len(args) != 1:
                raise PatternSyntaxError("expected a single 'qubits <n>' line", lineno)
            n = _int(args[0], lineno)
            if n < 1:
                raise PatternSyntaxError("qubit count must be positive", lineno)
        elif key == "plane":
            if len(args) != 3:
                raise PatternSyntaxError("expected 'plane <a> <P> <Q>'", lineno)
            a = _int(args[0], lineno)
            try:
                planes[a] = Plane.parse(args[1], args[2])
            except ValueError as exc:
                raise PatternSyntaxError(str(exc), lineno) from None
            refs.append((a, lineno))
        elif key == "edge":
            if len(args) != 2:
                raise PatternSyntaxError("expected 'edge <a> <b>'", lineno)
            a, b = _int(args[0], lineno), _int(args[1], lineno)
            if a == b:
                raise PatternSyntaxError(f"self-edge at {a}", lineno)
            edges.append((a, b))
            refs += [(a, lineno), (b, lineno)]
            first_edge = first_edge or lineno
        elif key == "stab":
            if len(args) != 1 or set(args[0].upper()) - set("IXYZ"):
                raise PatternSyntaxError("expected 'stab <word over I,X,Y,Z>'", lineno)
            words.append(args[0].upper())
            first_stab = first_stab or lineno
        elif key == "angle":
            if len(args) != 2:
                raise PatternSyntaxError("expected 'angle <a> <radians>'", lineno)
            a = _int(args[0], lineno)
            try:
                phi = float(args[1])
            except ValueError:
                raise PatternSyntaxError(f"bad angle {args[1]!r}", lineno) from None
            if not -math.pi / 2 <= phi < math.pi / 2:
                raise PatternSyntaxError(f"angle {phi} outside [-pi/2, pi/2)", lineno)
            angles[a] = phi
            refs.append((a, lineno))
        elif key in ("igauge", "ocomp"):
            qs = tuple(sorted({_int(t, lineno) for t in args}))
            refs += [(a, lineno) for a in qs]
            if key == "igauge":
                igauge = qs
            else:
                ocomp = qs
        else:
            raise PatternSyntaxError(f"unknown directive {key!r}", lineno)

    if n is None:
        raise PatternSyntaxError("missing 'qubits <n>' line")
    if edges and words:
        raise MixedSource("both edge and stab lines present", max(first_edge, first_stab))
    for a, lineno in refs:
        if not 1 <= a <= n:
            raise IndexOutOfRange(f"qubit {a} outside 1..{n}", lineno)
    if words:
        if len(words) != n:
            raise WrongStabCount(f"expected {n} stab lines, got {len(words)}", first_stab)
        for w in words:
            if len(w) != n:
                raise PatternSyntaxError(f"stab word {w!r} does not have length {n}", first_stab)
    return Pattern(
        n,
        tuple(edges),
        tuple(words),
        tuple(planes.get(a, XY) for a in range(1, n + 1)),
        tuple(angles.get(a, 0.0) for a in range(1, n + 1)),
        igauge,
        ocomp,
        path,
    )


def parse(path: str | Path) -> Pattern:
    return parse_text(Path(path).read_text(encoding="utf-8"), str(path))


# -- reports -------------------------------------------------------------------


class Matrix(list):
    """Rows of 0/1 characters; rendered as a block in text reports."""

    def __init__(self, m: BitMatrix) -> None:
        super().__init__(m.row_strings())
        self.shape = m.shape


def fmt_float(x: float) -> str:
    return f"{x:.12g}"


def _fmt_value(v: object) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    return str(v)


def render_text(doc: dict, indent: int = 0) -> str:
    pad = " " * indent
    lines = []
    for k, v in doc.items():
        if isinstance(v, Matrix):
            r, c = v.shape
            if r == 0 or c == 0:
                lines.append(f"{pad}{k}: ({r}x{c})")
            else:
                lines.append(f"{pad}{k}:")
                lines += [f"{pad}  {row}" for row in v]
        elif isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(render_text(v, indent + 2))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}:")
            for item in v:
                lines.append(f"{pad}  -")
                lines.append(render_text(item, indent + 4))
        else:
            lines.append(f"{pad}{k}: {_fmt_value(v)}")
    return "\n".join(line for line in lines if line)


def _jsonable(v: object) -> object:
    if isinstance(v, float):
        return float(fmt_float(v))
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def emit(doc: dict, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(json.dumps(_jsonable(doc), indent=2) + "\n")
    else:
        sys.stdout.write(render_text(doc) + "\n")


def _warn(msg: str) -> None:
    sys.stderr.write(f"warning: {msg}\n")


def bits_expr(row: int, n: int, var: str = "s") -> str:
    terms = [f"{var}{a}" for a in range(1, n + 1) if (row >> (a - 1)) & 1]
    return " + ".join(terms) if terms else "0"


def relations_doc(p: ProcessingRelations) -> dict:
    return {
        "igauge": list(p.igauge),
        "ocomp": list(p.ocomp),
        "T": Matrix(p.T),
        "H": Matrix(p.H),
        "Z": Matrix(p.Z),
        "R": Matrix(p.R),
    }


def pattern_doc(pat: Pattern) -> dict:
    return {
        "qubits": pat.n,
        "planes": [str(pl) for pl in pat.planes],
        "angles": list(pat.angles),
    }


# -- pair resolution -----------------------------------------------------------


def resolve_relations(pat: Pattern, g: GeneratorMatrix, igauge: Sequence[int] | None, ocomp: Sequence[int] | None) -> ProcessingRelations:
    """Relations for the requested or declared pair, falling back to the default pair."""
    ig = igauge if igauge is not None else pat.declared_igauge
    oc = ocomp if ocomp is not None else pat.declared_ocomp
    if ig is None and oc is None:
        ig, oc = flow.default_pair(g)
        return flow.derive_processing(g, ig, oc)
    ig, oc = tuple(ig or ()), tuple(oc or ())
    for a in ig + oc:
        if not 1 <= a <= g.n:
            raise InvalidPair(f"qubit {a} outside 1..{g.n}")
    if len(set(ig)) == len(set(oc)):
        return flow.derive_processing(g, ig, oc)
    _warn(f"igauge={sorted(set(ig))}, ocomp={sorted(set(oc))} is not extremal; extremalizing within these sets")
    return flow.extremalize(g, ig, oc)[2]


def _load(args: argparse.Namespace) -> tuple[Pattern, GeneratorMatrix]:
    pat = parse(args.file)
    return pat, pat.generator_matrix()


def _relations(args: argparse.Namespace, pat: Pattern, g: GeneratorMatrix) -> ProcessingRelations:
    qubit = getattr(args, "qubit", None)
    if qubit is not None and not 1 <= qubit <= g.n:
        raise InvalidPair(f"qubit {qubit} outside 1..{g.n}")
    return resolve_relations(pat, g, args.igauge, args.ocomp)


# -- commands --------------------------------------------------------------------


def cmd_analyze(args: argparse.Namespace) -> int:
    pat, g = _load(args)
    p = _relations(args, pat, g)
    cn = flow.cones(p.T)
    rel = flow.temporal_relation(p.T)
    report = ctc.find_ctcs(p.T)
    inv = transforms.check_invariance(p, g)
    inputs, outputs = sorted(cn.inputs), sorted(cn.outputs)
    doc = pattern_doc(pat)
    doc.update(relations_doc(p))
    doc["fc"] = {str(a): sorted(cn.fc[a]) for a in range(1, p.n + 1)}
    doc["bc"] = {str(a): sorted(cn.bc[a]) for a in range(1, p.n + 1)}
    doc["I"] = inputs
    doc["O"] = outputs
    doc["igauge_equals_I"] = list(p.igauge) == inputs
    doc["ocomp_equals_O"] = list(p.ocomp) == outputs
    doc["relation"] = [f"{a}<{b}" for a, b in rel.pairs()]
    if rel.is_strict_partial_order:
        doc["classification"] = "strict-partial-order"
    else:
        doc["classification"] = "ctc"
        doc["self_loops"] = list(report.self_loops)
        doc["cycles"] = [list(c) for c in report.cycles]
    doc["gauge_invariance"] = "pass" if inv.passed else "fail"
    emit(doc, args.json)
    if args.require_order and not rel.is_strict_partial_order:
        return EXIT_CTC
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    _, g = _load(args)
    rels = flow.enumerate_relations(g)
    doc = {
        "count": len(rels),
        "relations": [{"igauge": list(r.igauge), "ocomp": list(r.ocomp), "T": Matrix(r.T)} for r in rels],
    }
    emit(doc, args.json)
    return EXIT_OK


def cmd_flip(args: argparse.Namespace) -> int:
    pat, g = _load(args)
    p = _relations(args, pat, g)
    a = args.qubit
    q = transforms.flip_plane(p, a)
    g2 = g.flip_plane(a)
    angles = list(pat.angles)
    angles[a - 1] = transforms.FLIP_ANGLE(angles[a - 1])
    doc = {
        "qubit": a,
        "planes": [str(pl) for pl in g2.planes],
        "angles": angles,
        **relations_doc(q),
        "rederived_match": flow.derive_processing(g2, q.igauge, q.ocomp) == q,
    }
    emit(doc, args.json)
    return EXIT_OK


def cmd_lc(args: argparse.Namespace) -> int:
    pat, g = _load(args)
    p = _relations(args, pat, g)
    t2, replanted = transforms.local_comp(p.T, args.qubit)
    doc = {
        "qubit": args.qubit,
        "T": Matrix(p.T),
        "T_new": Matrix(t2),
        "replanted": sorted(replanted),
        "closure_preserved": flow.transitive_closure(t2) == flow.transitive_closure(p.T),
    }
    emit(doc, args.json)
    return EXIT_OK


def cmd_orbit(args: argparse.Namespace) -> int:
    pat, g = _load(args)
    p = _relations(args, pat, g)
    orb = transforms.orbit(p.T)
    doc = {
        "size": len(orb),
        "elements": [{"index": k, "T": Matrix(e)} for k, e in enumerate(orb.elements)],
        "generators": {str(i): list(perm) for i, perm in orb.generators.items()},
    }
    emit(doc, args.json)
    return EXIT_OK


def cmd_remove_ctc(args: argparse.Namespace) -> int:
    pat, g = _load(args)
    p = _relations(args, pat, g)
    trace = ctc.remove_all(g, p)
    doc = {
        "steps": [
            {
                "kind": s.kind,
                "qubits": list(s.qubits),
                "flag": f"o{s.flag_qubit} = {bits_expr(s.flag_row, p.n)}",
            }
            for s in trace.steps
        ],
        "planes": [str(pl) for pl in trace.generators.planes],
        **relations_doc(trace.final),
        "flags": list(trace.flags),
        "classification": "strict-partial-order",
    }
    emit(doc, args.json)
    return EXIT_OK


def _parse_bits(text: str, k: int) -> int:
    if len(text) != k or set(text) - {"0", "1"}:
        raise InvalidPair(f"gauge vector must have {k} bits, got {text!r}")
    return sum(int(ch) << j for j, ch in enumerate(text))


def _parse_postselect(text: str) -> dict[int, int]:
    out = {}
    for item in text.split(","):
        try:
            key, val = item.split("=")
            out[int(key)] = int(val) & 1
        except ValueError:
            raise InvalidPair(f"bad post-selection item {item!r}; use <bit>=<value>") from None
    return out


def cmd_simulate(args: argparse.Namespace) -> int:
    pat, g = _load(args)
    p = _relations(args, pat, g)
    state = sim.resource_state(g)
    gauge = _parse_bits(args.gauge, len(p.igauge)) if args.gauge is not None else 0
    post = _parse_postselect(args.postselect) if args.postselect else {}
    for b in post:
        if not 0 <= b < len(p.ocomp):
            raise InvalidPair(f"output bit {b} outside 0..{len(p.ocomp) - 1}")
    cfg = sim.RunConfig(pat.angles, gauge, postselect=post)
    doc: dict = {"igauge": list(p.igauge), "ocomp": list(p.ocomp), "order": sim.linear_extension(p.T)}
    if post:
        dist, success = sim.run_postselected(state, p, cfg)
        doc["success_probability"] = success
    else:
        dist = sim.run_exact(state, p, cfg)
    doc["distribution"] = dist.as_strings()
    if args.compare_gauges:
        doc["gauge-independent"] = sim.verify_gauge_independence(state, p, pat.angles)
    emit(doc, args.json)
    return EXIT_OK


def dot(p: ProcessingRelations) -> str:
    lines = ["digraph influence {"]
    for a in range(1, p.n + 1):
        attrs = []
        if a in p.igauge and a in p.ocomp:
            attrs = ["shape=box", "peripheries=2"]
        elif a in p.igauge:
            attrs = ["shape=box"]
        elif a in p.ocomp:
            attrs = ["shape=doublecircle"]
        lines.append(f"  {a}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    for a in range(1, p.n + 1):
        for b in range(1, p.n + 1):
            if p.T[b - 1, a - 1]:
                lines.append(f"  {a} -> {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_dot(args: argparse.Namespace) -> int:
    pat, g = _load(args)
    sys.stdout.write(dot(_relations(args, pat, g)))
    return EXIT_OK


# -- entry point -------------------------------------------------------------------


def _qubits(text: str) -> tuple[int, ...]:
    toks = text.replace(",", " ").split()
    try:
        return tuple(int(t) for t in toks)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected qubit labels, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mbqcorder", description="Temporal order and CTC analysis of measurement patterns")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str, *, pair: bool = True, qubit: bool = False) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("file", help="pattern file")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if pair:
            sp.add_argument("--igauge", type=_qubits, default=None, help="gauge input set, e.g. '1' or '1,2'")
            sp.add_argument("--ocomp", type=_qubits, default=None, help="computational output set")
        if qubit:
            sp.add_argument("--qubit", type=int, required=True)
        sp.set_defaults(func=func)
        return sp

    an = add("analyze", cmd_analyze, "processing relations, cones and temporal relation")
    an.add_argument("--require-order", action="store_true", help="exit 3 if the relation has CTCs")
    add("enumerate", cmd_enumerate, "all extremal processing relations", pair=False)
    add("flip", cmd_flip, "plane flip at a qubit", qubit=True)
    add("lc", cmd_lc, "modified local complementation at a qubit", qubit=True)
    add("orbit", cmd_orbit, "local-complementation orbit of T")
    add("remove-ctc", cmd_remove_ctc, "remove closed time-like curves")
    sm = add("simulate", cmd_simulate, "exact output distribution")
    sm.add_argument("--gauge", default=None, help="gauge bits over igauge, e.g. '01'")
    sm.add_argument("--postselect", default=None, help="output-bit conditions, e.g. '0=0,1=0'")
    sm.add_argument("--compare-gauges", action="store_true", help="check gauge independence")
    add("export-dot", cmd_export_dot, "influence graph in DOT format")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PatternError, InvalidStabilizer, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except (InvalidPair, RankMismatch, SelfLoopAtQubit, NoSelfLoop) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PAIR
    except NotRunnable as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CTC
    except SimulationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_GUARD
    except MBQCError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PAIR


if __name__ == "__main__":
    sys.exit(main())
