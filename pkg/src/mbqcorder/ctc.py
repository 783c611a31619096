"""Detection and removal of closed time-like curves (CTCs).

A CTC is a self-loop ``T[a, a] == 1`` or a directed cycle of the influence
graph (edge ``a -> b`` iff ``T[b, a] == 1``). Both are removed by enlarging
the gauge-input and output sets. Each removal adds one output bit, a flag,
whose value 0 certifies that the adaptation that could not be implemented
happened to hold.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field

from mbqcorder.exceptions import BoundaryOverlap, BoundaryQubit, NoSelfLoop, NotMinimal
from mbqcorder.flow import (
    NormalForm,
    ProcessingRelations,
    cones,
    derive_processing,
    operators_from_relations,
    relations_from_operators,
    temporal_relation,
)
from mbqcorder.gf2 import BitMatrix
from mbqcorder.stabilizer import GeneratorMatrix, PauliWord, multiply


@dataclass(frozen=True)
class CtcReport:
    """Self-loops and one shortest cycle per strongly connected component.

    ``minimal_witness[k]`` states whether ``cycles[k]`` has no chords, i.e.
    ``fc(c_i) & cycle == {c_(i+1)}`` for every member.
    """

    self_loops: tuple[int, ...]
    cycles: tuple[tuple[int, ...], ...]
    minimal_witness: tuple[bool, ...]

    def __bool__(self) -> bool:
        return bool(self.self_loops or self.cycles)


def is_minimal_cycle(t: BitMatrix, cycle: Sequence[int]) -> bool:
    """Does every member feed exactly its successor inside the cycle?"""
    members = set(cycle)
    fc = cones(t).fc
    return all(fc[c] & members == {cycle[(k + 1) % len(cycle)]} for k, c in enumerate(cycle))


def _shortest_cycle(t: BitMatrix, component: frozenset[int]) -> tuple[int, ...]:
    fc = cones(t).fc
    best: tuple[int, ...] | None = None
    for start in sorted(component):
        parent = {start: 0}
        queue = deque([start])
        found = None
        while queue and found is None:
            u = queue.popleft()
            for v in sorted(fc[u] & component):
                if v == start and u != start:
                    found = u
                    break
                if v not in parent:
                    parent[v] = u
                    queue.append(v)
        if found is None:
            continue
        path = [found]
        while path[-1] != start:
            path.append(parent[path[-1]])
        path.reverse()
        k = path.index(min(path))
        cand = tuple(path[k:] + path[:k])
        if best is None or (len(cand), cand) < (len(best), best):
            best = cand
    if best is None:
        raise AssertionError(f"component {sorted(component)} has no cycle")
    return best


def find_ctcs(t: BitMatrix) -> CtcReport:
    """Self-loops from the diagonal and a shortest cycle for each nontrivial SCC.

    Cycles start at their smallest member and follow the edge direction.
    """
    rel = temporal_relation(t)
    cycles = [_shortest_cycle(t, comp) for comp in rel.sccs if len(comp) > 1]
    cycles.sort()
    return CtcReport(
        rel.self_loops,
        tuple(cycles),
        tuple(is_minimal_cycle(t, c) for c in cycles),
    )


def _reencode(word: PauliWord, a: int) -> PauliWord:
    """Same concrete letters after a plane flip at ``a``."""
    bit = 1 << (a - 1)
    return PauliWord(word.n, word.w, word.v ^ bit if word.w & bit else word.v)


def break_self_loop(
    g: GeneratorMatrix, p: ProcessingRelations, i: int
) -> tuple[GeneratorMatrix, ProcessingRelations, int]:
    """Remove the self-loop at ``i`` by flipping its plane.

    The correction operator ``K(i)``, which carries sigma_sphi at ``i``,
    becomes the gauge operator of ``i`` in the flipped plane, and ``i`` joins
    both ``igauge`` and ``ocomp``. Returns the new generators, the re-derived
    relations and the flag row (packed over outcomes, bit ``a-1`` = ``s_a``),
    which is the old adaptation row ``T[i, :]``.

    Raises
    ------
    NoSelfLoop
        ``T[i, i] == 0``.
    BoundaryQubit
        ``i`` is already in ``igauge`` or ``ocomp``.
    """
    if not p.T[i - 1, i - 1]:
        raise NoSelfLoop(f"qubit {i} has no self-loop")
    if i in p.igauge or i in p.ocomp:
        raise BoundaryQubit(f"self-looped qubit {i} lies in igauge or ocomp")
    flag = p.T.rows[i - 1]
    g_new = g.flip_plane(i)
    ig, oc = tuple(sorted(p.igauge + (i,))), tuple(sorted(p.ocomp + (i,)))
    p_new = derive_processing(g_new, ig, oc)

    # Patch the old operators and compare with the re-derivation.
    old = operators_from_relations(p)
    bit = 1 << (i - 1)
    new_gauge = _reencode(old.corrections[i], i)
    corrections = {}
    for a, op in old.corrections.items():
        if a == i:
            continue
        op = _reencode(op, i)
        corrections[a] = multiply(op, new_gauge) if op.w & bit else op
    gauges = {i: new_gauge}
    for j, op in old.gauges.items():
        op = _reencode(op, i)
        gauges[j] = multiply(op, new_gauge) if op.w & bit else op
    predicted = relations_from_operators(NormalForm(g.n, ig, oc, corrections, gauges))
    if predicted != p_new:
        raise AssertionError("patched operators disagree with re-derived relations")
    if p_new.Z.rows[oc.index(i)] != flag:
        raise AssertionError("flag row differs from the output row of the flipped qubit")
    return g_new, p_new, flag


def closure_contained(new: BitMatrix, old: BitMatrix) -> bool:
    """Is every relation ``a < b`` of ``new`` already present in ``old``?"""
    nc, oc = temporal_relation(new).closure, temporal_relation(old).closure
    return all(not (a & ~b) for a, b in zip(nc.rows, oc.rows))


def break_cycle(
    g: GeneratorMatrix, p: ProcessingRelations, cycle: Sequence[int]
) -> tuple[GeneratorMatrix, ProcessingRelations, int]:
    """Remove a minimal cycle ``(c_1, ..., c_l)``.

    ``c_1`` joins ``igauge`` and ``c_l`` joins ``ocomp``; ``K(c_l)`` becomes the
    gauge operator of ``c_1``. The flag row is ``e_l + sum of e_a`` over
    ``a`` in ``bc(c_1) - {c_l}``. The generators are unchanged.

    Raises
    ------
    NotMinimal
        The sequence is not a chordless cycle of ``T``.
    BoundaryOverlap
        The cycle meets ``igauge`` or ``ocomp``.
    """
    cycle = tuple(cycle)
    if len(cycle) < 2 or len(set(cycle)) != len(cycle) or not is_minimal_cycle(p.T, cycle):
        raise NotMinimal(f"{list(cycle)} is not a minimal cycle")
    if set(cycle) & (set(p.igauge) | set(p.ocomp)):
        raise BoundaryOverlap(f"{list(cycle)} meets igauge or ocomp")
    first, last = cycle[0], cycle[-1]
    ig, oc = tuple(sorted(p.igauge + (first,))), tuple(sorted(p.ocomp + (last,)))
    p_new = derive_processing(g, ig, oc)

    old = operators_from_relations(p)
    k_last = old.corrections[last]
    bit = 1 << (first - 1)
    corrections = {
        a: multiply(op, k_last) if op.w & bit else op for a, op in old.corrections.items() if a != last
    }
    gauges = {j: multiply(op, k_last) if op.w & bit else op for j, op in old.gauges.items()}
    gauges[first] = k_last
    predicted = relations_from_operators(NormalForm(g.n, ig, oc, corrections, gauges))
    if predicted != p_new:
        raise AssertionError("patched operators disagree with re-derived relations")

    flag = 1 << (last - 1)
    for a in cones(p.T).bc[first] - {last}:
        flag |= 1 << (a - 1)
    if p_new.Z.rows[oc.index(last)] != flag:
        raise AssertionError("flag row differs from the new output row")
    if not closure_contained(p_new.T, p.T):
        raise AssertionError("cycle removal created a new closed time-like curve")
    return g, p_new, flag


@dataclass(frozen=True)
class RemovalStep:
    kind: str  # "self-loop" or "cycle"
    qubits: tuple[int, ...]
    flag_qubit: int
    flag_row: int


@dataclass(frozen=True)
class RemovalTrace:
    """Steps of a full CTC removal.

    ``flags`` lists the ``ocomp`` qubits whose output bits are flags; the
    value of each is read from row ``final.ocomp.index(q)`` of ``final.Z``.
    """

    steps: tuple[RemovalStep, ...]
    final: ProcessingRelations
    generators: GeneratorMatrix
    flags: tuple[int, ...] = field(default=())

    def flag_rows(self) -> list[int]:
        """Output-bit indices (rows of ``final.Z``) that are flags."""
        return [self.final.ocomp.index(q) for q in self.flags]


def remove_all(g: GeneratorMatrix, p: ProcessingRelations) -> RemovalTrace:
    """Remove CTCs until the temporal relation is a strict partial order.

    Self-loops go first, smallest qubit first; then the cycle whose smallest
    member is least.
    """
    steps = []
    while True:
        report = find_ctcs(p.T)
        if report.self_loops:
            i = report.self_loops[0]
            g, p, flag = break_self_loop(g, p, i)
            steps.append(RemovalStep("self-loop", (i,), i, flag))
        elif report.cycles:
            cycle = report.cycles[0]
            g, p, flag = break_cycle(g, p, cycle)
            steps.append(RemovalStep("cycle", cycle, cycle[-1], flag))
        else:
            break
    if not temporal_relation(p.T).is_strict_partial_order:
        raise AssertionError("CTC removal left a non-partial order")
    return RemovalTrace(tuple(steps), p, g, tuple(s.flag_qubit for s in steps))
