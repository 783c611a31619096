"""Gauge transformations, plane flips and modified local complementation.

Two groups act on a pattern. Stabilizer elements ``K`` act on the classical
data as ``s -> s + v(K)``, ``q -> q + w(K)``, ``g -> g + w(K)|igauge``; valid
processing relations are invariant under this action. Plane flips and the
modified local complementation act on the relations themselves and keep the
temporal order fixed.
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from mbqcorder import gf2
from mbqcorder.exceptions import NotInStabilizer, SelfLoopAtQubit
from mbqcorder.flow import ProcessingRelations, transitive_closure
from mbqcorder.gf2 import BitMatrix
from mbqcorder.stabilizer import GeneratorMatrix, PauliWord

DETERMINISTIC = "deterministic-capable"
RANDOM = "guaranteed-random"


def _restrict(x: int, qubits: Sequence[int]) -> int:
    """Pack bits of ``x`` at the given 1-based qubits into positions 0, 1, ..."""
    out = 0
    for j, a in enumerate(qubits):
        if (x >> (a - 1)) & 1:
            out |= 1 << j
    return out


# -- gauge transformations ---------------------------------------------------


@dataclass(frozen=True)
class GaugeAction:
    """Shifts induced by a stabilizer element, packed with bit ``a-1`` = qubit ``a``.

    ``delta_g`` is packed over ``igauge`` positions (bit ``j`` = ``igauge[j]``).
    """

    delta_s: int
    delta_q: int
    delta_g: int

    def apply(self, s: int, q: int, g: int) -> tuple[int, int, int]:
        return s ^ self.delta_s, q ^ self.delta_q, g ^ self.delta_g


def gauge_action(k: PauliWord, igauge: Iterable[int], g: GeneratorMatrix | None = None) -> GaugeAction:
    """Action of the stabilizer element ``k``.

    Membership in the stabilizer of ``g`` is checked when ``g`` is given.
    """
    if g is not None and not g.contains(k):
        raise NotInStabilizer(f"{k.letters(g.planes)} is not in the stabilizer")
    return GaugeAction(k.v, k.w, _restrict(k.w, sorted(igauge)))


@dataclass(frozen=True)
class InvarianceReport:
    """Outcome of checking relations against generators.

    ``basis_ok[a]`` and ``output_ok[a][r]`` refer to generator row ``a`` and
    output bit ``r``.
    """

    basis_ok: tuple[bool, ...]
    output_ok: tuple[tuple[bool, ...], ...]

    @property
    def passed(self) -> bool:
        return all(self.basis_ok) and all(all(row) for row in self.output_ok)

    def failing_generators(self) -> list[int]:
        """0-based generator rows that violate either condition."""
        return [a for a, (b, o) in enumerate(zip(self.basis_ok, self.output_ok)) if not (b and all(o))]


def _element_checks(p: ProcessingRelations, word: PauliWord) -> tuple[bool, tuple[bool, ...]]:
    w_ig = _restrict(word.w, p.igauge)
    basis = word.w == p.T.apply(word.v) ^ p.H.apply(w_ig)
    out = p.Z.apply(word.v) ^ p.R.apply(w_ig)
    return basis, tuple(not (out >> r) & 1 for r in range(p.Z.nrows))


def check_invariance(p: ProcessingRelations, g: GeneratorMatrix) -> InvarianceReport:
    """Check ``w == T v + H w|igauge`` and ``Z v + R w|igauge == 0`` per generator."""
    basis, outs = zip(*(_element_checks(p, k) for k in g.generators())) if g.n else ((), ())
    return InvarianceReport(tuple(basis), tuple(outs))


def invariance_failures(p: ProcessingRelations, g: GeneratorMatrix) -> list[int]:
    """Generator masks of all group elements whose action breaks the relations."""
    bad = []
    for mask, word in g.elements():
        basis, outs = _element_checks(p, word)
        if not (basis and all(outs)):
            bad.append(mask)
    return bad


def classify_output_bit(z: int, r: int, p: ProcessingRelations, g: GeneratorMatrix) -> str:
    """Classify ``o = z.s + r.g`` (``z`` over qubits, ``r`` over igauge positions).

    An output that some gauge transformation flips is uniformly random.
    """
    for k in g.generators():
        if (gf2.popcount(z & k.v) + gf2.popcount(r & _restrict(k.w, p.igauge))) & 1:
            return RANDOM
    return DETERMINISTIC


# -- plane flips --------------------------------------------------------------


def _outer_update(target: BitMatrix, sel: BitMatrix, col: int, src_row: int) -> BitMatrix:
    """``target + sel e_col e_col^T src`` where ``src_row`` is the packed row added."""
    return BitMatrix.from_ints(
        (t ^ src_row if (s >> col) & 1 else t for t, s in zip(target.rows, sel.rows)),
        target.ncols,
    )


def flip_plane(p: ProcessingRelations, a: int) -> ProcessingRelations:
    """Relations after exchanging sigma_phi and sigma_sphi at qubit ``a``.

    ``T -> T + T e_a e_a^T T``, ``H -> H + T e_a e_a^T H``,
    ``Z -> Z + Z e_a e_a^T T``, ``R -> R + Z e_a e_a^T H``.
    """
    c = a - 1
    if p.T[c, c]:
        raise SelfLoopAtQubit(a)
    t_row, h_row = p.T.rows[c], p.H.rows[c]
    return p.replace(
        T=_outer_update(p.T, p.T, c, t_row),
        H=_outer_update(p.H, p.T, c, h_row),
        Z=_outer_update(p.Z, p.Z, c, t_row),
        R=_outer_update(p.R, p.Z, c, h_row),
    )


def flip_ext(t_ext: BitMatrix, index: int) -> BitMatrix:
    """Flip on an extended influence matrix at 0-based ``index``."""
    if t_ext[index, index]:
        raise SelfLoopAtQubit(index + 1)
    return _outer_update(t_ext, t_ext, index, t_ext.rows[index])


@dataclass(frozen=True)
class AngleMap:
    """Static angle update ``phi -> offset + sign * phi``.

    For a plane flip the map is ``phi -> pi/2 - phi``. The new observable is
    then ``(-1)**q`` times the old one, so the run-time sign is carried by
    the outcome relabelling ``s -> s + q`` that the matrix update encodes.
    """

    offset: float = math.pi / 2
    sign: int = -1

    def __call__(self, phi: float) -> float:
        return self.offset + self.sign * phi


FLIP_ANGLE = AngleMap()


# -- modified local complementation --------------------------------------------


def local_comp(t: BitMatrix, i: int) -> tuple[BitMatrix, frozenset[int]]:
    """Modified local complementation at qubit ``i``.

    Returns ``T + U + diag(U)`` with ``U = T e_i e_i^T T`` and the qubits
    ``fc(i) & bc(i)`` whose diagonal entry was cancelled.
    """
    c = i - 1
    diag = [b for b in range(t.nrows) if t[b, b]]
    if diag:
        raise SelfLoopAtQubit(i if c in diag else diag[0] + 1)
    row_i = t.rows[c]
    rows = list(t.rows)
    replanted = []
    for b in range(t.nrows):
        if (rows[b] >> c) & 1:
            rows[b] ^= row_i
            if (row_i >> b) & 1:
                rows[b] ^= 1 << b
                replanted.append(b + 1)
    return BitMatrix.from_ints(rows, t.ncols), frozenset(replanted)


def canonical_key(t: BitMatrix) -> str:
    """Row-major bit string used to order orbit elements."""
    return "".join(t.row_strings())


@dataclass(frozen=True)
class Orbit:
    """Orbit of an influence matrix under local complementation.

    ``generators[i][j]`` is the index of ``local_comp(elements[j], i)``.
    """

    elements: tuple[BitMatrix, ...]
    generators: dict[int, tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, t: BitMatrix) -> int:
        return self.elements.index(t)


def orbit(t: BitMatrix) -> Orbit:
    """Breadth-first closure of ``{t}`` under ``local_comp`` at every qubit."""
    n = t.nrows
    seen = {t}
    queue = deque([t])
    while queue:
        cur = queue.popleft()
        for i in range(1, n + 1):
            nxt, _ = local_comp(cur, i)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    elements = tuple(sorted(seen, key=canonical_key))
    pos = {e: k for k, e in enumerate(elements)}
    generators = {i: tuple(pos[local_comp(e, i)[0]] for e in elements) for i in range(1, n + 1)}
    closure = transitive_closure(t)
    if any(transitive_closure(e) != closure for e in elements):
        raise AssertionError("local complementation changed the temporal relation")
    return Orbit(elements, generators)
