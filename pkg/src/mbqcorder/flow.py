"""Classical processing relations, cones and temporal relations.

The processing relations of a measurement pattern are

    q = T s + H g      (measurement-basis choice)
    o = Z s + R g      (classical output)

with ``s`` the outcomes, ``g`` the gauge bits and ``o`` the output. For an
extremal pair ``(igauge, ocomp)`` they are read off a normal form of the
generator matrix whose rows are the correction operators ``K(a)``,
``a`` not in ``ocomp``, and the gauge operators ``Kbar(i)``, ``i`` in
``igauge``.

Storage conventions (0-based inside the matrices, 1-based labels outside):

* ``T`` is ``n x n``; ``T[b, a] == 1`` iff the outcome at ``a`` feeds the
  basis at ``b``.
* ``H`` is ``n x |igauge|``; column ``j`` belongs to ``igauge[j]``.
* ``Z`` is ``|ocomp| x n``; row ``r`` belongs to ``ocomp[r]``.
* ``R`` is ``|ocomp| x |igauge|``.
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from mbqcorder import gf2
from mbqcorder.exceptions import (
    GaugeableOutsideInput,
    Infeasible,
    InvalidGaugeSet,
    InvalidOutputSet,
    NonExtremalPair,
    NoValidSplit,
    NotCommutingReconstruction,
    NotOptimalOutput,
    RankMismatch,
    Singular,
)
from mbqcorder.gf2 import BitMatrix
from mbqcorder.stabilizer import GeneratorMatrix, PauliWord, Plane, check_valid


def _labels(qubits: Iterable[int], n: int) -> tuple[int, ...]:
    out = tuple(sorted(set(qubits)))
    for a in out:
        if not 1 <= a <= n:
            raise ValueError(f"qubit {a} outside 1..{n}")
    return out


def _complement(qubits: Sequence[int], n: int) -> tuple[int, ...]:
    s = set(qubits)
    return tuple(a for a in range(1, n + 1) if a not in s)


def _mask(qubits: Iterable[int]) -> int:
    m = 0
    for a in qubits:
        m |= 1 << (a - 1)
    return m


def _bit(x: int, a: int) -> int:
    return (x >> (a - 1)) & 1


@dataclass(frozen=True)
class ProcessingRelations:
    """Full-shape processing matrices together with the boundary sets."""

    T: BitMatrix
    H: BitMatrix
    Z: BitMatrix
    R: BitMatrix
    igauge: tuple[int, ...]
    ocomp: tuple[int, ...]

    def __post_init__(self) -> None:
        n, m, k = self.T.nrows, len(self.ocomp), len(self.igauge)
        if self.T.shape != (n, n):
            raise ValueError(f"T must be square, got {self.T.shape}")
        if self.H.shape != (n, k):
            raise ValueError(f"H must be {n}x{k}, got {self.H.shape}")
        if self.Z.shape != (m, n):
            raise ValueError(f"Z must be {m}x{n}, got {self.Z.shape}")
        if self.R.shape != (m, k):
            raise ValueError(f"R must be {m}x{k}, got {self.R.shape}")

    @property
    def n(self) -> int:
        return self.T.nrows

    @property
    def igauge_c(self) -> tuple[int, ...]:
        return _complement(self.igauge, self.n)

    @property
    def ocomp_c(self) -> tuple[int, ...]:
        return _complement(self.ocomp, self.n)

    # Compact blocks of the normal form.

    @property
    def T_block(self) -> BitMatrix:  # noqa: N802
        return self.T.submatrix([b - 1 for b in self.igauge_c], [a - 1 for a in self.ocomp_c])

    @property
    def H_block(self) -> BitMatrix:  # noqa: N802
        return self.H.submatrix([b - 1 for b in self.igauge_c])

    @property
    def Z_block(self) -> BitMatrix:  # noqa: N802
        return self.Z.submatrix(None, [a - 1 for a in self.ocomp_c])

    @property
    def R_block(self) -> BitMatrix:  # noqa: N802
        return self.R

    def q(self, s: int, g: int) -> int:
        """Basis choices (packed) for packed outcomes ``s`` and gauge ``g``."""
        return self.T.apply(s) ^ self.H.apply(g)

    def output(self, s: int, g: int) -> int:
        return self.Z.apply(s) ^ self.R.apply(g)

    def is_normal(self) -> bool:
        """Zero blocks of T and identity blocks of H and Z are in place."""
        oc_mask = _mask(self.ocomp)
        if any(self.T.rows[i - 1] for i in self.igauge):
            return False
        if any(r & oc_mask for r in self.T.rows):
            return False
        if self.H.submatrix([i - 1 for i in self.igauge]) != BitMatrix.identity(len(self.igauge)):
            return False
        if self.Z.submatrix(None, [o - 1 for o in self.ocomp]) != BitMatrix.identity(len(self.ocomp)):
            return False
        return True

    def replace(self, **changes: object) -> ProcessingRelations:
        fields = {"T": self.T, "H": self.H, "Z": self.Z, "R": self.R, "igauge": self.igauge, "ocomp": self.ocomp}
        fields.update(changes)
        return ProcessingRelations(**fields)  # type: ignore[arg-type]


@dataclass(frozen=True)
class NormalForm:
    """Correction and gauge operators of an extremal pair."""

    n: int
    igauge: tuple[int, ...]
    ocomp: tuple[int, ...]
    corrections: dict[int, PauliWord]
    gauges: dict[int, PauliWord]

    def generator_matrix(self, planes: Sequence[Plane] | None = None) -> GeneratorMatrix:
        ops = [self.corrections[a] for a in sorted(self.corrections)]
        ops += [self.gauges[i] for i in sorted(self.gauges)]
        return GeneratorMatrix(
            BitMatrix.from_ints([p.w for p in ops], self.n),
            BitMatrix.from_ints([p.v for p in ops], self.n),
            tuple(planes) if planes else (),
        )


def normal_form(g: GeneratorMatrix, igauge: Iterable[int], ocomp: Iterable[int]) -> NormalForm:
    """Change the generator basis so that it exposes K(a) and Kbar(i).

    The pivot columns are ``Phi`` on ``igauge`` and ``S`` on the complement of
    ``ocomp``; they must form a basis of the column matroid of ``(Phi|S)``.
    """
    n = g.n
    ig, oc = _labels(igauge, n), _labels(ocomp, n)
    oc_c = _complement(oc, n)
    _check_pair_sizes(ig, oc)
    stacked = g.stacked
    if gf2.rank(g.phi.submatrix(None, [i - 1 for i in ig])) < len(ig):
        raise InvalidGaugeSet(f"sigma_phi columns on igauge={list(ig)} are dependent")
    cols = [i - 1 for i in ig] + [n + a - 1 for a in oc_c]
    if len(cols) != n:
        raise InvalidOutputSet(f"ocomp={list(oc)} leaves uncorrectable outcomes")
    try:
        binv = gf2.invert(stacked.submatrix(None, cols))
    except Singular as exc:
        raise InvalidOutputSet(f"outcomes outside ocomp={list(oc)} are not all correctable") from exc
    nf = binv @ stacked
    full = (1 << n) - 1
    ops = [PauliWord(n, r & full, r >> n) for r in nf.rows]
    k = len(ig)
    return NormalForm(
        n,
        ig,
        oc,
        corrections={a: ops[k + t] for t, a in enumerate(oc_c)},
        gauges={i: ops[j] for j, i in enumerate(ig)},
    )


def _check_pair_sizes(ig: Sequence[int], oc: Sequence[int]) -> None:
    if len(ig) < len(oc):
        raise NonExtremalPair(f"|igauge|={len(ig)} < |ocomp|={len(oc)}")


def relations_from_operators(nf: NormalForm) -> ProcessingRelations:
    """Read T, H, Z, R off correction and gauge operators.

    Raises ValueError when an operator violates its template.
    """
    n, ig, oc = nf.n, nf.igauge, nf.ocomp
    oc_c = _complement(oc, n)
    ig_mask, occ_mask = _mask(ig), _mask(oc_c)
    t_cols = [0] * n
    z_rows = [1 << (o - 1) for o in oc]
    for a, op in nf.corrections.items():
        if op.w & ig_mask or (op.v & occ_mask) != 1 << (a - 1):
            raise ValueError(f"K({a}) = {op} violates the correction template")
        t_cols[a - 1] = op.w
        for r, o in enumerate(oc):
            if _bit(op.v, o):
                z_rows[r] |= 1 << (a - 1)
    h_cols, r_cols = [], []
    for i in ig:
        op = nf.gauges[i]
        if (op.w & ig_mask) != 1 << (i - 1) or op.v & occ_mask:
            raise ValueError(f"Kbar({i}) = {op} violates the gauge template")
        h_cols.append(op.w)
        r_cols.append(gf2.bits_to_int(_bit(op.v, o) for o in oc))
    T = BitMatrix.from_ints(t_cols, n).T
    H = BitMatrix.from_ints(h_cols, n).T if ig else BitMatrix.zeros(n, 0)
    R = BitMatrix.from_ints(r_cols, len(oc)).T if ig else BitMatrix.zeros(len(oc), 0)
    return ProcessingRelations(T, H, BitMatrix.from_ints(z_rows, n), R, ig, oc)


def operators_from_relations(p: ProcessingRelations) -> NormalForm:
    """Assemble the normal-form operators from relations in normal form."""
    n = p.n
    corrections = {}
    for a in p.ocomp_c:
        v = 1 << (a - 1)
        for r, o in enumerate(p.ocomp):
            if p.Z[r, a - 1]:
                v |= 1 << (o - 1)
        corrections[a] = PauliWord(n, p.T.col_int(a - 1), v)
    gauges = {}
    for j, i in enumerate(p.igauge):
        v = 0
        for r, o in enumerate(p.ocomp):
            if p.R[r, j]:
                v |= 1 << (o - 1)
        gauges[i] = PauliWord(n, p.H.col_int(j), v)
    return NormalForm(n, p.igauge, p.ocomp, corrections, gauges)


def _influence_by_inversion(g: GeneratorMatrix, ig: Sequence[int], oc: Sequence[int]) -> tuple[BitMatrix, BitMatrix]:
    """Solve the gauge-invariance condition for T and H directly.

    Transform ``Phi^T`` on the ``igauge`` rows into ``(I | 0)`` by a change of
    generator basis, split into ``Phi_1, Phi_2`` and ``S_1, S_2``, and set
    ``Tb = Phi_2 S_2^-1`` and ``Hb = Phi_1 + Tb S_1``.
    """
    n, k = g.n, len(ig)
    ig_c, oc_c = _complement(ig, n), _complement(oc, n)
    phi_t = g.phi.T
    a = phi_t.submatrix([i - 1 for i in ig])
    _, lops, piv = gf2.rref(a.T)
    if len(piv) < k:
        raise InvalidGaugeSet(f"sigma_phi columns on igauge={list(ig)} are dependent")
    basis_change = lops.T
    phi_m = phi_t @ basis_change
    s_m = g.s.T.submatrix([b - 1 for b in oc_c]) @ basis_change
    left, right = list(range(k)), list(range(k, n))
    rows = [b - 1 for b in ig_c]
    phi1, phi2 = phi_m.submatrix(rows, left), phi_m.submatrix(rows, right)
    s1, s2 = s_m.submatrix(None, left), s_m.submatrix(None, right)
    if s2.nrows != s2.ncols:
        raise InvalidOutputSet(f"|igauge|={k} exceeds |ocomp|={len(oc)}")
    try:
        s2_inv = gf2.invert(s2)
    except Singular as exc:
        raise InvalidOutputSet(f"outcomes outside ocomp={list(oc)} are not all correctable") from exc
    t_block = phi2 @ s2_inv
    h_block = phi1 + t_block @ s1

    t_full = [0] * n
    for r, b in enumerate(ig_c):
        for c, a_ in enumerate(oc_c):
            if t_block[r, c]:
                t_full[b - 1] |= 1 << (a_ - 1)
    h_full = [0] * n
    for j, i in enumerate(ig):
        h_full[i - 1] |= 1 << j
    for r, b in enumerate(ig_c):
        h_full[b - 1] = h_block.rows[r]
    return BitMatrix.from_ints(t_full, n), BitMatrix.from_ints(h_full, k)


def derive_processing(g: GeneratorMatrix, igauge: Iterable[int], ocomp: Iterable[int]) -> ProcessingRelations:
    """Unique processing relations of an extremal pair.

    ``T`` and ``H`` are obtained by solving the gauge-invariance condition
    and cross-checked against the normal form, from which ``Z`` and ``R`` are
    read.

    Raises
    ------
    InvalidGaugeSet
        ``Phi`` restricted to the ``igauge`` columns is rank deficient.
    InvalidOutputSet
        Some outcome outside ``ocomp`` cannot be corrected.
    NonExtremalPair
        ``|igauge| < |ocomp|``.
    """
    n = g.n
    ig, oc = _labels(igauge, n), _labels(ocomp, n)
    _check_pair_sizes(ig, oc)
    t_mat, h_mat = _influence_by_inversion(g, ig, oc)
    rel = relations_from_operators(normal_form(g, ig, oc))
    if rel.T != t_mat or rel.H != h_mat:
        raise AssertionError("normal form and gauge-invariance solution disagree")
    return rel


# -- cones and temporal relations ------------------------------------------


@dataclass(frozen=True)
class Cones:
    fc: dict[int, frozenset[int]]
    bc: dict[int, frozenset[int]]
    inputs: frozenset[int]
    outputs: frozenset[int]


def cones(t: BitMatrix) -> Cones:
    """Forward/backward cones and the input/output sets of ``t``."""
    n = t.nrows
    if t.ncols != n:
        raise ValueError("influence matrix must be square")
    fc = {a: frozenset(b + 1 for b in range(n) if t[b, a - 1]) for a in range(1, n + 1)}
    bc = {b: frozenset(a + 1 for a in range(n) if t[b - 1, a]) for b in range(1, n + 1)}
    return Cones(
        fc,
        bc,
        frozenset(a for a in bc if not bc[a]),
        frozenset(b for b in fc if not fc[b]),
    )


@dataclass(frozen=True)
class TemporalRelation:
    """Transitive closure of an influence matrix.

    ``closure[a-1, b-1] == 1`` iff ``a`` precedes ``b``.
    """

    closure: BitMatrix
    is_strict_partial_order: bool
    self_loops: tuple[int, ...]
    sccs: tuple[frozenset[int], ...]

    def precedes(self, a: int, b: int) -> bool:
        return bool(self.closure[a - 1, b - 1])

    def pairs(self) -> list[tuple[int, int]]:
        n = self.closure.nrows
        return [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if self.closure[a - 1, b - 1]]


def transitive_closure(t: BitMatrix) -> BitMatrix:
    """Warshall closure of the edge set ``a -> b`` for ``t[b, a] == 1``."""
    n = t.nrows
    reach = [t.col_int(a) for a in range(n)]
    for k in range(n):
        kb = 1 << k
        rk = reach[k]
        for a in range(n):
            if reach[a] & kb:
                reach[a] |= rk
    return BitMatrix.from_ints(reach, n)


def temporal_relation(t: BitMatrix) -> TemporalRelation:
    n = t.nrows
    if t.ncols != n:
        raise ValueError("influence matrix must be square")
    closure = transitive_closure(t)
    rows = closure.rows
    diag = [a for a in range(n) if (rows[a] >> a) & 1]
    seen: set[int] = set()
    sccs = []
    for a in range(n):
        if a in seen:
            continue
        comp = {b for b in range(n) if (rows[a] >> b) & 1 and (rows[b] >> a) & 1} | {a}
        seen |= comp
        if len(comp) > 1 or (rows[a] >> a) & 1:
            sccs.append(frozenset(b + 1 for b in comp))
    return TemporalRelation(
        closure,
        not diag,
        tuple(a + 1 for a in range(n) if t[a, a]),
        tuple(sccs),
    )


# -- gaugeability and extremal pairs --------------------------------------


def can_gauge_individually(
    g: GeneratorMatrix, a: int, igauge_context: Iterable[int], ocomp_context: Iterable[int]
) -> bool:
    """Is there a stabilizer element fitting the gauge-operator template at ``a``?

    Template relative to the context sets ``Ig``, ``Oc``: sigma_phi at ``a``;
    identity on ``(Ig & ~Oc) - a``; no sigma_s component on ``(~Ig & ~Oc) - a``;
    no sigma_phi component on ``(Ig & Oc) - a``; anything elsewhere.
    """
    n = g.n
    ig, oc = set(igauge_context), set(ocomp_context)
    constraints: list[tuple[int, int]] = [(a - 1, 1), (n + a - 1, 0)]
    for b in range(1, n + 1):
        if b == a:
            continue
        in_ig, in_oc = b in ig, b in oc
        if in_ig and not in_oc:
            constraints += [(b - 1, 0), (n + b - 1, 0)]
        elif not in_ig and not in_oc:
            constraints.append((n + b - 1, 0))
        elif in_ig and in_oc:
            constraints.append((b - 1, 0))
    cols = [c for c, _ in constraints]
    lhs = g.stacked.submatrix(None, cols).T
    rhs = BitMatrix.column([v for _, v in constraints])
    try:
        gf2.solve(lhs, rhs)
    except Infeasible:
        return False
    return True


def extremalize(
    g: GeneratorMatrix, inputs: Iterable[int], outputs: Iterable[int]
) -> tuple[tuple[int, ...], tuple[int, ...], ProcessingRelations]:
    """Find an extremal pair inside given input and output sets.

    Brings the generators into the block form with correction operators for
    every qubit outside ``outputs`` (no sigma_phi on ``inputs``), then picks
    ``ocomp = outputs - dO`` and ``igauge`` from maximal independent column
    sets, leftmost first. The returned relations reproduce the influence
    matrix of the block form.

    Raises
    ------
    GaugeableOutsideInput
        Some qubit outside ``inputs`` can be individually gauged.
    NoValidSplit
        No such block form exists.
    """
    n = g.n
    inp, out = _labels(inputs, n), _labels(outputs, n)
    inp_c, out_c = _complement(inp, n), _complement(out, n)
    for a in inp_c:
        if can_gauge_individually(g, a, inp, out):
            raise GaugeableOutsideInput(a)

    order = [i - 1 for i in inp] + [n + a - 1 for a in out_c] + [i - 1 for i in inp_c] + [n + a - 1 for a in out]
    b1 = len(inp)
    b2 = b1 + len(out_c)
    b3 = b2 + len(inp_c)
    reduced, _, pivots = gf2.rref(g.stacked.submatrix(None, order))

    gauge_rows = [r for r, p in enumerate(pivots) if p < b1]
    corr_rows = [r for r, p in enumerate(pivots) if b1 <= p < b2]
    loose_rows = [r for r, p in enumerate(pivots) if b2 <= p < b3]
    dout_rows = [r for r, p in enumerate(pivots) if p >= b3]
    if len(corr_rows) != len(out_c):
        raise NoValidSplit(f"I={list(inp)}, O={list(out)}: not every outcome outside O is correctable")
    if loose_rows:
        raise NoValidSplit(
            f"I={list(inp)}, O={list(out)}: stabilizer has elements acting as sigma_phi outside I "
            "that are neither correction nor gauge operators"
        )

    t_cols = [0] * n
    for r in corr_rows:
        a = out_c[pivots[r] - b1]
        for c, b in enumerate(inp_c):
            if reduced[r, b2 + c]:
                t_cols[a - 1] |= 1 << (b - 1)
    t_expected = BitMatrix.from_ints(t_cols, n).T

    delta_out = {out[pivots[r] - b3] for r in dout_rows}
    ocomp = tuple(a for a in out if a not in delta_out)
    igauge = tuple(inp[pivots[r]] for r in gauge_rows)
    rel = derive_processing(g, igauge, ocomp)
    if rel.T != t_expected:
        raise AssertionError("extremal pair does not reproduce the block-form influence matrix")
    return igauge, ocomp, rel


def default_pair(g: GeneratorMatrix) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Extremal pair of the leftmost basis of ``(Phi | S)``."""
    basis = gf2.rref(g.stacked)[2]
    return _pair_of_basis(basis, g.n)


# -- matroid bases -----------------------------------------------------------


def _pair_of_basis(basis: Iterable[int], n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    cols = set(basis)
    igauge = tuple(c + 1 for c in sorted(cols) if c < n)
    ocomp = tuple(a for a in range(1, n + 1) if n + a - 1 not in cols)
    return igauge, ocomp


def bases_by_combinations(m: BitMatrix) -> list[tuple[int, ...]]:
    """All column bases of a full-row-rank matrix by exhaustive testing."""
    r = m.nrows
    return [c for c in itertools.combinations(range(m.ncols), r) if gf2.rank(m.submatrix(None, c)) == r]


def bases_by_exchange(m: BitMatrix) -> list[tuple[int, ...]]:
    """All column bases by traversing the basis-exchange graph.

    From each basis ``B`` the tableau ``B^-1 m`` lists every legal single
    exchange: column ``f`` may replace the basis column pivoting row ``r``
    exactly when the tableau entry ``(r, f)`` is 1.
    """
    r = m.nrows
    start = tuple(gf2.rref(m)[2])
    if len(start) != r:
        raise ValueError("matrix must have full row rank")
    seen = {start}
    queue = deque([start])
    while queue:
        basis = queue.popleft()
        tab = gf2.invert(m.submatrix(None, basis)) @ m
        in_basis = set(basis)
        for row, e in enumerate(basis):
            rbits = tab.rows[row]
            for f in range(m.ncols):
                if f in in_basis or not (rbits >> f) & 1:
                    continue
                nb = tuple(sorted((in_basis - {e}) | {f}))
                if nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
    return sorted(seen)


EXHAUSTIVE_LIMIT = 8


def matroid_bases(g: GeneratorMatrix, method: str = "auto") -> list[tuple[int, ...]]:
    """Bases of the column matroid of ``(Phi | S)``.

    ``method`` is ``"combinations"``, ``"exchange"`` or ``"auto"`` (exhaustive
    up to ``EXHAUSTIVE_LIMIT`` qubits).
    """
    if method == "auto":
        method = "combinations" if g.n <= EXHAUSTIVE_LIMIT else "exchange"
    if method == "combinations":
        return bases_by_combinations(g.stacked)
    if method == "exchange":
        return bases_by_exchange(g.stacked)
    raise ValueError(f"unknown method {method!r}")


def enumerate_relations(g: GeneratorMatrix, method: str = "auto") -> list[ProcessingRelations]:
    """Processing relations of every extremal pair, one per matroid basis.

    Sorted by ``(igauge, ocomp)``.
    """
    pairs = sorted(_pair_of_basis(b, g.n) for b in matroid_bases(g, method))
    return [derive_processing(g, ig, oc) for ig, oc in pairs]


# -- reconstruction --------------------------------------------------------


def normalize_relations(
    t: BitMatrix, h: BitMatrix, z: BitMatrix, r: BitMatrix
) -> ProcessingRelations:
    """Bring arbitrary-basis relations into normal form.

    ``igauge`` and ``ocomp`` are chosen inside the zero rows / zero columns of
    ``t`` by the leftmost-pivot rule; ``H, R -> H L, R L`` fixes the gauge
    basis, and ``Z, R -> M Z, M R`` fixes the output basis.
    """
    n = t.nrows
    k, m = h.ncols, z.nrows
    if h.nrows != n or z.ncols != n or r.shape != (m, k):
        raise ValueError("inconsistent shapes")
    rk_h, rk_z = gf2.rank(h), gf2.rank(z)
    if rk_h != rk_z:
        raise RankMismatch(f"rank H = {rk_h} but rank Z = {rk_z}")
    if rk_h != k:
        raise RankMismatch(f"H has {k} columns but rank {rk_h}")
    if rk_z != m:
        raise NotOptimalOutput(f"Z has {m} rows but rank {rk_z}")
    cn = cones(t)
    ig_idx = gf2.independent_rows(h, sorted(a - 1 for a in cn.inputs))
    if len(ig_idx) != k:
        raise InvalidGaugeSet("H cannot be normalized on rows inside the input set")
    oc_idx = gf2.independent_columns(z, sorted(a - 1 for a in cn.outputs))
    if len(oc_idx) != m:
        raise NotOptimalOutput("Z cannot be brought to (Z | I) on columns inside the output set")
    lam = gf2.invert(h.submatrix(ig_idx))
    lz = gf2.invert(z.submatrix(None, oc_idx))
    ig = tuple(i + 1 for i in ig_idx)
    oc = tuple(o + 1 for o in oc_idx)
    # igauge/ocomp labels must be sorted; independent_* returns ascending indices.
    return ProcessingRelations(t, h @ lam, lz @ z, lz @ r @ lam, ig, oc)


def reconstruct(
    t: BitMatrix, h: BitMatrix, z: BitMatrix, r: BitMatrix, planes: Sequence[Plane] | None = None
) -> GeneratorMatrix:
    """Generator matrix determined by the processing relations.

    Raises
    ------
    RankMismatch
        ``rank H != rank Z``.
    NotOptimalOutput
        ``Z`` has no ``(Z | I)`` normal form on a subset of the outputs.
    NotCommutingReconstruction
        The assembled operators do not commute.
    """
    rel = normalize_relations(t, h, z, r)
    gm = operators_from_relations(rel).generator_matrix(planes)
    try:
        check_valid(gm)
    except Exception as exc:  # NotCommuting / NotFullRank
        raise NotCommutingReconstruction(str(exc)) from exc
    return gm


# -- extended influence matrix ----------------------------------------------


def extended_influence(p: ProcessingRelations) -> BitMatrix:
    """Influence matrix on ``I' + Omega + O'`` built from T, H, Z, R.

    Index order: the ``|igauge|`` virtual inputs ``I'``, then qubits 1..n,
    then the ``|ocomp|`` virtual outputs ``O'``.
    """
    n, k, m = p.n, len(p.igauge), len(p.ocomp)
    size = k + n + m
    rows = [0] * size
    for b in range(n):
        rows[k + b] = p.H.rows[b] | (p.T.rows[b] << k)
    for o in range(m):
        rows[k + n + o] = p.R.rows[o] | (p.Z.rows[o] << k)
    return BitMatrix.from_ints(rows, size)


def extended_labels(p: ProcessingRelations) -> list[str]:
    return [f"I'{i}" for i in p.igauge] + [str(a) for a in range(1, p.n + 1)] + [f"O'{o}" for o in p.ocomp]


def extended_influence_blocks(p: ProcessingRelations) -> tuple[BitMatrix, list[str], list[str]]:
    """The same matrix with rows ``I'|igauge|igauge^c|O'`` and columns ``I'|ocomp^c|ocomp|O'``."""
    k, n = len(p.igauge), p.n
    labels = extended_labels(p)
    row_order = list(range(k)) + [k + i - 1 for i in p.igauge] + [k + b - 1 for b in p.igauge_c]
    row_order += list(range(k + n, k + n + len(p.ocomp)))
    col_order = list(range(k)) + [k + a - 1 for a in p.ocomp_c] + [k + o - 1 for o in p.ocomp]
    col_order += list(range(k + n, k + n + len(p.ocomp)))
    ext = extended_influence(p)
    return (
        ext.submatrix(row_order, col_order),
        [labels[i] for i in row_order],
        [labels[j] for j in col_order],
    )


def check_optimal_output(z: BitMatrix, r: BitMatrix, p: ProcessingRelations, g: GeneratorMatrix) -> bool:
    """Is ``o = Z s + R g`` an optimal output for the pair of ``p``?

    ``Z`` must reduce to ``(Zb | I)`` on the ``ocomp`` columns and column ``a``
    of ``Zb`` must be the sigma_s support of ``K(a)`` inside ``ocomp``.
    ``r`` is accepted for signature symmetry and only shape-checked.
    """
    m = len(p.ocomp)
    if z.shape != (m, p.n) or r.nrows != m:
        return False
    try:
        lz = gf2.invert(z.submatrix(None, [o - 1 for o in p.ocomp]))
    except Singular:
        return False
    zn = lz @ z
    nf = normal_form(g, p.igauge, p.ocomp)
    for a, op in nf.corrections.items():
        for row, o in enumerate(p.ocomp):
            if zn[row, a - 1] != _bit(op.v, o):
                return False
    return True
