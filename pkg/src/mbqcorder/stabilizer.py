"""Binary symplectic model of Pauli words, measurement planes and stabilizers.

A generator matrix stores each stabilizer generator as a pair of bit rows
``(w, v)`` in the basis of the local measurement plane: ``w`` counts the
sigma_phi factors and ``v`` the sigma_s factors. Site letters decode as

    (0, 0) -> I,  (1, 0) -> sigma_phi,  (0, 1) -> sigma_s,  (1, 1) -> sigma_sphi

where sigma_sphi is taken as the Hermitian third letter. Signs are ignored
here; the simulator attaches them.

Qubit labels are 1-based at this module's public surface (``graph_state``
edges, ``PauliWord.letter``), 0-based inside bit matrices.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from mbqcorder import gf2
from mbqcorder.exceptions import NotCommuting, NotFullRank, NotInStabilizer
from mbqcorder.gf2 import BitMatrix


class Axis(enum.Enum):
    X = "X"
    Y = "Y"
    Z = "Z"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Plane:
    """Ordered measurement plane ``[sigma_phi, sigma_sphi]``."""

    phi: Axis = Axis.X
    sphi: Axis = Axis.Y

    def __post_init__(self) -> None:
        if self.phi == self.sphi:
            raise ValueError(f"degenerate plane [{self.phi},{self.sphi}]")

    @classmethod
    def parse(cls, p: str, q: str | None = None) -> Plane:
        if q is None:
            p, q = p[0], p[1]
        return cls(Axis(p.upper()), Axis(q.upper()))

    @property
    def s(self) -> Axis:
        """The axis orthogonal to the plane."""
        (rest,) = {Axis.X, Axis.Y, Axis.Z} - {self.phi, self.sphi}
        return rest

    def flipped(self) -> Plane:
        return Plane(self.sphi, self.phi)

    def encode(self, letter: str) -> tuple[int, int]:
        """Concrete letter -> ``(w, v)``."""
        if letter == "I":
            return (0, 0)
        ax = Axis(letter)
        if ax == self.phi:
            return (1, 0)
        if ax == self.s:
            return (0, 1)
        return (1, 1)

    def decode(self, w: int, v: int) -> str:
        if w and v:
            return self.sphi.value
        if w:
            return self.phi.value
        if v:
            return self.s.value
        return "I"

    def __str__(self) -> str:
        return f"[{self.phi},{self.sphi}]"


XY = Plane(Axis.X, Axis.Y)


# Products of Hermitian single-qubit Paulis: a*b = i**k * c.
_LETTER_PRODUCT: dict[tuple[str, str], tuple[int, str]] = {}
for _a in "IXYZ":
    _LETTER_PRODUCT[("I", _a)] = (0, _a)
    _LETTER_PRODUCT[(_a, "I")] = (0, _a)
    _LETTER_PRODUCT[(_a, _a)] = (0, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _LETTER_PRODUCT[(_a, _b)] = (1, _c)
    _LETTER_PRODUCT[(_b, _a)] = (3, _c)


@dataclass(frozen=True)
class PauliWord:
    """Pauli operator in the local plane basis.

    ``w`` and ``v`` are packed bit vectors (bit ``a-1`` is qubit ``a``).
    ``phase`` is ``None`` for phase-free words, otherwise the exponent ``k``
    of an overall ``i**k``.
    """

    n: int
    w: int
    v: int
    phase: int | None = None

    def letter_code(self, a: int) -> tuple[int, int]:
        return ((self.w >> (a - 1)) & 1, (self.v >> (a - 1)) & 1)

    def letters(self, planes: Sequence[Plane]) -> str:
        return "".join(planes[a].decode(*self.letter_code(a + 1)) for a in range(self.n))

    def support(self) -> set[int]:
        x = self.w | self.v
        return {a + 1 for a in range(self.n) if (x >> a) & 1}

    def is_identity(self) -> bool:
        return not (self.w or self.v)

    @classmethod
    def identity(cls, n: int) -> PauliWord:
        return cls(n, 0, 0)

    @classmethod
    def from_letters(cls, word: str, planes: Sequence[Plane], phase: int | None = None) -> PauliWord:
        w = v = 0
        for a, ch in enumerate(word):
            bw, bv = planes[a].encode(ch)
            w |= bw << a
            v |= bv << a
        return cls(len(word), w, v, phase)


def multiply(p: PauliWord, q: PauliWord, planes: Sequence[Plane] | None = None) -> PauliWord:
    """Product ``p * q``.

    The (w, v) part is the bitwise sum. The phase is tracked only when both
    words carry one and ``planes`` are given to resolve concrete letters.
    """
    if p.n != q.n:
        raise ValueError("length mismatch")
    w, v = p.w ^ q.w, p.v ^ q.v
    if p.phase is None or q.phase is None or planes is None:
        return PauliWord(p.n, w, v)
    k = p.phase + q.phase
    for a in range(p.n):
        la = planes[a].decode(*p.letter_code(a + 1))
        lb = planes[a].decode(*q.letter_code(a + 1))
        k += _LETTER_PRODUCT[(la, lb)][0]
    return PauliWord(p.n, w, v, k % 4)


def symplectic_product(p: PauliWord, q: PauliWord) -> int:
    """0 if the words commute, 1 otherwise."""
    return (gf2.popcount(p.w & q.v) + gf2.popcount(p.v & q.w)) & 1


@dataclass(frozen=True)
class GeneratorMatrix:
    """Stabilizer generators ``(Phi | S)`` in the sigma_phi / sigma_s basis.

    Rows of ``phi`` and ``s`` are generators, columns are qubits.
    """

    phi: BitMatrix
    s: BitMatrix
    planes: tuple[Plane, ...] = field(default=())

    def __post_init__(self) -> None:
        n = self.phi.nrows
        if self.phi.shape != (n, n) or self.s.shape != (n, n):
            raise ValueError(f"Phi and S must be n x n, got {self.phi.shape} and {self.s.shape}")
        if not self.planes:
            object.__setattr__(self, "planes", (XY,) * n)
        elif len(self.planes) != n:
            raise ValueError("one plane per qubit required")

    @property
    def n(self) -> int:
        return self.phi.nrows

    @property
    def stacked(self) -> BitMatrix:
        """The ``n x 2n`` matrix ``(Phi | S)``; column ``a`` is phi_a, ``n+a`` is s_a."""
        return self.phi.hstack(self.s)

    def generator(self, i: int) -> PauliWord:
        """Row ``i`` (0-based) as a phase-free word."""
        return PauliWord(self.n, self.phi.rows[i], self.s.rows[i])

    def generators(self) -> list[PauliWord]:
        return [self.generator(i) for i in range(self.n)]

    def element(self, coeffs: int) -> PauliWord:
        """Product of the generators selected by the bitmask ``coeffs``."""
        w = v = 0
        for i in range(self.n):
            if (coeffs >> i) & 1:
                w ^= self.phi.rows[i]
                v ^= self.s.rows[i]
        return PauliWord(self.n, w, v)

    def elements(self) -> Iterable[tuple[int, PauliWord]]:
        """All ``2**n`` group elements, paired with their generator masks."""
        for c in range(1 << self.n):
            yield c, self.element(c)

    def contains(self, word: PauliWord) -> bool:
        return gf2.in_row_space(word.w | (word.v << self.n), self.stacked)

    def coefficients(self, word: PauliWord) -> int:
        """Generator mask whose product is ``word``; raises NotInStabilizer."""
        target = BitMatrix.from_ints(gf2.int_to_bits(word.w | (word.v << self.n), 2 * self.n), 1)
        try:
            x = gf2.solve(self.stacked.T, target)
        except gf2.Infeasible as exc:
            raise NotInStabilizer(f"{word.letters(self.planes)} is not in the stabilizer") from exc
        return gf2.bits_to_int(x.col_bits(0))

    def words(self) -> list[str]:
        """Concrete letter strings of the generators."""
        return [self.generator(i).letters(self.planes) for i in range(self.n)]

    def with_planes(self, planes: Sequence[Plane]) -> GeneratorMatrix:
        """Same concrete Pauli group re-encoded in new planes."""
        return from_letters(self.words(), planes, check=False)

    def flip_plane(self, a: int) -> GeneratorMatrix:
        """Exchange sigma_phi <-> sigma_sphi at qubit ``a`` (1-based).

        The concrete letters stay, only their encoding changes:
        ``v_a -> v_a + w_a``.
        """
        planes = list(self.planes)
        planes[a - 1] = planes[a - 1].flipped()
        col = 1 << (a - 1)
        s_rows = [sr ^ col if pr & col else sr for pr, sr in zip(self.phi.rows, self.s.rows)]
        return GeneratorMatrix(self.phi, BitMatrix.from_ints(s_rows, self.n), tuple(planes))

    def same_group(self, other: GeneratorMatrix) -> bool:
        return gf2.row_space_equal(self.stacked, other.stacked)


def check_valid(g: GeneratorMatrix) -> None:
    """Raise unless the generators pairwise commute and are independent."""
    gens = g.generators()
    for i, j in itertools.combinations(range(g.n), 2):
        if symplectic_product(gens[i], gens[j]):
            raise NotCommuting(f"generators {i + 1} and {j + 1} anticommute")
    if gf2.rank(g.stacked) != g.n:
        raise NotFullRank(f"generators have rank {gf2.rank(g.stacked)} < {g.n}")


def from_letters(
    words: Sequence[str], planes: Sequence[Plane] | None = None, *, check: bool = True
) -> GeneratorMatrix:
    """Build a generator matrix from concrete letter strings over {I,X,Y,Z}."""
    n = len(words)
    if any(len(wd) != n for wd in words):
        raise ValueError(f"need {n} words of length {n}")
    bad = {ch for wd in words for ch in wd} - set("IXYZ")
    if bad:
        raise ValueError(f"illegal letters {sorted(bad)}")
    planes = tuple(planes) if planes else (XY,) * n
    pws = [PauliWord.from_letters(wd, planes) for wd in words]
    g = GeneratorMatrix(
        BitMatrix.from_ints([p.w for p in pws], n),
        BitMatrix.from_ints([p.v for p in pws], n),
        planes,
    )
    if check:
        check_valid(g)
    return g


def graph_state_words(edges: Iterable[tuple[int, int]], n: int) -> list[str]:
    letters = [["I"] * n for _ in range(n)]
    for a in range(n):
        letters[a][a] = "X"
    for a, b in edges:
        if a == b:
            raise ValueError(f"self-edge at {a}")
        if not (1 <= a <= n and 1 <= b <= n):
            raise ValueError(f"edge ({a},{b}) outside 1..{n}")
        letters[a - 1][b - 1] = "Z"
        letters[b - 1][a - 1] = "Z"
    return ["".join(row) for row in letters]


def graph_state(edges: Iterable[tuple[int, int]], n: int, planes: Sequence[Plane] | None = None) -> GeneratorMatrix:
    """Generators ``K_a = X_a Z_{N(a)}`` of the graph state on qubits 1..n."""
    return from_letters(graph_state_words(edges, n), planes)


def random_stabilizer(n: int, rng: np.random.Generator, *, random_planes: bool = True) -> GeneratorMatrix:
    """Random stabilizer state with random planes and a random generator basis.

    Starts from a random graph state and permutes the Pauli letters on each
    site, which reaches every stabilizer state up to signs.
    """
    edges = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1) if rng.random() < 0.5]
    words = graph_state_words(edges, n)
    perms = [dict(zip("XYZ", rng.permutation(list("XYZ")))) | {"I": "I"} for _ in range(n)]
    words = ["".join(perms[a][ch] for a, ch in enumerate(wd)) for wd in words]
    axes = list(Axis)
    if random_planes:
        planes = []
        for _ in range(n):
            p, q = rng.choice(3, size=2, replace=False)
            planes.append(Plane(axes[p], axes[q]))
    else:
        planes = [XY] * n
    g = from_letters(words, planes)
    mix = gf2.random_invertible(n, rng)
    return GeneratorMatrix(mix @ g.phi, mix @ g.s, g.planes)
