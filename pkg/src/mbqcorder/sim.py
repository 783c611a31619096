"""Exact dense-vector simulation of adaptive measurement patterns.

The resource state is the +1 joint eigenvector of the generators read as
concrete Hermitian Pauli strings. Qubit 1 is the most significant tensor
factor. A run enumerates every outcome branch in a fixed measurement order,
so the resulting output distribution is exact up to floating-point error.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from mbqcorder.exceptions import (
    NotRunnable,
    OrderInconsistent,
    SizeGuard,
    ZeroProjection,
    ZeroSuccessProbability,
)
from mbqcorder.flow import ProcessingRelations, temporal_relation
from mbqcorder.gf2 import BitMatrix
from mbqcorder.stabilizer import GeneratorMatrix, Plane

MAX_QUBITS = 14
PRUNE = 1e-14
ATOL = 1e-10

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    n: int
    planes: tuple[Plane, ...]

    def expectation(self, word: str) -> complex:
        return complex(np.vdot(self.amplitudes, apply_pauli(self.amplitudes, word)))


def apply_pauli(vec: np.ndarray, word: str) -> np.ndarray:
    """Apply a Hermitian Pauli string (qubit 1 leftmost) to a flat vector."""
    n = len(word)
    x_mask = z_mask = 0
    ny = 0
    for a, ch in enumerate(word):
        bit = 1 << (n - 1 - a)
        if ch in "XY":
            x_mask |= bit
        if ch in "ZY":
            z_mask |= bit
        ny += ch == "Y"
    idx = np.arange(1 << n)
    src = idx ^ x_mask
    parity = np.zeros(1 << n, dtype=np.int64)
    masked = src & z_mask
    while masked.any():
        parity ^= masked & 1
        masked >>= 1
    return (1j**ny) * np.where(parity, -1, 1) * vec[src]


def _references(n: int):
    dim = 1 << n
    e0 = np.zeros(dim, dtype=complex)
    e0[0] = 1
    yield e0
    rng = np.random.default_rng(0)
    yield rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    for b in range(1, dim):
        e = np.zeros(dim, dtype=complex)
        e[b] = 1
        yield e


def resource_state(g: GeneratorMatrix) -> StateVector:
    """Joint +1 eigenstate of the generators, global phase fixed.

    The largest-magnitude amplitude (first on ties) is made real positive.

    Raises
    ------
    SizeGuard
        More than ``MAX_QUBITS`` qubits.
    """
    n = g.n
    if n > MAX_QUBITS:
        raise SizeGuard(f"{n} qubits exceeds the dense-simulation limit of {MAX_QUBITS}")
    words = g.words()
    for ref in _references(n):
        vec = ref
        for w in words:
            vec = 0.5 * (vec + apply_pauli(vec, w))
        norm = np.linalg.norm(vec)
        if norm > 1e-8:
            vec = vec / norm
            k = int(np.argmax(np.round(np.abs(vec), 12)))
            vec = vec * (abs(vec[k]) / vec[k])
            return StateVector(vec, n, g.planes)
    raise ZeroProjection("every reference vector was annihilated")


def stabilizer_residual(state: StateVector, g: GeneratorMatrix) -> float:
    """Largest ``||K psi - psi||`` over the generators."""
    return max(float(np.linalg.norm(apply_pauli(state.amplitudes, w) - state.amplitudes)) for w in g.words())


def observable(plane: Plane, phi: float, q: int) -> np.ndarray:
    """``cos(phi) sigma_phi + (-1)**q sin(phi) sigma_sphi``."""
    sign = -1.0 if q & 1 else 1.0
    return math.cos(phi) * PAULI[plane.phi.value] + sign * math.sin(phi) * PAULI[plane.sphi.value]


@dataclass(frozen=True)
class ExactDistribution:
    """Output distribution; keys are packed output words (bit ``r`` = output row ``r``)."""

    probs: dict[int, float]
    nbits: int

    @property
    def total(self) -> float:
        return math.fsum(self.probs.values())

    def p(self, value: int) -> float:
        return self.probs.get(value, 0.0)

    def bit_probability(self, r: int, value: int = 1) -> float:
        return math.fsum(pr for o, pr in self.probs.items() if (o >> r) & 1 == value)

    def marginal(self, bits: Sequence[int]) -> ExactDistribution:
        """Distribution of the listed output bits, repacked in the given order."""
        out: dict[int, float] = {}
        for o, pr in sorted(self.probs.items()):
            key = sum(((o >> r) & 1) << k for k, r in enumerate(bits))
            out[key] = out.get(key, 0.0) + pr
        return ExactDistribution(out, len(bits))

    def close_to(self, other: ExactDistribution, atol: float = ATOL) -> bool:
        keys = set(self.probs) | set(other.probs)
        return all(abs(self.p(k) - other.p(k)) <= atol for k in keys)

    def as_strings(self) -> dict[str, float]:
        """Bit-string keys, output row 0 leftmost."""
        return {"".join(str((o >> r) & 1) for r in range(self.nbits)): pr for o, pr in sorted(self.probs.items())}


@dataclass(frozen=True)
class RunConfig:
    """Run parameters.

    ``gauge`` is packed over ``igauge`` positions. ``readout`` replaces the
    output map ``(Z, R)`` of the relations when given. ``postselect`` maps
    output-bit indices to required values.
    """

    angles: Sequence[float]
    gauge: int = 0
    order: Sequence[int] | None = None
    postselect: Mapping[int, int] = field(default_factory=dict)
    readout: tuple[BitMatrix, BitMatrix] | None = None


def linear_extension(t: BitMatrix) -> list[int]:
    """Measurement order compatible with ``t``, smallest ready qubit first."""
    n = t.nrows
    indeg = [0] * n
    for b in range(n):
        indeg[b] = bin(t.rows[b]).count("1")
    ready = [a for a in range(n) if indeg[a] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        a = heapq.heappop(ready)
        order.append(a + 1)
        for b in range(n):
            if t[b, a]:
                indeg[b] -= 1
                if indeg[b] == 0:
                    heapq.heappush(ready, b)
    if len(order) != n:
        raise NotRunnable("influence graph has a closed time-like curve")
    return order


def check_order(t: BitMatrix, order: Sequence[int]) -> None:
    n = t.nrows
    if sorted(order) != list(range(1, n + 1)):
        raise OrderInconsistent(f"order {list(order)} is not a permutation of 1..{n}")
    pos = {a: k for k, a in enumerate(order)}
    rel = temporal_relation(t)
    for a, b in rel.pairs():
        if pos[a] >= pos[b]:
            raise OrderInconsistent(f"{a} must be measured before {b}")


def _measurement_order(p: ProcessingRelations, cfg: RunConfig) -> list[int]:
    if not temporal_relation(p.T).is_strict_partial_order:
        raise NotRunnable("influence graph has a closed time-like curve")
    if cfg.order is None:
        return linear_extension(p.T)
    check_order(p.T, cfg.order)
    return list(cfg.order)


def run_exact(state: StateVector, p: ProcessingRelations, cfg: RunConfig) -> ExactDistribution:
    """Exact output distribution of the adaptive pattern.

    Basis choices follow ``q_a = T[a, :] s + H[a, :] g``; the output is
    ``o = Z s + R g`` (or the override in ``cfg.readout``).

    Raises
    ------
    NotRunnable
        ``T`` has a closed time-like curve.
    OrderInconsistent
        ``cfg.order`` violates the temporal relation.
    """
    n = state.n
    if p.n != n or len(cfg.angles) != n:
        raise ValueError("state, relations and angles disagree on the qubit count")
    order = _measurement_order(p, cfg)
    z, r = cfg.readout if cfg.readout is not None else (p.Z, p.R)
    if z.ncols != n or r.nrows != z.nrows or r.ncols != len(p.igauge):
        raise ValueError("readout shapes do not match the pattern")
    g = cfg.gauge
    h_g = p.H.apply(g)
    r_g = r.apply(g)
    probs: dict[int, float] = {}

    def measure(psi: np.ndarray, a: int, q: int, s_val: int) -> np.ndarray:
        obs = observable(state.planes[a - 1], cfg.angles[a - 1], q)
        proj = 0.5 * (PAULI["I"] + (-1.0 if s_val else 1.0) * obs)
        out = np.tensordot(proj, psi, axes=([1], [a - 1]))
        return np.moveaxis(out, 0, a - 1)

    def branch(psi: np.ndarray, depth: int, s: int) -> None:
        if depth == n:
            weight = float(np.vdot(psi, psi).real)
            o = z.apply(s) ^ r_g
            probs[o] = probs.get(o, 0.0) + weight
            return
        a = order[depth]
        q = ((p.T.rows[a - 1] & s).bit_count() + ((h_g >> (a - 1)) & 1)) & 1
        for s_val in (0, 1):
            nxt = measure(psi, a, q, s_val)
            if float(np.vdot(nxt, nxt).real) <= PRUNE:
                continue
            branch(nxt, depth + 1, s | (s_val << (a - 1)))

    branch(state.amplitudes.reshape((2,) * n), 0, 0)
    return ExactDistribution(dict(sorted(probs.items())), z.nrows)


def run_postselected(state: StateVector, p: ProcessingRelations, cfg: RunConfig) -> tuple[ExactDistribution, float]:
    """Distribution conditioned on ``cfg.postselect`` and its success probability.

    Raises
    ------
    ZeroSuccessProbability
        The conditioning event has probability zero.
    """
    dist = run_exact(state, p, cfg)
    keep = {o: pr for o, pr in dist.probs.items() if all((o >> b) & 1 == v for b, v in cfg.postselect.items())}
    success = math.fsum(keep.values())
    if success <= PRUNE:
        raise ZeroSuccessProbability(f"post-selection {dict(cfg.postselect)} has probability zero")
    return ExactDistribution({o: pr / success for o, pr in keep.items()}, dist.nbits), success


def gauge_distributions(
    state: StateVector, p: ProcessingRelations, angles: Sequence[float], readout: tuple[BitMatrix, BitMatrix] | None = None
) -> list[ExactDistribution]:
    """One distribution per gauge vector, in increasing packed order."""
    k = len(p.igauge)
    return [run_exact(state, p, RunConfig(angles, g, readout=readout)) for g in range(1 << k)]


def verify_gauge_independence(
    state: StateVector,
    p: ProcessingRelations,
    angles: Sequence[float],
    atol: float = ATOL,
    readout: tuple[BitMatrix, BitMatrix] | None = None,
) -> bool:
    """Do all gauge vectors produce the same output distribution?"""
    dists = gauge_distributions(state, p, angles, readout)
    return all(d.close_to(dists[0], atol) for d in dists[1:])


def all_linear_extensions(t: BitMatrix, limit: int = 1000) -> list[list[int]]:
    """Up to ``limit`` measurement orders compatible with ``t``."""
    n = t.nrows
    rel = temporal_relation(t)
    out = []
    for perm in itertools.permutations(range(1, n + 1)):
        pos = {a: k for k, a in enumerate(perm)}
        if all(pos[a] < pos[b] for a, b in rel.pairs()):
            out.append(list(perm))
            if len(out) >= limit:
                break
    return out
