from __future__ import annotations

import numpy as np
import pytest

from mbqcorder.exceptions import NotCommuting, NotFullRank, NotInStabilizer
from mbqcorder.gf2 import BitMatrix
from mbqcorder.stabilizer import (
    XY,
    Axis,
    GeneratorMatrix,
    PauliWord,
    Plane,
    check_valid,
    from_letters,
    graph_state,
    multiply,
    random_stabilizer,
)


def cluster():
    return graph_state([(1, 2), (2, 3)], 3)


def test_plane_tables():
    pl = Plane(Axis.Y, Axis.Z)
    assert pl.s == Axis.X
    assert [pl.encode(c) for c in "IYXZ"] == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert all(pl.decode(*pl.encode(c)) == c for c in "IXYZ")
    assert XY.flipped() == Plane(Axis.Y, Axis.X)
    with pytest.raises(ValueError):
        Plane(Axis.X, Axis.X)


def test_cluster_generators():
    g = cluster()
    assert g.phi == BitMatrix.identity(3)
    assert g.s.to_lists() == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
    assert g.words() == ["XZI", "ZXZ", "IZX"]


def test_single_vertex():
    g = graph_state([], 1)
    assert g.phi.to_lists() == [[1]] and g.s.to_lists() == [[0]]


def test_permuted_plane_at_qubit_two():
    g = graph_state([(1, 2), (2, 3)], 3, [XY, Plane(Axis.Y, Axis.Z), XY])
    # Z at site 2 is sigma_sphi for the [Y,Z] plane.
    assert (g.phi[0, 1], g.s[0, 1]) == (1, 1)


def test_from_letters_examples():
    check_valid(from_letters(["ZIZ", "IZZ", "XXX"]))
    check_valid(from_letters(["XX", "ZZ"]))
    with pytest.raises(NotCommuting):
        from_letters(["XI", "ZI"])
    with pytest.raises(NotFullRank):
        from_letters(["ZZ", "ZZ"])


def test_multiply_cluster():
    g = cluster()
    k13 = multiply(g.generator(0), g.generator(2))
    assert (k13.w, k13.v) == (0b101, 0)
    assert multiply(g.generator(1), g.generator(1)).is_identity()


def test_multiply_phase():
    x = PauliWord.from_letters("X", [XY], phase=0)
    y = PauliWord.from_letters("Y", [XY], phase=0)
    assert multiply(x, y, [XY]).phase == 1  # XY = iZ


def test_coefficients():
    g = cluster()
    assert g.coefficients(g.element(0b101)) == 0b101
    with pytest.raises(NotInStabilizer):
        g.coefficients(PauliWord(3, 0, 0b001))


def test_flip_plane_keeps_letters():
    g = cluster()
    f = g.flip_plane(2)
    assert f.words() == g.words()
    assert f.planes[1] == Plane(Axis.Y, Axis.X)
    assert f.flip_plane(2) == g


@pytest.mark.parametrize("seed", range(20))
def test_random_states_valid_and_relabel(seed):
    rng = np.random.default_rng(seed)
    g = random_stabilizer(int(rng.integers(1, 7)), rng)
    check_valid(g)
    assert g.phi.nrows == g.n
    again = from_letters(g.words(), g.planes)
    assert again.same_group(g)
    relabeled = g.with_planes([XY] * g.n)
    assert relabeled.words() == g.words()
    assert relabeled.planes == (XY,) * g.n


def test_shape_check():
    with pytest.raises(ValueError):
        GeneratorMatrix(BitMatrix.identity(2), BitMatrix.identity(3))
