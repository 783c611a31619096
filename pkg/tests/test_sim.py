from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from mbqcorder import ctc, flow, sim, transforms
from mbqcorder.exceptions import NotRunnable, OrderInconsistent, SizeGuard, ZeroSuccessProbability
from mbqcorder.gf2 import BitMatrix
from mbqcorder.stabilizer import from_letters, graph_state, random_stabilizer


def cluster():
    return graph_state([(1, 2), (2, 3)], 3)


def ghz():
    return from_letters(["ZIZ", "IZZ", "XXX"])


def angles(rng, n):
    return list(rng.uniform(-math.pi / 2, math.pi / 2, n))


def test_resource_states_match_independent_construction():
    st = sim.resource_state(cluster())
    assert oracles.fidelity(st.amplitudes, oracles.graph_state_vector([(1, 2), (2, 3)], 3)) == pytest.approx(1)
    ghz_vec = np.zeros(8, dtype=complex)
    ghz_vec[[0, 7]] = 1 / math.sqrt(2)
    assert oracles.fidelity(sim.resource_state(ghz()).amplitudes, ghz_vec) == pytest.approx(1)
    plus = sim.resource_state(from_letters(["X"])).amplitudes
    assert np.allclose(plus, [1 / math.sqrt(2)] * 2)


@pytest.mark.parametrize("seed", range(10))
def test_eigenvalue_check(seed):
    rng = np.random.default_rng(seed)
    g = random_stabilizer(int(rng.integers(1, 7)), rng)
    st = sim.resource_state(g)
    assert abs(np.linalg.norm(st.amplitudes) - 1) < 1e-12
    assert sim.stabilizer_residual(st, g) < 1e-12


def test_fallback_reference():
    g = from_letters(["XX", "YY"])  # orthogonal to |00>
    assert sim.stabilizer_residual(sim.resource_state(g), g) < 1e-12


def test_size_guard():
    g = graph_state([], sim.MAX_QUBITS + 1)
    with pytest.raises(SizeGuard):
        sim.resource_state(g)


def test_cluster_zero_angles_deterministic():
    p = flow.derive_processing(cluster(), [1], [3])
    st = sim.resource_state(cluster())
    for g in (0, 1):
        dist = sim.run_exact(st, p, sim.RunConfig([0, 0, 0], g))
        assert dist.p(0) == pytest.approx(1, abs=1e-10)


def test_random_output_s2():
    p = flow.derive_processing(cluster(), [1], [3])
    st = sim.resource_state(cluster())
    readout = (BitMatrix([[0, 1, 0]]), BitMatrix([[0]]))
    dist = sim.run_exact(st, p, sim.RunConfig([0.4, -1.1, 0.9], readout=readout))
    assert dist.p(0) == pytest.approx(0.5, abs=1e-10)


def test_gauge_independence_and_negative_control():
    rng = np.random.default_rng(7)
    p = flow.derive_processing(cluster(), [1], [3])
    st = sim.resource_state(cluster())
    assert sim.verify_gauge_independence(st, p, [0.3, -0.7, 1.1])
    corrupted = p.replace(H=BitMatrix([[1], [0], [0]]))
    assert not sim.verify_gauge_independence(st, corrupted, [0.3, -0.7, 1.1])
    pg = flow.derive_processing(ghz(), [1], [3])
    assert sim.verify_gauge_independence(sim.resource_state(ghz()), pg, angles(rng, 3))


@pytest.mark.parametrize("seed", range(8))
def test_order_independence_and_normalization(seed):
    rng = np.random.default_rng(seed)
    g = random_stabilizer(int(rng.integers(2, 5)), rng)
    st = sim.resource_state(g)
    for p in flow.enumerate_relations(g):
        if not flow.temporal_relation(p.T).is_strict_partial_order:
            continue
        ang = angles(rng, g.n)
        dists = [sim.run_exact(st, p, sim.RunConfig(ang, order=o)) for o in sim.all_linear_extensions(p.T)]
        assert all(abs(d.total - 1) < 1e-10 for d in dists)
        assert all(d.close_to(dists[0]) for d in dists)
        assert sim.verify_gauge_independence(st, p, ang)


@pytest.mark.parametrize("seed", range(8))
def test_flip_invariance(seed):
    rng = np.random.default_rng(100 + seed)
    g = random_stabilizer(int(rng.integers(2, 5)), rng)
    st = sim.resource_state(g)
    for p in flow.enumerate_relations(g):
        if not flow.temporal_relation(p.T).is_strict_partial_order:
            continue
        ang = angles(rng, g.n)
        base = sim.run_exact(st, p, sim.RunConfig(ang))
        for a in range(1, g.n + 1):
            g2 = g.flip_plane(a)
            ang2 = list(ang)
            ang2[a - 1] = transforms.FLIP_ANGLE(ang2[a - 1])
            flipped = sim.run_exact(sim.resource_state(g2), transforms.flip_plane(p, a), sim.RunConfig(ang2))
            assert flipped.close_to(base)


def test_errors():
    p = flow.derive_processing(cluster(), [1], [3])
    st = sim.resource_state(cluster())
    with pytest.raises(OrderInconsistent):
        sim.run_exact(st, p, sim.RunConfig([0, 0, 0], order=[2, 1, 3]))
    g = graph_state([(1, 2)], 2)
    with pytest.raises(NotRunnable):
        sim.run_exact(sim.resource_state(g), flow.derive_processing(g, [], []), sim.RunConfig([0, 0]))
    with pytest.raises(ZeroSuccessProbability):
        sim.run_postselected(st, p, sim.RunConfig([0, 0, 0], postselect={0: 1}))


def test_postselection_examples():
    p = flow.derive_processing(cluster(), [1], [3])
    st = sim.resource_state(cluster())
    dist, success = sim.run_postselected(st, p, sim.RunConfig([0, 0, 0], postselect={0: 0}))
    assert success == pytest.approx(1) and dist.p(0) == pytest.approx(1)
    readout = (BitMatrix([[0, 1, 0]]), BitMatrix([[0]]))
    _, success = sim.run_postselected(st, p, sim.RunConfig([0.2, 0.5, -0.3], postselect={0: 0}, readout=readout))
    assert success == pytest.approx(0.5, abs=1e-10)


def test_broken_cycle_postselection():
    g = graph_state([(1, 2)], 2)
    trace = ctc.remove_all(g, flow.derive_processing(g, [], []))
    st = sim.resource_state(trace.generators)
    cfg = sim.RunConfig([0.3, -0.4], postselect={r: 0 for r in trace.flag_rows()})
    dist, success = sim.run_postselected(st, trace.final, cfg)
    assert 0 < success <= 1
    assert abs(dist.total - 1) < 1e-10
