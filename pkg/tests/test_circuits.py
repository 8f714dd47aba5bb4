import numpy as np
import pytest

from flosim import amplitudes as amp
from flosim import circuits as circ
from flosim.fock import FockState, SectorMismatchError, enumerate_sector
from flosim.linalg import GroupMembershipError, haar_special_orthogonal, haar_unitary


def roundtrip_error(matrix, layout):
    return np.linalg.norm(circ.reconstruct_layout(layout).matrix - matrix, ord=2)


def test_identity_decomposition_is_canonical_zero():
    lay = circ.decompose_passive(np.eye(4, dtype=complex))
    assert all(abs(g.angle) < 1e-14 and abs(g.phase) < 1e-14 for g in lay.gates())
    assert np.allclose(lay.diagonal, 0.0)


def test_diagonal_input_goes_to_diagonal():
    kappa = np.array([0.3, -1.2, 2.0, 0.5])
    lay = circ.decompose_passive(np.diag(np.exp(1j * kappa)))
    assert all(abs(g.angle) < 1e-14 for g in lay.gates())
    assert np.allclose(np.exp(1j * lay.diagonal.real), np.exp(1j * kappa))


def test_single_planar_rotation_active():
    o = np.eye(4)
    o[:2, :2] = [[np.cos(0.4), -np.sin(0.4)], [np.sin(0.4), np.cos(0.4)]]
    lay = circ.decompose_active(o)
    nontrivial = [g for g in lay.gates() if abs(g.angle) > 1e-12]
    assert len(nontrivial) == 1 and nontrivial[0].wire == 1
    assert roundtrip_error(o, lay) <= 1e-12


@pytest.mark.parametrize("style", ["brickwall", "triangle"])
def test_roundtrip_and_gate_count_passive(style):
    rng = np.random.default_rng(31)
    for d in (2, 4, 6, 8):
        u = haar_unitary(d, rng)
        lay = circ.decompose_passive(u, style)
        assert roundtrip_error(u, lay) <= 1e-9
        assert lay.num_rotations == d * (d - 1) // 2
        if style == "brickwall":
            assert lay.num_layers <= d


@pytest.mark.parametrize("style", ["brickwall", "triangle"])
def test_roundtrip_and_gate_count_active(style):
    rng = np.random.default_rng(32)
    for dim in (4, 8, 12):
        o = haar_special_orthogonal(dim, rng)
        lay = circ.decompose_active(o, style)
        assert roundtrip_error(o, lay) <= 1e-9
        assert lay.num_rotations == dim * (dim - 1) // 2
        assert np.prod(lay.diagonal) == pytest.approx(1.0)


def test_brickwall_layers_alternate_parity():
    lay = circ.decompose_passive(haar_unitary(8, np.random.default_rng(33)))
    for t, layer in enumerate(lay.layers):
        assert {g.wire % 2 for g in layer} == {(t + 1) % 2}


def test_decompose_rejects_bad_input():
    with pytest.raises(GroupMembershipError):
        circ.decompose_passive(np.eye(4) * 1.01)
    with pytest.raises(GroupMembershipError):
        circ.decompose_active(np.diag([-1.0, 1.0, 1.0, 1.0]))


def test_truncate_depth_basics():
    lay = circ.decompose_passive(haar_unitary(8, np.random.default_rng(34)))
    t0 = circ.truncate_depth(lay, 0)
    assert t0.num_layers == 0 and t0.num_rotations == 0
    t1 = circ.truncate_depth(lay, 1)
    assert len(t1.layers[0]) == 4 and {g.wire for g in t1.layers[0]} == {1, 3, 5, 7}
    full = circ.truncate_depth(lay, lay.num_layers)
    assert full.num_rotations == lay.num_rotations
    assert np.allclose(full.diagonal, 0.0)
    with pytest.raises(ValueError):
        circ.truncate_depth(lay, lay.num_layers + 1)


def test_layout_json_round_trip():
    lay = circ.decompose_active(haar_special_orthogonal(6, np.random.default_rng(35)))
    lay2 = circ.CircuitLayout.from_json(lay.to_json())
    assert roundtrip_error(circ.reconstruct_layout(lay).matrix, lay2) <= 1e-12


# --- merging -------------------------------------------------------------------


def test_merge_quadruple_zero_angles():
    gate = circ.merge_quadruple((0.0, 0.0, 0.0, 0.0))
    assert np.allclose(gate.params, 0.0, atol=1e-9)
    assert gate.residual <= 1e-10


def test_merge_quadruple_pure_xx_branch():
    a1, a4 = 0.35, 0.55
    gate = circ.merge_quadruple((a1, 0.0, 0.0, a4))
    target = circ.quadruple_matrix((a1, 0.0, 0.0, a4))
    assert circ.phase_aligned_distance(gate.matrix(), target) <= 1e-8
    explicit = circ.dact_matrix((0.0, 0.0, 2 * (a1 + a4), 0.0, 0.0, 0.0))
    assert circ.phase_aligned_distance(explicit, target) <= 1e-10


def test_merge_quadruple_random_angles():
    rng = np.random.default_rng(36)
    for _ in range(5):
        alphas = rng.uniform(-np.pi, np.pi, size=4)
        gate = circ.merge_quadruple(tuple(alphas))
        assert circ.phase_aligned_distance(
            gate.matrix(), circ.quadruple_matrix(alphas)) <= 1e-8


def test_merge_active_layout_recomposes():
    rng = np.random.default_rng(37)
    o = haar_special_orthogonal(6, rng)
    lay = circ.decompose_active(o)
    gates, final_pauli = circ.merge_active_quads(lay)
    n = 3
    merged = np.eye(2 ** n, dtype=complex)
    for g in gates:
        op = np.eye(2 ** n, dtype=complex)
        cols = [amp.apply_adjacent_two_qubit(op[:, k].copy(), g.matrix(), g.pair, n)
                for k in range(2 ** n)]
        merged = np.column_stack(cols) @ merged
    cols = [amp.apply_pauli_string(np.eye(2 ** n, dtype=complex)[:, k].copy(), final_pauli)
            for k in range(2 ** n)]
    merged = np.column_stack(cols) @ merged
    reference = np.column_stack([
        amp.active_statevector_evolve(lay, np.eye(2 ** n, dtype=complex)[:, k].copy())
        for k in range(2 ** n)
    ])
    assert circ.phase_aligned_distance(merged, reference) <= 1e-8


# --- native synthesis -----------------------------------------------------------


def test_synthesize_dpas_counts_and_accuracy():
    rng = np.random.default_rng(38)
    for _ in range(10):
        a1, a2 = rng.uniform(-np.pi, np.pi, size=2)
        gate = circ.TwoQubitGate("D_pas", 1, (a1, a2))
        seq = circ.synthesize_native(gate)
        assert seq.entangler_count == 2
        assert seq.single_qubit_rotation_count == 4
        assert circ.phase_aligned_distance(seq.matrix(), gate.matrix()) <= 1e-10


def test_synthesize_dpas_identity_cancels():
    seq = circ.synthesize_native(circ.TwoQubitGate("D_pas", 1, (0.0, 0.0)))
    assert seq.entangler_count == 2
    assert circ.phase_aligned_distance(seq.matrix(), np.eye(4, dtype=complex)) <= 1e-10


def test_synthesize_dact_count():
    rng = np.random.default_rng(39)
    betas = tuple(rng.uniform(-np.pi, np.pi, size=6))
    gate = circ.TwoQubitGate("D_act", 1, betas)
    seq = circ.synthesize_native(gate)
    assert seq.entangler_count == 3
    assert circ.phase_aligned_distance(seq.matrix(), gate.matrix()) <= 1e-10


# --- hiding circuits --------------------------------------------------------------


def _hiding_maps_state(layout, x0, x, sector):
    if sector == "passive":
        v = amp.evolve_passive(layout, amp.basis_state(x0))
    else:
        v = amp.active_statevector_evolve(layout, amp.basis_state(x0))
    return abs(v[x.index()])


def test_hiding_identity():
    x = FockState.from_string("0011")
    lay = circ.hiding_circuit(x, x, "passive")
    assert _hiding_maps_state(lay, x, x, "passive") == pytest.approx(1.0, abs=1e-10)


def test_hiding_passive_swap():
    x0 = FockState.from_string("0011")
    x = FockState.from_string("1001")
    lay = circ.hiding_circuit(x0, x, "passive")
    assert _hiding_maps_state(lay, x0, x, "passive") == pytest.approx(1.0, abs=1e-10)


def test_hiding_active_pair_move():
    x0 = FockState.from_string("0011")
    x = FockState.from_string("1100")
    lay = circ.hiding_circuit(x0, x, "active")
    assert _hiding_maps_state(lay, x0, x, "active") == pytest.approx(1.0, abs=1e-10)


def test_hiding_rejects_sector_mismatch():
    with pytest.raises(SectorMismatchError):
        circ.hiding_circuit(FockState.from_string("0011"),
                            FockState.from_string("0001"), "passive")
    with pytest.raises(SectorMismatchError):
        circ.hiding_circuit(FockState.from_string("0011"),
                            FockState.from_string("0001"), "active")


def test_hiding_random_pairs():
    rng = np.random.default_rng(40)
    states = enumerate_sector(6, ("particles", 3))
    for _ in range(5):
        x0, x = (states[rng.integers(0, len(states))] for _ in range(2))
        lay = circ.hiding_circuit(x0, x, "passive")
        assert _hiding_maps_state(lay, x0, x, "passive") == pytest.approx(1.0, abs=1e-9)
    states = enumerate_sector(4, "even")
    for _ in range(5):
        x0, x = (states[rng.integers(0, len(states))] for _ in range(2))
        lay = circ.hiding_circuit(x0, x, "active")
        assert _hiding_maps_state(lay, x0, x, "active") == pytest.approx(1.0, abs=1e-9)


# --- sector conservation ------------------------------------------------------------


def test_passive_layout_conserves_particle_number():
    rng = np.random.default_rng(41)
    u = haar_unitary(6, rng)
    lay = circ.decompose_passive(u)
    for n in (1, 3):
        x = enumerate_sector(6, ("particles", n))[0]
        v = amp.evolve_passive(lay, amp.basis_state(x))
        leak = sum(abs(v[s.index()]) ** 2
                   for s in _all_states(6) if s.particle_number != n)
        assert leak <= 1e-12


def test_active_layout_conserves_parity():
    rng = np.random.default_rng(42)
    o = haar_special_orthogonal(8, rng)
    lay = circ.decompose_active(o)
    x = FockState.from_string("0011")
    v = amp.active_statevector_evolve(lay, amp.basis_state(x))
    leak = sum(abs(v[s.index()]) ** 2
               for s in _all_states(4) if s.particle_number % 2 == 1)
    assert leak <= 1e-12
    assert abs(np.linalg.norm(v) - 1.0) <= 1e-10


def _all_states(d):
    return [FockState(tuple((k >> (d - 1 - j)) & 1 for j in range(d)))
            for k in range(2 ** d)]
