import numpy as np
import pytest

from flosim import amplitudes as amp
from flosim import circuits as circ
from flosim.fock import FockState, SectorMismatchError, enumerate_sector
from flosim.linalg import haar_special_orthogonal, haar_unitary


def test_passive_fock_amplitude_identity():
    eye = np.eye(6, dtype=complex)
    assert amp.passive_fock_amplitude(eye, (1, 3), (1, 3)) == pytest.approx(1.0)
    assert amp.passive_fock_amplitude(eye, (1, 3), (1, 4)) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        amp.passive_fock_amplitude(eye, (1, 2), (1, 2, 3))


def test_passive_fock_amplitude_matches_statevector():
    rng = np.random.default_rng(50)
    u = haar_unitary(6, rng)
    lay = circ.decompose_passive(u)
    y = FockState.from_string("000111")
    v = amp.evolve_passive(lay, amp.basis_state(y))
    for x in enumerate_sector(6, ("particles", 3)):
        det = amp.passive_fock_amplitude(u, x.occupied_modes(), y.occupied_modes())
        assert abs(v[x.index()] - det) <= 1e-10


def test_magic_amplitude_identity_cases():
    eye = np.eye(4, dtype=complex)
    a = amp.passive_magic_amplitude(eye, FockState.from_string("0011"))
    assert a == pytest.approx(1 / np.sqrt(2))
    assert amp.passive_magic_amplitude(eye, FockState.from_string("0101")) == pytest.approx(0.0)
    with pytest.raises(SectorMismatchError):
        amp.passive_magic_amplitude(eye, FockState.from_string("0001"))


def test_magic_amplitude_matches_statevector_n2():
    rng = np.random.default_rng(51)
    u = haar_unitary(8, rng)
    lay = circ.decompose_passive(u)
    v = amp.evolve_passive(lay, amp.magic_input_vector(2))
    for x in enumerate_sector(8, ("particles", 4))[::7]:
        assert abs(v[x.index()] - amp.passive_magic_amplitude(u, x)) <= 1e-9


def test_mixed_discriminant_equals_direct_form():
    rng = np.random.default_rng(52)
    for n_quad in (1, 2):
        u = haar_unitary(4 * n_quad, rng)
        for x in enumerate_sector(4 * n_quad, ("particles", 2 * n_quad))[:5]:
            assert abs(amp.passive_magic_amplitude(u, x)
                       - amp.mixed_discriminant_amplitude(u, x)) <= 1e-10


def test_active_statevector_identity_and_phase():
    lay = circ.CircuitLayout("active", 8, [], np.ones(8))
    vin = amp.magic_input_vector(1)
    assert np.allclose(amp.active_statevector_evolve(lay, vin), vin)
    zlay = circ.CircuitLayout("active", 8, [[circ.GivensRotation(1, 0.8)]], np.ones(8))
    v0 = amp.basis_state(FockState.from_string("0000"))
    out = amp.active_statevector_evolve(zlay, v0)
    assert abs(abs(out[0]) - 1.0) <= 1e-12  # phase only


def test_active_norm_drift_deep_circuit():
    rng = np.random.default_rng(53)
    o = haar_special_orthogonal(12, rng)
    lay = circ.decompose_active(o)
    v = amp.active_statevector_evolve(lay, amp.basis_state(FockState.from_string("000011")))
    assert abs(np.linalg.norm(v) - 1.0) <= 1e-10


def test_active_fock_probability_identity():
    eye = np.eye(8)
    x = FockState.from_string("0011")
    y = FockState.from_string("0101")
    assert amp.active_fock_probability(eye, x, x) == pytest.approx(1.0)
    assert amp.active_fock_probability(eye, x, y) == pytest.approx(0.0, abs=1e-12)


def test_active_fock_probability_parity_mismatch_is_zero():
    eye = np.eye(8)
    assert amp.active_fock_probability(
        eye, FockState.from_string("0011"), FockState.from_string("0001")) == 0.0


def test_active_fock_probability_matches_statevector():
    rng = np.random.default_rng(54)
    o = haar_special_orthogonal(12, rng)
    lay = circ.decompose_active(o)
    worst = 0.0
    for y in enumerate_sector(6, "even")[:3]:
        v = amp.active_statevector_evolve(lay, amp.basis_state(y))
        for x in enumerate_sector(6, "even")[:8]:
            p_sv = abs(v[x.index()]) ** 2
            worst = max(worst, abs(p_sv - amp.active_fock_probability(o, x, y)))
    assert worst <= 1e-8


def test_monomial_probability_matches_statevector():
    rng = np.random.default_rng(55)
    o = haar_special_orthogonal(8, rng)
    lay = circ.decompose_active(o)
    v = amp.active_statevector_evolve(lay, amp.magic_input_vector(1))
    for x in enumerate_sector(4, "even")[:6]:
        p_sv = abs(v[x.index()]) ** 2
        assert abs(p_sv - amp.monomial_probability(o, x, 1)) <= 1e-10


def test_output_probability_identity_cases():
    spec = amp.passive_spec(np.eye(4, dtype=complex))
    assert amp.output_probability(spec, FockState.from_string("0011")) == pytest.approx(0.5)
    assert amp.output_probability(spec, FockState.from_string("1100")) == pytest.approx(0.5)


def test_output_probability_normalization_passive_n2():
    rng = np.random.default_rng(56)
    spec = amp.passive_spec(haar_unitary(8, rng))
    total = sum(amp.output_probability(spec, x)
                for x in enumerate_sector(8, ("particles", 4)))
    assert total == pytest.approx(1.0, abs=1e-9)


def test_degree_scaling_invariance():
    # p is homogeneous in U and U+: a global phase leaves it unchanged
    rng = np.random.default_rng(57)
    u = haar_unitary(4, rng)
    x = FockState.from_string("0011")
    p0 = abs(amp.passive_magic_amplitude(u, x)) ** 2
    for lam in (0.3, 1.2, 2.5):
        p1 = abs(amp.passive_magic_amplitude(np.exp(1j * lam) * u, x)) ** 2
        assert p1 == pytest.approx(p0, rel=1e-10)


def test_degree_polynomial_fit_single_parameter_family():
    # p(t) along U(t) = U exp(i t K) restricted to one parameter is a
    # trigonometric polynomial of the stated degree; check via fit residual
    rng = np.random.default_rng(58)
    u = haar_unitary(4, rng)
    k = np.diag([1.0, 0.0, 0.0, 0.0])
    x = FockState.from_string("0011")
    ts = np.linspace(0.0, 2 * np.pi, 9, endpoint=False)
    vals = []
    for t in ts:
        ut = u @ np.diag(np.exp(1j * t * np.diag(k)))
        vals.append(abs(amp.passive_magic_amplitude(ut, x)) ** 2)
    # a single-column phase family carries frequencies -1, 0, +1 only
    freqs = np.fft.fft(vals)
    assert np.max(np.abs(freqs[2:-1])) <= 1e-9 * max(1.0, np.max(np.abs(freqs)))


def test_hiding_probability_equality():
    rng = np.random.default_rng(59)
    u = haar_unitary(4, rng)
    x0 = FockState.from_string("0011")
    for x in enumerate_sector(4, ("particles", 2)):
        lay = circ.hiding_circuit(x0, x, "passive")
        vx = circ.reconstruct_layout(lay).matrix
        p_direct = abs(amp.passive_magic_amplitude(u, x)) ** 2
        p_hidden = abs(amp.passive_magic_amplitude(vx.conj().T @ u, x0)) ** 2
        assert p_hidden == pytest.approx(p_direct, abs=1e-9)


def test_memory_guard():
    with pytest.raises(amp.MemoryGuardError):
        amp.magic_input_vector(7)  # 28 modes exceeds the guard
