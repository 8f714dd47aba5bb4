"""Exact output amplitudes and probabilities by three mutually checking backends:
determinants (passive), Pfaffian/Gaussian overlaps (active magnitudes), and a
dense statevector oracle driven by compiled layouts.

The statevector oracle fixes the projective lift of the active representation
gate by gate: a Givens of angle a on Majorana wires (k, k+1) acts as
exp(-a/2 m_k m_{k+1}), i.e. a Z rotation for a within-mode pair and a
nearest-neighbor XX rotation for a cross-mode pair, and the final sign
diagonal acts as the Pauli string of the flipped Majorana operators.
Probabilities are independent of this lift; amplitudes are reported in it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import circuits as circ
from .circuits import ACTIVE, PASSIVE, CircuitLayout
from .fock import (
    EVEN,
    FockState,
    SectorMismatchError,
    magic_input_expansion,
    magic_state_amplitudes_exact,
    majorana_string,
    parity,
    pauli_apply_to_basis,
    pauli_expectation_exact,
)
from .linalg import GroupElement, ORTHOGONAL, UNITARY, pfaffian

STATEVECTOR_MODE_GUARD = 26


class MemoryGuardError(RuntimeError):
    """Statevector request exceeds the desk-scale mode guard."""


@dataclass(frozen=True)
class CircuitSpec:
    """A circuit given as a group element, with an optional compiled layout."""

    group: str  # "passive" or "active"
    element: GroupElement
    layout: CircuitLayout | None = None

    def compiled(self) -> CircuitLayout:
        if self.layout is not None:
            return self.layout
        if self.group == PASSIVE:
            return circ.decompose_passive(self.element.matrix)
        return circ.decompose_active(self.element.matrix)


def passive_spec(u: np.ndarray) -> CircuitSpec:
    return CircuitSpec(PASSIVE, GroupElement(UNITARY, u))


def active_spec(o: np.ndarray) -> CircuitSpec:
    return CircuitSpec(ACTIVE, GroupElement(ORTHOGONAL, o))


# --- determinant backend (passive) --------------------------------------------


def passive_fock_amplitude(u: np.ndarray, rows, cols) -> complex:
    """<X| pi_pas(U) |Y> = det(U[X, Y]) for equal-sized mode subsets (1-based)."""
    rows = tuple(rows)
    cols = tuple(cols)
    if len(rows) != len(cols):
        raise ValueError("bra and ket subsets must have equal size")
    if not rows:
        return 1.0 + 0.0j
    idx_r = np.array(rows) - 1
    idx_c = np.array(cols) - 1
    return complex(np.linalg.det(np.asarray(u)[np.ix_(idx_r, idx_c)]))


def passive_magic_amplitude(u: np.ndarray, x: FockState) -> complex:
    """Output amplitude of the magic input: 2^{-N/2} sum of subset determinants."""
    d = np.asarray(u).shape[0]
    if d % 4:
        raise ValueError("matrix dimension must be 4N")
    n_quad = d // 4
    if x.particle_number != 2 * n_quad:
        raise SectorMismatchError("outcome must have Hamming weight 2N")
    rows = x.occupied_modes()
    total = 0.0 + 0.0j
    for subset, coeff in magic_input_expansion(n_quad):
        total += coeff * passive_fock_amplitude(u, rows, subset)
    return total


def mixed_discriminant_amplitude(u: np.ndarray, x: FockState) -> complex:
    """Equivalent transposed-row form of the magic amplitude (cross-check)."""
    d = np.asarray(u).shape[0]
    n_quad = d // 4
    cols = x.occupied_modes()
    ut = np.asarray(u).T
    total = 0.0 + 0.0j
    coeff = 1.0 / np.sqrt(2.0 ** n_quad)
    for label in range(2 ** n_quad):
        rows = []
        for i in range(n_quad):
            bit = (label >> (n_quad - 1 - i)) & 1
            rows.extend([4 * i + 1 + 2 * bit, 4 * i + 2 + 2 * bit])
        idx_r = np.array(rows) - 1
        idx_c = np.array(cols) - 1
        total += coeff * np.linalg.det(ut[np.ix_(idx_r, idx_c)])
    return complex(total)


# --- dense statevector backend -------------------------------------------------


def zero_state(n_qubits: int) -> np.ndarray:
    v = np.zeros(2 ** n_qubits, dtype=complex)
    v[0] = 1.0
    return v


def basis_state(state: FockState) -> np.ndarray:
    v = np.zeros(2 ** state.modes, dtype=complex)
    v[state.index()] = 1.0
    return v


def magic_input_vector(n_quadruples: int) -> np.ndarray:
    d = 4 * n_quadruples
    if d > STATEVECTOR_MODE_GUARD:
        raise MemoryGuardError(f"{d} modes exceed the statevector guard")
    v = np.zeros(2 ** d, dtype=complex)
    amp = 1.0 / np.sqrt(2.0 ** n_quadruples)
    for idx in magic_state_amplitudes_exact(n_quadruples):
        v[idx] = amp
    return v


def apply_adjacent_two_qubit(state: np.ndarray, gate: np.ndarray, qubit: int,
                             n_qubits: int) -> np.ndarray:
    """Apply a 4x4 gate on adjacent (qubit, qubit+1), 1-based, big-endian."""
    pre = 2 ** (qubit - 1)
    post = 2 ** (n_qubits - qubit - 1)
    block = state.reshape(pre, 4, post)
    return np.matmul(gate.astype(state.dtype, copy=False), block).reshape(-1)


def apply_single_qubit(state: np.ndarray, gate: np.ndarray, qubit: int,
                       n_qubits: int) -> np.ndarray:
    pre = 2 ** (qubit - 1)
    post = 2 ** (n_qubits - qubit)
    block = state.reshape(pre, 2, post)
    return np.matmul(gate.astype(state.dtype, copy=False), block).reshape(-1)


def apply_pauli_string(state: np.ndarray, pauli) -> np.ndarray:
    out = np.zeros_like(state)
    nz = np.nonzero(state)[0]
    for idx in nz:
        power, new_idx = pauli_apply_to_basis(pauli, int(idx))
        out[new_idx] += (1j ** power) * state[idx]
    return out


def evolve_passive(layout: CircuitLayout, state: np.ndarray) -> np.ndarray:
    """Apply a compiled passive layout to a qubit-register statevector."""
    if layout.group != PASSIVE:
        raise ValueError("passive layout required")
    d = layout.dim
    if d > STATEVECTOR_MODE_GUARD:
        raise MemoryGuardError(f"{d} modes exceed the statevector guard")
    v = state.astype(complex)
    for layer in layout.layers:
        for g in layer:
            u2 = circ.givens_matrix(2, 1, g.angle, g.phase)
            v = apply_adjacent_two_qubit(v, circ.passive_pair_unitary(u2), g.wire, d)
    phases = np.real(layout.diagonal)
    if np.any(phases):
        # diag(exp(i*kappa)) acts as exp(i*kappa_j) per occupied mode j
        idx = np.arange(2 ** d)
        total = np.zeros(2 ** d)
        for j in range(d):
            bit = (idx >> (d - 1 - j)) & 1
            total = total + phases[j] * bit
        v = v * np.exp(1j * total)
    return v


def active_statevector_evolve(layout: CircuitLayout, state: np.ndarray) -> np.ndarray:
    """Apply a compiled active layout; parity is conserved gate by gate."""
    if layout.group != ACTIVE:
        raise ValueError("active layout required")
    d = layout.dim // 2
    if d > STATEVECTOR_MODE_GUARD:
        raise MemoryGuardError(f"{d} modes exceed the statevector guard")
    v = state.astype(complex)
    for op in circ.active_layout_qubit_ops(layout):
        if op[0] == "z":
            v = apply_single_qubit(v, circ.rot("Z", -op[2]), op[1], d)
        elif op[0] == "xx":
            v = apply_adjacent_two_qubit(v, circ.xx_rotation(-op[2]), op[1], d)
        else:
            v = apply_pauli_string(v, op[1])
    return v


# --- Pfaffian / Gaussian-overlap backend (active magnitudes) -------------------


def fock_covariance(x: FockState) -> np.ndarray:
    """Majorana covariance of a Fock state: direct sum of (1-2x_j) J blocks."""
    d = x.modes
    lam = np.zeros((2 * d, 2 * d))
    for j, bit in enumerate(x.occupation):
        s = 1.0 - 2.0 * bit
        lam[2 * j, 2 * j + 1] = s
        lam[2 * j + 1, 2 * j] = -s
    return lam


def active_fock_probability(o: np.ndarray, x: FockState, y: FockState) -> float:
    """|<x| pi_act(O) |y>|^2 from covariance matrices: 2^-d Pf(L_x + O L_y O^T).

    Returns 0 for mismatched parities (parity superselection).
    """
    if x.modes != y.modes:
        raise SectorMismatchError("states act on different mode counts")
    if parity(x) != parity(y):
        return 0.0
    d = x.modes
    o = np.asarray(o, dtype=float)
    lam = fock_covariance(x) + o @ fock_covariance(y) @ o.T
    value = float(np.real(pfaffian(lam))) / 2.0 ** d
    return max(value, 0.0)


# --- public probability API ----------------------------------------------------


def output_probability(spec: CircuitSpec, x: FockState) -> float:
    """p_x = |<x| V |psi_in>|^2 for the magic input on the given circuit."""
    d = spec.element.dim if spec.group == PASSIVE else spec.element.dim // 2
    n_quad = d // 4
    if spec.group == PASSIVE:
        if x.particle_number != 2 * n_quad:
            raise SectorMismatchError("outcome outside the fixed-particle sector")
        amp = passive_magic_amplitude(spec.element.matrix, x)
        p = abs(amp) ** 2
    else:
        if parity(x) != EVEN:
            raise SectorMismatchError("outcome outside the even-parity sector")
        v = active_statevector_evolve(spec.compiled(), magic_input_vector(n_quad))
        p = abs(v[x.index()]) ** 2
    return min(max(p, 0.0), 1.0 + 1e-12)


# --- Majorana-monomial coefficient machinery ------------------------------------


def fock_projector_monomials(x: FockState) -> dict[tuple[int, ...], complex]:
    """Exact Majorana-monomial coefficients of |x><x| (keys: ascending subsets)."""
    d = x.modes
    out: dict[tuple[int, ...], complex] = {}
    sigmas = [1 - 2 * b for b in x.occupation]
    for t in range(2 ** d):
        modes = [j for j in range(d) if (t >> j) & 1]
        coeff = (1.0 / 2 ** d) * ((-1j) ** len(modes))
        for j in modes:
            coeff *= sigmas[j]
        subset = tuple(i for j in modes for i in (2 * j + 1, 2 * j + 2))
        out[subset] = complex(coeff)
    return out


_MONOMIAL_CACHE: dict[int, dict[tuple[int, ...], complex]] = {}


def magic_state_monomials(n_quadruples: int) -> dict[tuple[int, ...], complex]:
    """Exact Majorana-monomial coefficients of the magic input density matrix."""
    cached = _MONOMIAL_CACHE.get(n_quadruples)
    if cached is not None:
        return cached
    d = 4 * n_quadruples
    amps = magic_state_amplitudes_exact(n_quadruples)
    scale = Fraction(1, 2 ** n_quadruples)
    out: dict[tuple[int, ...], complex] = {}
    for size in range(0, 2 * d + 1, 2):
        for subset in combinations(range(1, 2 * d + 1), size):
            p = majorana_string(subset, d)
            re, im = pauli_expectation_exact(p, amps)
            re *= scale
            im *= scale
            if re == 0 and im == 0:
                continue
            # w_B = (-1)^{k(k-1)/2} <psi|m_B|psi> / 2^d
            k = len(subset)
            sign = (-1) ** ((k * (k - 1) // 2) % 2)
            out[subset] = sign * complex(float(re), float(im)) / 2 ** d
    _MONOMIAL_CACHE[n_quadruples] = out
    return out


def _monomial_hermitian_sign(k: int) -> int:
    return -1 if (k * (k - 1) // 2) % 2 else 1


def monomial_probability(o: np.ndarray, x: FockState, n_quadruples: int) -> float:
    """p_x via the Majorana-monomial expansion, independent of the statevector.

    p = 2^d sum_{A,B} v_A w_B (-1)^{|A|(|A|-1)/2} det(O[A, B]) over equal-size
    Majorana subsets, with v and w the exact monomial coefficients of the
    outcome projector and the input state. Cost is ~16^N 2^{4N}; use N <= 2.
    """
    d = 4 * n_quadruples
    o = np.asarray(o, dtype=float)
    v_coeffs = fock_projector_monomials(x)
    w_coeffs = magic_state_monomials(n_quadruples)
    total = 0.0 + 0.0j
    for b_set, w in w_coeffs.items():
        cols = [j - 1 for j in b_set]
        for a_set, v in v_coeffs.items():
            if len(a_set) != len(b_set):
                continue
            if a_set:
                rows = [i - 1 for i in a_set]
                det = np.linalg.det(o[np.ix_(rows, cols)])
            else:
                det = 1.0
            total += v * w * _monomial_hermitian_sign(len(a_set)) * det
    return float((2 ** d) * total.real)
