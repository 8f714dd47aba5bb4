"""Fock-basis bookkeeping: occupation bitstrings, Jordan-Wigner strings,
magic-state expansion, and measurement-sector enumeration.

Mode 1 is the leftmost bit of the text form, so the four-mode state
``0011`` occupies modes 3 and 4. All mode and Majorana indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

EVEN = "even"
ODD = "odd"


class SectorMismatchError(ValueError):
    """States do not belong to the requested measurement sector."""


@dataclass(frozen=True, order=True)
class FockState:
    """Occupation bitstring over ``modes`` fermionic modes."""

    occupation: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.occupation):
            raise ValueError("occupation entries must be 0 or 1")

    @classmethod
    def from_string(cls, text: str) -> "FockState":
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_modes(cls, modes: int, occupied) -> "FockState":
        occ = [0] * modes
        for j in occupied:
            if not 1 <= j <= modes:
                raise ValueError(f"mode index {j} out of range")
            occ[j - 1] = 1
        return cls(tuple(occ))

    @property
    def modes(self) -> int:
        return len(self.occupation)

    @property
    def particle_number(self) -> int:
        return sum(self.occupation)

    def occupied_modes(self) -> tuple[int, ...]:
        return tuple(j + 1 for j, b in enumerate(self.occupation) if b)

    def to_string(self) -> str:
        return "".join(str(b) for b in self.occupation)

    def index(self) -> int:
        """Big-endian integer index (mode 1 = most significant bit)."""
        out = 0
        for b in self.occupation:
            out = (out << 1) | b
        return out


def parity(state: FockState) -> str:
    """Eigenvalue sector of the parity operator: popcount mod 2."""
    return EVEN if state.particle_number % 2 == 0 else ODD


def magic_input_expansion(n_quadruples: int) -> list[tuple[tuple[int, ...], float]]:
    """Fock expansion of the N-fold product of four-mode magic states.

    Returns 2^N (mode subset, coefficient) pairs; every coefficient equals
    1/sqrt(2^N) and every subset has size 2N. Block i contributes modes
    {4i-3, 4i-2} or {4i-1, 4i} according to one bit of the subset label.
    """
    if n_quadruples < 1:
        raise ValueError("need at least one quadruple")
    coeff = 1.0 / (2.0 ** (n_quadruples / 2.0))
    out = []
    for label in range(2 ** n_quadruples):
        subset = []
        for i in range(n_quadruples):
            bit = (label >> (n_quadruples - 1 - i)) & 1
            base = 4 * i
            subset.extend([base + 1 + 2 * bit, base + 2 + 2 * bit])
        out.append((tuple(subset), coeff))
    return out


@dataclass(frozen=True)
class PauliString:
    """Per-qubit letters from {I, X, Y, Z} with an exact phase in {1, i, -1, -i}.

    The phase exponent records ``i**phase_power``.
    """

    letters: tuple[str, ...]
    phase_power: int = 0

    def __post_init__(self):
        if any(c not in "IXYZ" for c in self.letters):
            raise ValueError("letters must be I, X, Y or Z")
        object.__setattr__(self, "phase_power", self.phase_power % 4)

    @property
    def qubits(self) -> int:
        return len(self.letters)

    def to_label(self) -> str:
        return "".join(self.letters)


_SINGLE_PRODUCTS = {
    ("I", "I"): (0, "I"), ("I", "X"): (0, "X"), ("I", "Y"): (0, "Y"), ("I", "Z"): (0, "Z"),
    ("X", "I"): (0, "X"), ("X", "X"): (0, "I"), ("X", "Y"): (1, "Z"), ("X", "Z"): (3, "Y"),
    ("Y", "I"): (0, "Y"), ("Y", "X"): (3, "Z"), ("Y", "Y"): (0, "I"), ("Y", "Z"): (1, "X"),
    ("Z", "I"): (0, "Z"), ("Z", "X"): (1, "Y"), ("Z", "Y"): (3, "X"), ("Z", "Z"): (0, "I"),
}


def pauli_product(p: PauliString, q: PauliString) -> PauliString:
    """Exact product p*q in the Pauli group (phase tracked as a power of i)."""
    if p.qubits != q.qubits:
        raise ValueError("Pauli strings act on different qubit counts")
    power = p.phase_power + q.phase_power
    letters = []
    for a, b in zip(p.letters, q.letters):
        k, c = _SINGLE_PRODUCTS[(a, b)]
        power += k
        letters.append(c)
    return PauliString(tuple(letters), power)


def jordan_wigner_majorana(index: int, modes: int) -> PauliString:
    """Jordan-Wigner image of the Majorana operator with 1-based ``index``.

    Odd index 2p-1 maps to Z...Z X on qubit p, even index 2p to Z...Z Y.
    """
    if not 1 <= index <= 2 * modes:
        raise ValueError(f"Majorana index {index} out of range for {modes} modes")
    p = (index + 1) // 2
    tail = "X" if index % 2 else "Y"
    letters = ["Z"] * (p - 1) + [tail] + ["I"] * (modes - p)
    return PauliString(tuple(letters))


def majorana_string(indices, modes: int) -> PauliString:
    """Product m_{a_1} m_{a_2} ... in the given order, as an exact Pauli string."""
    out = PauliString(tuple("I" * modes))
    for a in indices:
        out = pauli_product(out, jordan_wigner_majorana(a, modes))
    return out


def pauli_apply_to_basis(p: PauliString, index: int) -> tuple[int, int]:
    """Apply a Pauli string to the computational basis state with big-endian ``index``.

    Returns ``(phase_power, new_index)`` such that
    ``P |index> = i**phase_power |new_index>``.
    """
    n = p.qubits
    power = p.phase_power
    out = index
    for pos, letter in enumerate(p.letters):
        bit = (index >> (n - 1 - pos)) & 1
        if letter == "I":
            continue
        if letter == "Z":
            if bit:
                power += 2
        elif letter == "X":
            out ^= 1 << (n - 1 - pos)
        elif letter == "Y":
            out ^= 1 << (n - 1 - pos)
            power += 1 if bit == 0 else 3
    return power % 4, out


def pauli_expectation_exact(p: PauliString, amplitudes: dict[int, Fraction]) -> tuple[Fraction, Fraction]:
    """<psi| P |psi> for a sparse real-rational state, as exact (real, imag).

    ``amplitudes`` maps big-endian basis indices to rational amplitudes.
    """
    re = Fraction(0)
    im = Fraction(0)
    for idx, amp in amplitudes.items():
        power, new_idx = pauli_apply_to_basis(p, idx)
        bra = amplitudes.get(new_idx)
        if bra is None:
            continue
        contrib = bra * amp
        if power == 0:
            re += contrib
        elif power == 1:
            im += contrib
        elif power == 2:
            re -= contrib
        else:
            im -= contrib
    return re, im


def magic_state_amplitudes_exact(n_quadruples: int) -> dict[int, Fraction]:
    """Sparse rational amplitudes of the magic input, scaled by sqrt(2^N).

    The true amplitudes are these values divided by sqrt(2^N); expectation
    values of Pauli strings are recovered by dividing by 2^N, which
    :func:`magic_state_pauli_expectation` does.
    """
    d = 4 * n_quadruples
    out = {}
    for subset, _ in magic_input_expansion(n_quadruples):
        state = FockState.from_modes(d, subset)
        out[state.index()] = Fraction(1)
    return out


def magic_state_pauli_expectation(p: PauliString, n_quadruples: int) -> tuple[Fraction, Fraction]:
    """Exact <psi_in| P |psi_in> over the magic input on 4N modes."""
    amps = magic_state_amplitudes_exact(n_quadruples)
    re, im = pauli_expectation_exact(p, amps)
    scale = Fraction(1, 2 ** n_quadruples)
    return re * scale, im * scale


def enumerate_sector(modes: int, sector) -> list[FockState]:
    """All Fock states of a measurement sector, in lexicographic text order.

    ``sector`` is either ``("particles", n)`` for the fixed-particle-number
    sector or ``"even"`` for the positive-parity sector.
    """
    if sector == EVEN:
        states = [
            FockState(occ)
            for occ in _bitstrings(modes)
            if sum(occ) % 2 == 0
        ]
        assert len(states) == 2 ** (modes - 1)
        return states
    kind, n = sector
    if kind != "particles":
        raise ValueError(f"unknown sector {sector!r}")
    if n > modes:
        raise ValueError("particle number exceeds mode count")
    out = []
    for occupied in combinations(range(1, modes + 1), n):
        out.append(FockState.from_modes(modes, occupied))
    out.sort(key=FockState.to_string)
    assert len(out) == comb(modes, n)
    return out


def _bitstrings(n: int):
    for k in range(2 ** n):
        yield tuple((k >> (n - 1 - j)) & 1 for j in range(n))


def sector_of_magic_output(group: str, n_quadruples: int):
    """The outcome sector of the sampling scheme: |x|=2N passive, even parity active."""
    if group == "unitary":
        return ("particles", 2 * n_quadruples)
    return EVEN
