"""Compilation of U(d) and SO(2d) elements into nearest-neighbor Givens layouts,
two-qubit gate merging, and synthesis into sqrt(iSWAP)/iSWAP native sequences.

Layout conventions
------------------
A layout acts on ``dim`` wires: single-particle modes for the passive group,
Majorana lines for the active group (so an SO(2d) element compiles to a
layout on 2d wires). ``reconstruct_layout`` composes

    M = diag * B(layer_L) * ... * B(layer_1)

with layer 1 applied first. The canonical Givens block on wires (k, k+1) is

    [[exp(i*phi)*cos(a), -sin(a)],
     [exp(i*phi)*sin(a),  cos(a)]]

with a in (-pi/2, pi/2] and phi in (-pi, pi] (phi = 0 for the active group).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize as sopt

from .fock import FockState, PauliString, SectorMismatchError, majorana_string, parity
from .linalg import (
    GROUP_TOL,
    ORTHOGONAL,
    UNITARY,
    GroupElement,
    GroupMembershipError,
)

_EPS = 1e-13

PASSIVE = "passive"
ACTIVE = "active"

_GROUP_OF = {PASSIVE: UNITARY, ACTIVE: ORTHOGONAL}


class MergeSolveError(RuntimeError):
    """Numerical beta-parameter solve did not reach the required residual."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"merge solve failed with residual {residual:.3e}")


@dataclass(frozen=True)
class GivensRotation:
    """Nearest-neighbor rotation on wires (wire, wire+1), 1-based."""

    wire: int
    angle: float
    phase: float = 0.0


@dataclass
class CircuitLayout:
    """Layered Givens decomposition plus a final diagonal.

    ``diagonal`` holds phase angles kappa_j (passive, final diagonal
    diag(exp(i*kappa))) or signs +-1 with product +1 (active).
    """

    group: str
    dim: int
    layers: list[list[GivensRotation]]
    diagonal: np.ndarray
    style: str = "brickwall"

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @property
    def num_rotations(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def gates(self):
        for layer in self.layers:
            yield from layer

    def depth_counts(self) -> dict:
        """Both depth readings: Givens layers, and merged two-qubit bricks.

        The merged count halves the layer count, which is what the
        two-qubit-gate depth claim in the source layouts refers to; the two
        numbers are recorded side by side rather than reconciled.
        """
        return {
            "givens_layers": self.num_layers,
            "merged_two_qubit_depth": (self.num_layers + 1) // 2,
        }

    def to_json(self) -> str:
        payload = {
            "group": self.group,
            "dim": self.dim,
            "style": self.style,
            "layers": [
                [
                    {"wire": g.wire, "angle": g.angle, "phase": g.phase}
                    for g in layer
                ]
                for layer in self.layers
            ],
            "diagonal": [
                {"re": float(np.real(v)), "im": float(np.imag(v))}
                for v in np.atleast_1d(self.diagonal)
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CircuitLayout":
        payload = json.loads(text)
        diag = np.array([v["re"] + 1j * v["im"] for v in payload["diagonal"]])
        if payload["group"] == ACTIVE:
            diag = diag.real
        layers = [
            [GivensRotation(g["wire"], g["angle"], g["phase"]) for g in layer]
            for layer in payload["layers"]
        ]
        return cls(payload["group"], payload["dim"], layers, diag, payload["style"])


def givens_matrix(dim: int, wire: int, angle: float, phase: float = 0.0,
                  real: bool = False) -> np.ndarray:
    if not 1 <= wire <= dim - 1:
        raise ValueError(f"wire {wire} out of range for dim {dim}")
    m = np.eye(dim, dtype=float if real else complex)
    c, s = np.cos(angle), np.sin(angle)
    ph = 1.0 if real else np.exp(1j * phase)
    m[wire - 1, wire - 1] = ph * c
    m[wire - 1, wire] = -s
    m[wire, wire - 1] = ph * s
    m[wire, wire] = c
    return m


def reconstruct_layout(layout: CircuitLayout) -> GroupElement:
    """Multiply the layout back into a group element (round-trip verifier)."""
    real = layout.group == ACTIVE
    dim = layout.dim
    if real:
        m = np.eye(dim)
    else:
        m = np.eye(dim, dtype=complex)
    for layer in layout.layers:
        for g in layer:
            m = givens_matrix(dim, g.wire, g.angle, g.phase, real=real) @ m
    if real:
        m = np.diag(layout.diagonal.real) @ m
    else:
        m = np.diag(np.exp(1j * np.real(layout.diagonal))) @ m
    return GroupElement(_GROUP_OF[layout.group], m)


def _wrap_angle(x: float) -> float:
    out = (x + np.pi) % (2 * np.pi) - np.pi
    if out == -np.pi:
        out = np.pi
    return out


def _fold_half(alpha: float) -> float:
    """Fold into the canonical branch (-pi/2, pi/2]."""
    a = _wrap_angle(alpha)
    if a > np.pi / 2:
        a -= np.pi
    elif a <= -np.pi / 2:
        a += np.pi
    return a


def _right_zero_params(v: np.ndarray, r: int, c: int, real: bool):
    """Parameters (alpha, phi) so that V @ B(alpha, phi)^-1 on columns (c, c+1)
    zeroes V[r, c]; 1-based indices."""
    x = v[r - 1, c - 1]
    y = v[r - 1, c]
    if abs(x) < _EPS:
        return 0.0, 0.0
    if real:
        return _fold_half(np.arctan2(x.real, y.real)), 0.0
    if abs(y) < _EPS:
        return np.pi / 2, 0.0
    phi = _wrap_angle(np.angle(x) - np.angle(y))
    alpha = np.arctan2(abs(x), abs(y))
    return alpha, phi


def _left_zero_params(v: np.ndarray, r: int, c: int, real: bool):
    """Parameters (alpha, phi) so that B(alpha, phi) @ V on rows (r-1, r)
    zeroes V[r, c]; 1-based indices."""
    x = v[r - 1, c - 1]  # pivot, row r-1
    y = v[r - 2, c - 1]
    if abs(x) < _EPS:
        return 0.0, 0.0
    if real:
        return _fold_half(np.arctan2(-x.real, y.real)), 0.0
    if abs(y) < _EPS:
        return np.pi / 2, np.pi
    phi = _wrap_angle(np.angle(-x) - np.angle(y))
    alpha = np.arctan2(abs(x), abs(y))
    return alpha, phi


def _apply_right_inverse(v, wire, alpha, phi):
    c, s = np.cos(alpha), np.sin(alpha)
    ph = np.exp(-1j * phi) if np.iscomplexobj(v) else 1.0
    col0 = v[:, wire - 1].copy()
    col1 = v[:, wire].copy()
    v[:, wire - 1] = ph * c * col0 - s * col1
    v[:, wire] = ph * s * col0 + c * col1


def _apply_left(v, wire, alpha, phi):
    c, s = np.cos(alpha), np.sin(alpha)
    ph = np.exp(1j * phi) if np.iscomplexobj(v) else 1.0
    row0 = v[wire - 1, :].copy()
    row1 = v[wire, :].copy()
    v[wire - 1, :] = ph * c * row0 - s * row1
    v[wire, :] = ph * s * row0 + c * row1


def _commute_through_diagonal(alpha, phi, u, v, real):
    """Rewrite B(alpha, phi)^-1 diag(u, v) as diag(u', v') B(alpha', phi')."""
    if real:
        if abs(alpha - np.pi / 2) < 1e-15:
            return np.pi / 2, 0.0, -v, -u
        beta = -alpha if u * v > 0 else alpha
        return beta, 0.0, u, v
    if abs(alpha - np.pi / 2) < 1e-15:
        return (np.pi / 2, _wrap_angle(np.angle(u / v) + np.pi),
                -np.exp(-1j * phi) * v, v)
    return -alpha, _wrap_angle(np.angle(u / v)), np.exp(-1j * phi) * v, v


def _schedule_layers(gates: list[GivensRotation], parity_of_first: int) -> list[list[GivensRotation]]:
    """Greedy parity-respecting layering: odd wires go to layers of one parity,
    even wires to the other; a gate lands in the earliest admissible slot."""
    if not gates:
        return []
    avail: dict[int, int] = {}
    layers: dict[int, list[GivensRotation]] = {}
    for g in gates:
        t = max(avail.get(g.wire, 0), avail.get(g.wire + 1, 0))
        while (t + parity_of_first) % 2 != (g.wire + 1) % 2:
            t += 1
        layers.setdefault(t, []).append(g)
        avail[g.wire] = t + 1
        avail[g.wire + 1] = t + 1
    return [layers[t] for t in sorted(layers)]


def _validate_input(m: np.ndarray, group: str) -> np.ndarray:
    elem = GroupElement(_GROUP_OF[group], m, tol=GROUP_TOL)
    return elem.matrix


def _decompose(m: np.ndarray, group: str, style: str) -> CircuitLayout:
    real = group == ACTIVE
    v = _validate_input(m, group)
    v = v.astype(float if real else complex).copy()
    d = v.shape[0]

    right_gates: list[GivensRotation] = []
    left_rots: list[tuple[int, float, float]] = []

    if style == "triangle":
        for r in range(d, 1, -1):
            for c in range(1, r):
                alpha, phi = _right_zero_params(v, r, c, real)
                _apply_right_inverse(v, c, alpha, phi)
                right_gates.append(GivensRotation(c, alpha, phi))
    elif style == "brickwall":
        for i in range(1, d):
            if i % 2 == 1:
                for j in range(i):
                    r, c = d - j, i - j
                    alpha, phi = _right_zero_params(v, r, c, real)
                    _apply_right_inverse(v, c, alpha, phi)
                    right_gates.append(GivensRotation(c, alpha, phi))
            else:
                for j in range(1, i + 1):
                    r, c = d + j - i, j
                    alpha, phi = _left_zero_params(v, r, c, real)
                    _apply_left(v, r - 1, alpha, phi)
                    left_rots.append((r - 1, alpha, phi))
    else:
        raise ValueError(f"unknown layout style {style!r}")

    diag = np.diag(v).copy()
    converted: list[GivensRotation] = []
    for wire, alpha, phi in reversed(left_rots):
        u0, v0 = diag[wire - 1], diag[wire]
        a2, p2, u2, v2 = _commute_through_diagonal(alpha, phi, u0, v0, real)
        diag[wire - 1], diag[wire] = u2, v2
        if abs(a2) < 1e-14:
            # a zero-angle Givens is the diagonal phase gate diag(e^{i p2}, 1):
            # fold it into the final diagonal and keep the slot canonical zero
            if not real:
                diag[wire - 1] = diag[wire - 1] * np.exp(1j * p2)
            converted.append(GivensRotation(wire, 0.0, 0.0))
        else:
            converted.append(GivensRotation(wire, a2, p2))

    all_gates = right_gates + converted
    layers = _schedule_layers(all_gates, parity_of_first=0)

    if real:
        signs = np.sign(diag.real)
        signs[signs == 0] = 1.0
        layout_diag = signs
    else:
        layout_diag = np.angle(diag)
    return CircuitLayout(group, d, layers, layout_diag, style)


def decompose_passive(u: np.ndarray, style: str = "brickwall") -> CircuitLayout:
    """Compile a unitary into nearest-neighbor Givens layers + phase diagonal."""
    return _decompose(u, PASSIVE, style)


def decompose_active(o: np.ndarray, style: str = "brickwall") -> CircuitLayout:
    """Compile a special orthogonal matrix into real Givens layers + sign diagonal."""
    layout = _decompose(o, ACTIVE, style)
    if np.prod(layout.diagonal) < 0:
        raise GroupMembershipError("sign diagonal has product -1 (det != +1?)")
    return layout


def truncate_depth(layout: CircuitLayout, layers: int) -> CircuitLayout:
    """Keep the first ``layers`` brickwall layers and drop the final diagonal."""
    if layers < 0:
        raise ValueError("layer count must be nonnegative")
    if layers > layout.num_layers:
        raise ValueError(
            f"layout has {layout.num_layers} layers, cannot keep {layers}"
        )
    if layout.group == ACTIVE:
        diag = np.ones(layout.dim)
    else:
        diag = np.zeros(layout.dim)
    kept = [list(layer) for layer in layout.layers[:layers]]
    return CircuitLayout(layout.group, layout.dim, kept, diag, "brickwall")


# --- hiding circuits ---------------------------------------------------------


def hiding_circuit(x0: FockState, x: FockState, sector: str,
                   style: str = "brickwall") -> CircuitLayout:
    """A compiled FLO circuit mapping |x0> to |x> up to a unit-modulus phase.

    Passive sector: a mode permutation (fermionic swaps). Active sector: a
    Majorana sign diagonal flipping the occupation of the differing modes in
    pairs, which preserves parity.
    """
    if x0.modes != x.modes:
        raise SectorMismatchError("states act on different mode counts")
    d = x0.modes
    if sector == PASSIVE:
        if x0.particle_number != x.particle_number:
            raise SectorMismatchError("particle numbers differ")
        perm = np.zeros((d, d))
        src = list(x0.occupied_modes())
        dst = list(x.occupied_modes())
        src += [j for j in range(1, d + 1) if j not in set(src)]
        dst += [j for j in range(1, d + 1) if j not in set(dst)]
        for a, b in zip(src, dst):
            perm[b - 1, a - 1] = 1.0
        return decompose_passive(perm.astype(complex), style)
    if sector == ACTIVE:
        if parity(x0) != parity(x):
            raise SectorMismatchError("parities differ")
        diff = [j + 1 for j, (a, b) in enumerate(zip(x0.occupation, x.occupation)) if a != b]
        o = np.eye(2 * d)
        for j in diff:
            o[2 * j - 1, 2 * j - 1] = -1.0
        return decompose_active(o, style)
    raise ValueError(f"unknown sector {sector!r}")


# --- two-qubit gate algebra ---------------------------------------------------

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)

XX = np.kron(_X, _X)
YY = np.kron(_Y, _Y)

ISWAP = np.array(
    [[1, 0, 0, 0], [0, 0, -1j, 0], [0, -1j, 0, 0], [0, 0, 0, 1]], dtype=complex
)
SQRT_ISWAP = np.array(
    [
        [1, 0, 0, 0],
        [0, 1 / np.sqrt(2), -1j / np.sqrt(2), 0],
        [0, -1j / np.sqrt(2), 1 / np.sqrt(2), 0],
        [0, 0, 0, 1],
    ],
    dtype=complex,
)
HTILDE = np.array([[1, -1j], [1j, -1]], dtype=complex) / np.sqrt(2)  # swaps Z <-> Y


def rot(w: str, angle: float) -> np.ndarray:
    """Single-qubit rotation exp(i*angle*W) for W in {X, Y, Z}."""
    g = {"X": _X, "Y": _Y, "Z": _Z}[w]
    return np.cos(angle) * _I2 + 1j * np.sin(angle) * g


def dpas_matrix(alpha1: float, alpha2: float) -> np.ndarray:
    """Passive two-qubit gate: (e^{-i a1 Z/2} x e^{i a1 Z/2}) e^{i a2 (XX+YY)/2}."""
    zpart = np.kron(rot("Z", -alpha1 / 2), rot("Z", alpha1 / 2))
    h = (XX + YY) / 2
    from scipy.linalg import expm

    return zpart @ expm(1j * alpha2 * h)


def dact_matrix(betas) -> np.ndarray:
    """Active two-qubit gate (e^{i b5 Z/2} x e^{i b6 Z/2}) e^{i(b3 XX + b4 YY)/2}
    (e^{i b1 Z/2} x e^{i b2 Z/2})."""
    b1, b2, b3, b4, b5, b6 = betas
    from scipy.linalg import expm

    left = np.kron(rot("Z", b5 / 2), rot("Z", b6 / 2))
    right = np.kron(rot("Z", b1 / 2), rot("Z", b2 / 2))
    return left @ expm(1j * (b3 * XX + b4 * YY) / 2) @ right


def quadruple_matrix(alphas) -> np.ndarray:
    """e^{i a1 XX} (e^{i a2 Z} x e^{i a3 Z}) e^{i a4 XX}: the merged-gate source."""
    a1, a2, a3, a4 = alphas
    from scipy.linalg import expm

    return (
        expm(1j * a1 * XX)
        @ np.kron(rot("Z", a2), rot("Z", a3))
        @ expm(1j * a4 * XX)
    )


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius distance minimized over a global phase."""
    overlap = np.trace(a.conj().T @ b)
    if abs(overlap) < 1e-300:
        return float(np.sqrt(np.linalg.norm(a) ** 2 + np.linalg.norm(b) ** 2))
    phase = overlap / abs(overlap)
    return float(np.linalg.norm(a * phase - b))


@dataclass
class TwoQubitGate:
    """Merged or elementary two-qubit gate on adjacent qubits (q, q+1), 1-based."""

    kind: str  # "D_pas" or "D_act"
    pair: int
    params: tuple[float, ...]
    residual: float = 0.0

    def matrix(self) -> np.ndarray:
        if self.kind == "D_pas":
            return dpas_matrix(*self.params)
        return dact_matrix(self.params)


def solve_dact_params(target: np.ndarray, seed: int = 7, max_starts: int = 60,
                      tol: float = 1e-8) -> tuple[tuple[float, ...], float]:
    """Fit D_act parameters to a two-qubit matchgate, up to global phase.

    Least squares on the phase-aligned matrix difference with deterministic
    multi-start; the constraint system has no usable closed-form inverse.
    """
    rng = np.random.default_rng(seed)

    def residual_vec(betas):
        diff = dact_matrix(betas) - target * _align(betas)
        return np.concatenate([diff.real.ravel(), diff.imag.ravel()])

    def _align(betas):
        overlap = np.trace(target.conj().T @ dact_matrix(betas))
        return overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0

    best = None
    starts = [np.zeros(6)]
    starts += [rng.uniform(-np.pi, np.pi, size=6) for _ in range(max_starts - 1)]
    for x0 in starts:
        res = sopt.least_squares(residual_vec, x0, xtol=3e-16, ftol=3e-16, gtol=3e-16)
        dist = phase_aligned_distance(dact_matrix(res.x), target)
        if best is None or dist < best[1]:
            best = (tuple(float(v) for v in res.x), dist)
        if best[1] <= tol * 1e-3:
            break
    if best[1] > tol:
        raise MergeSolveError(best[1])
    return best


def merge_quadruple(alphas, seed: int = 7) -> TwoQubitGate:
    """Merge e^{i a1 XX}(e^{i a2 Z} x e^{i a3 Z})e^{i a4 XX} into one D_act gate."""
    target = quadruple_matrix(alphas)
    betas, residual = solve_dact_params(target, seed=seed)
    return TwoQubitGate("D_act", 1, betas, residual)


# --- qubit-level op stream of an active layout --------------------------------


def active_layout_qubit_ops(layout: CircuitLayout):
    """Yield the qubit-level primitive ops of an active layout, in order.

    Majorana wire 2l-1 pairs (m_{2l-1}, m_{2l}) within mode l: a Z rotation.
    Majorana wire 2l pairs (m_{2l}, m_{2l+1}) across modes: an XX rotation.
    A Givens of angle a lifts to the half-angle rotation exp(-i a/2 P).
    Ops are ("z", qubit, halfangle) or ("xx", qubit, halfangle), and a final
    ("pauli", PauliString) for the sign diagonal.
    """
    if layout.group != ACTIVE:
        raise ValueError("active layout required")
    n_qubits = layout.dim // 2
    for layer in layout.layers:
        for g in layer:
            if g.wire % 2 == 1:
                yield ("z", (g.wire + 1) // 2, g.angle / 2.0)
            else:
                yield ("xx", g.wire // 2, g.angle / 2.0)
    flipped = [i + 1 for i, s in enumerate(layout.diagonal) if s < 0]
    if flipped:
        yield ("pauli", majorana_string(flipped, n_qubits))


def xx_rotation(angle: float) -> np.ndarray:
    """exp(i * angle * XX) in closed form (XX squares to the identity)."""
    return np.cos(angle) * np.eye(4, dtype=complex) + 1j * np.sin(angle) * XX


def _op_matrix(op) -> np.ndarray:
    kind = op[0]
    if kind == "z":
        return rot("Z", -op[2])
    if kind == "xx":
        return xx_rotation(-op[2])
    raise ValueError(kind)


def merge_active_quads(layout: CircuitLayout, seed: int = 7):
    """Merge an active layout's rotation stream into D_act gates + final Paulis.

    Greedy single-pass grouping: ops accumulate per qubit pair and a group is
    flushed (solved into one D_act) once a second XX rotation has been
    absorbed or a later op overlaps the group on a different pair. Every
    emitted gate is a two-qubit matchgate, so the D_act fit always exists.
    """
    n_qubits = layout.dim // 2
    emitted: list[TwoQubitGate] = []
    open_pair: int | None = None
    open_mat = None
    open_xx = 0
    final_pauli = PauliString(tuple("I" * n_qubits))

    def flush():
        nonlocal open_pair, open_mat, open_xx
        if open_pair is None:
            return
        betas, residual = solve_dact_params(open_mat, seed=seed)
        emitted.append(TwoQubitGate("D_act", open_pair, betas, residual))
        open_pair, open_mat, open_xx = None, None, 0

    def qubits_of(op):
        if op[0] == "z":
            return {op[1]}
        return {op[1], op[1] + 1}

    for op in active_layout_qubit_ops(layout):
        if op[0] == "pauli":
            flush()
            final_pauli = op[1]
            continue
        support = qubits_of(op)
        if open_pair is not None:
            pair_support = {open_pair, open_pair + 1}
            if not support <= pair_support or (op[0] == "xx" and open_xx >= 2):
                flush()
        if open_pair is None:
            if op[0] == "xx":
                open_pair = op[1]
            else:
                q = op[1]
                open_pair = q if q < n_qubits else q - 1
            open_mat = np.eye(4, dtype=complex)
        local = _embed_in_pair(op, open_pair)
        open_mat = local @ open_mat
        if op[0] == "xx":
            open_xx += 1
    flush()
    return emitted, final_pauli


def _embed_in_pair(op, pair: int) -> np.ndarray:
    if op[0] == "xx":
        return _op_matrix(op)
    q = op[1]
    local = rot("Z", -op[2])
    if q == pair:
        return np.kron(local, _I2)
    return np.kron(_I2, local)


# --- native gate synthesis -----------------------------------------------------


@dataclass
class NativeGateSequence:
    """Sequence of native ops realizing a two-qubit gate up to global phase.

    Ops are ("rz", qubit, angle) for exp(i*angle*Z/2)... stored explicitly as
    ("rot", "Z", qubit, angle) meaning exp(i*angle*Z), ("sqrt_iswap",) or
    ("iswap",) entanglers, and ("htilde", qubit).
    """

    ops: list[tuple] = field(default_factory=list)

    def matrix(self) -> np.ndarray:
        m = np.eye(4, dtype=complex)
        for op in self.ops:
            if op[0] == "sqrt_iswap":
                g = SQRT_ISWAP
            elif op[0] == "iswap":
                g = ISWAP
            elif op[0] == "rot":
                _, w, qubit, angle = op
                local = rot(w, angle)
                g = np.kron(local, _I2) if qubit == 1 else np.kron(_I2, local)
            elif op[0] == "htilde":
                _, qubit = op
                g = np.kron(HTILDE, _I2) if qubit == 1 else np.kron(_I2, HTILDE)
            else:
                raise ValueError(op[0])
            m = g @ m
        return m

    @property
    def entangler_count(self) -> int:
        return sum(1 for op in self.ops if op[0] in ("sqrt_iswap", "iswap"))

    @property
    def single_qubit_rotation_count(self) -> int:
        return sum(1 for op in self.ops if op[0] == "rot")


def _su2_zyz(m: np.ndarray) -> tuple[float, float, float]:
    """Angles (a, b, c) with m = e^{i a Z} e^{i b Y} e^{i c Z}, m in SU(2)."""
    # m = [[e^{i(a+c)}cos b, e^{i(a-c)}sin b], [-e^{-i(a-c)}sin b, e^{-i(a+c)}cos b]]
    b = np.arctan2(abs(m[0, 1]), abs(m[0, 0]))
    if abs(m[0, 0]) > 1e-12 and abs(m[0, 1]) > 1e-12:
        apc = np.angle(m[0, 0])
        amc = np.angle(m[0, 1])
    elif abs(m[0, 0]) > 1e-12:
        apc = np.angle(m[0, 0])
        amc = apc
    else:
        amc = np.angle(m[0, 1])
        apc = amc
    return (apc + amc) / 2, b, (apc - amc) / 2


def synthesize_native(gate: TwoQubitGate, seed: int = 11) -> NativeGateSequence:
    """Decompose D_pas into 2 sqrt(iSWAP) + 4 Z-rotations, or D_act into
    3 iSWAP + single-qubit rotations, exact up to global phase (1e-10).
    """
    if gate.kind == "D_pas":
        seq = _synthesize_dpas(gate.params)
    else:
        seq = _synthesize_dact(gate.matrix(), seed=seed)
    err = phase_aligned_distance(seq.matrix(), gate.matrix())
    if err > 1e-10:
        raise MergeSolveError(err)
    return seq


def _synthesize_dpas(params) -> NativeGateSequence:
    """Closed-form sqrt(iSWAP) synthesis of the passive Givens gate.

    Template (application order):
        Rz(w1) on qubit 1; sqrt(iSWAP); Rz(w2) on 1 and Rz(w3) on 2;
        sqrt(iSWAP); Rz(w4) on qubit 2,
    where Rz(w) = exp(i w Z / 2). The odd-parity block gives a ZYZ Euler
    problem; the even-parity block fixes the angle sum.
    """
    alpha1, alpha2 = params
    t_odd = np.array(
        [
            [np.exp(-1j * alpha1) * np.cos(alpha2), 1j * np.exp(-1j * alpha1) * np.sin(alpha2)],
            [1j * np.exp(1j * alpha1) * np.sin(alpha2), np.exp(1j * alpha1) * np.cos(alpha2)],
        ]
    )
    # want Z(u1) Y(-u2) X(-pi/2) Z(u3) = g * t_odd  with g = +-1,
    # i.e. Z(u1) Y(-u2) = g * t_odd Z(-u3) X(pi/2) =: M(u3)
    for g in (1.0, -1.0):
        t = g * t_odd
        # M(u3) = [[i t12 e^{i u3}, i t11 e^{-i u3}], [i t22 e^{i u3}, i t21 e^{-i u3}]]
        # ZY products have a real ratio M11/M12; choose u3 accordingly.
        if abs(t[0, 0]) < 1e-12 or abs(t[0, 1]) < 1e-12:
            u3 = 0.0
        else:
            u3 = (np.angle(t[0, 0]) - np.angle(t[0, 1])) / 2.0
        zm = t @ np.diag([np.exp(-1j * u3), np.exp(1j * u3)])
        m = zm @ np.array([[0, 1j], [1j, 0]])
        a, b, c = _su2_zyz(m)
        if abs(c) > 1e-9:  # not a pure ZY product; try shifted branch
            u3 += np.pi / 2
            zm = t @ np.diag([np.exp(-1j * u3), np.exp(1j * u3)])
            m = zm @ np.array([[0, 1j], [1j, 0]])
            a, b, c = _su2_zyz(m)
            if abs(c) > 1e-9:
                continue
        u1, u2 = a, -b
        w1 = 2 * u3
        w4 = -2 * u1
        s_target = 0.0 if g > 0 else 2 * np.pi
        w2 = (s_target - w1 - w4) / 2 + u2
        w3 = (s_target - w1 - w4) / 2 - u2
        seq = NativeGateSequence(
            [
                ("rot", "Z", 1, w1 / 2),
                ("sqrt_iswap",),
                ("rot", "Z", 1, w2 / 2),
                ("rot", "Z", 2, w3 / 2),
                ("sqrt_iswap",),
                ("rot", "Z", 2, w4 / 2),
            ]
        )
        if phase_aligned_distance(seq.matrix(), dpas_matrix(alpha1, alpha2)) <= 1e-10:
            return seq
    raise MergeSolveError(float("nan"))


def _synthesize_dact(target: np.ndarray, seed: int) -> NativeGateSequence:
    """Three-iSWAP synthesis of a D_act gate by deterministic multi-start fit.

    Local layers are ZYZ rotations on each qubit; the fit is polished to
    machine precision by least squares on the phase-aligned difference.
    """
    rng = np.random.default_rng(seed)

    def build(params) -> NativeGateSequence:
        ops = []
        idx = 0
        for layer in range(4):
            for qubit in (1, 2):
                a, b, c = params[idx: idx + 3]
                idx += 3
                ops.extend(
                    [("rot", "Z", qubit, c), ("rot", "Y", qubit, b), ("rot", "Z", qubit, a)]
                )
            if layer < 3:
                ops.append(("iswap",))
        return NativeGateSequence(ops)

    def residual_vec(params):
        m = build(params).matrix()
        overlap = np.trace(target.conj().T @ m)
        phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
        diff = m - target * phase
        return np.concatenate([diff.real.ravel(), diff.imag.ravel()])

    best = None
    for trial in range(80):
        x0 = rng.uniform(-np.pi, np.pi, size=24) if trial else np.zeros(24)
        res = sopt.least_squares(residual_vec, x0, xtol=3e-16, ftol=3e-16, gtol=3e-16)
        seq = build(res.x)
        err = phase_aligned_distance(seq.matrix(), target)
        if best is None or err < best[1]:
            best = (seq, err)
        if best[1] <= 1e-11:
            break
    if best[1] > 1e-10:
        raise MergeSolveError(best[1])
    return best[0]


# --- randomized brickwall blocks (depth experiments) ---------------------------


def passive_pair_unitary(u2: np.ndarray) -> np.ndarray:
    """Lift a two-mode unitary to the qubit pair, basis order (00, 01, 10, 11)."""
    a, b = u2[0, 0], u2[0, 1]
    c, d = u2[1, 0], u2[1, 1]
    det = a * d - b * c
    return np.array(
        [[1, 0, 0, 0], [0, d, c, 0], [0, b, a, 0], [0, 0, 0, det]], dtype=complex
    )


def active_pair_unitary(o4: np.ndarray) -> np.ndarray:
    """Lift an SO(4) block on 4 Majorana lines to the two-qubit unitary."""
    layout = decompose_active(o4)
    m = np.eye(4, dtype=complex)
    for op in active_layout_qubit_ops(layout):
        if op[0] == "pauli":
            g = _pauli_two_qubit_matrix(op[1])
        else:
            g = _embed_in_pair(op, 1)
        m = g @ m
    return m


def _pauli_two_qubit_matrix(p: PauliString) -> np.ndarray:
    mats = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}
    m = np.kron(mats[p.letters[0]], mats[p.letters[1]])
    return (1j ** p.phase_power) * m


def _haar_su2(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    a = v[0] + 1j * v[1]
    b = v[2] + 1j * v[3]
    return np.array([[a, b], [-np.conj(b), np.conj(a)]])


def random_active_pair_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random active two-qubit block, sampled directly in the spin picture.

    Spin(4) = SU(2) x SU(2): the projective image of a Haar SO(4) Majorana
    block is an independent pair of Haar SU(2) blocks on the even and odd
    parity subspaces, which sidesteps compiling a Givens layout per gate.
    Probabilities are insensitive to the projective phase.
    """
    a = _haar_su2(rng)
    b = _haar_su2(rng)
    u = np.zeros((4, 4), dtype=complex)
    u[np.ix_([0, 3], [0, 3])] = a
    u[np.ix_([1, 2], [1, 2])] = b
    return u
