"""Exact output distributions, outcome sampling, and the anticoncentration-vs-
depth experiment over random brickwall circuits.

Trials derive independent child seeds from the master seed, so results are
bit-identical under a fixed configuration and order-independent to aggregate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import amplitudes as amp
from . import circuits as circ
from .bounds import PASSIVE
from .fock import EVEN, FockState, enumerate_sector
from .linalg import haar_special_orthogonal, haar_unitary

PASSIVE_SECTOR_GUARD = 10 ** 7
FULL_DEPTH = "haar"


class GuardError(RuntimeError):
    """Request exceeds the desk-scale sector or statevector guards."""


def default_outcome(sector: str, n_quadruples: int) -> FockState:
    """Lexicographically first element of the outcome sector."""
    d = 4 * n_quadruples
    if sector == PASSIVE:
        occ = (0,) * (2 * n_quadruples) + (1,) * (2 * n_quadruples)
        return FockState(occ)
    return FockState((0,) * d)


def _sector_states(sector: str, n_quadruples: int) -> list[FockState]:
    d = 4 * n_quadruples
    if sector == PASSIVE:
        if math.comb(d, 2 * n_quadruples) > PASSIVE_SECTOR_GUARD:
            raise GuardError("passive sector exceeds the enumeration guard")
        return enumerate_sector(d, ("particles", 2 * n_quadruples))
    if d > amp.STATEVECTOR_MODE_GUARD:
        raise GuardError("active sector exceeds the statevector guard")
    return enumerate_sector(d, EVEN)


def exact_distribution(spec: amp.CircuitSpec, n_quadruples: int) -> np.ndarray:
    """Probability vector over the outcome sector, in enumerate_sector order."""
    states = _sector_states(spec.group, n_quadruples)
    if spec.group == PASSIVE:
        probs = np.array(
            [abs(amp.passive_magic_amplitude(spec.element.matrix, x)) ** 2 for x in states]
        )
    else:
        v = amp.active_statevector_evolve(
            spec.compiled(), amp.magic_input_vector(n_quadruples)
        )
        probs = np.array([abs(v[x.index()]) ** 2 for x in states])
    return probs


def sample_outcomes(spec: amp.CircuitSpec, n_quadruples: int, shots: int,
                    rng: np.random.Generator) -> list[FockState]:
    """Inverse-CDF sampling from the exact output distribution."""
    if shots == 0:
        return []
    states = _sector_states(spec.group, n_quadruples)
    probs = exact_distribution(spec, n_quadruples)
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    picks = rng.choice(len(states), size=shots, p=probs)
    return [states[i] for i in picks]


# --- random circuit models -------------------------------------------------------


def haar_circuit_probability(sector: str, n_quadruples: int, x: FockState,
                             rng: np.random.Generator) -> float:
    """p_x for one full-depth Haar circuit of the requested sector."""
    d = 4 * n_quadruples
    if sector == PASSIVE:
        u = haar_unitary(d, rng)
        return float(abs(amp.passive_magic_amplitude(u, x)) ** 2)
    o = haar_special_orthogonal(2 * d, rng)
    layout = circ.decompose_active(o)
    v = amp.active_statevector_evolve(layout, amp.magic_input_vector(n_quadruples))
    return float(abs(v[x.index()]) ** 2)


def _brickwall_pairs(n_wires: int, layer: int) -> list[int]:
    first = 1 if layer % 2 == 0 else 2
    return list(range(first, n_wires, 2))


def brickwall_probability(sector: str, n_quadruples: int, layers: int,
                          x: FockState, rng: np.random.Generator) -> float:
    """p_x for one random depth-``layers`` brickwall circuit.

    Each two-qubit brick draws fresh Haar parameters: a Haar U(2) two-mode
    block (passive) or the lift of a Haar SO(4) Majorana block (active).
    """
    d = 4 * n_quadruples
    if sector == PASSIVE:
        u = np.eye(d, dtype=complex)
        for layer in range(layers):
            for k in _brickwall_pairs(d, layer):
                u2 = haar_unitary(2, rng)
                block = np.eye(d, dtype=complex)
                block[k - 1: k + 1, k - 1: k + 1] = u2
                u = block @ u
        return float(abs(amp.passive_magic_amplitude(u, x)) ** 2)
    v = amp.magic_input_vector(n_quadruples)
    for layer in range(layers):
        for k in _brickwall_pairs(d, layer):
            gate = circ.random_active_pair_unitary(rng)
            v = amp.apply_adjacent_two_qubit(v, gate, k, d)
    return float(abs(v[x.index()]) ** 2)




# --- moment estimation -------------------------------------------------------------


@dataclass(frozen=True)
class MomentEstimate:
    """Monte-Carlo estimates of E[X], E[X^2], and the ratio (E X)^2 / E X^2."""

    n_quadruples: int
    sector: str
    layers: int | str
    trials: int
    mean_x: float
    mean_x2: float
    ratio: float
    stderr_mean_x: float
    stderr_mean_x2: float
    stderr_ratio: float
    seed: int


def _batched(values: np.ndarray, n_batches: int = 100):
    n = len(values)
    n_batches = min(n_batches, n)
    bounds = np.linspace(0, n, n_batches + 1, dtype=int)
    return [values[a:b] for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def moment_estimate(n_quadruples: int, sector: str, layers, trials: int,
                    seed: int, x: FockState | None = None) -> MomentEstimate:
    """Estimate the output-probability moments over random circuits.

    ``layers`` is an integer brickwall depth, or ``"haar"`` for full-depth
    Haar-random group elements. Standard errors come from 100 batched means;
    sums use math.fsum so aggregation is order-independent.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if x is None:
        x = default_outcome(sector, n_quadruples)
    seeds = np.random.SeedSequence(seed).spawn(trials)
    values = np.empty(trials)
    for i, child in enumerate(seeds):
        rng = np.random.default_rng(child)
        if layers == FULL_DEPTH:
            values[i] = haar_circuit_probability(sector, n_quadruples, x, rng)
        else:
            values[i] = brickwall_probability(sector, n_quadruples, int(layers), x, rng)
    mean_x = math.fsum(values) / trials
    mean_x2 = math.fsum(values ** 2) / trials
    batches = _batched(values)
    bm = np.array([math.fsum(b) / len(b) for b in batches])
    bm2 = np.array([math.fsum(b ** 2) / len(b) for b in batches])
    k = len(batches)
    stderr_x = float(bm.std(ddof=1) / np.sqrt(k)) if k > 1 else 0.0
    stderr_x2 = float(bm2.std(ddof=1) / np.sqrt(k)) if k > 1 else 0.0
    if mean_x2 > 0:
        ratio = mean_x ** 2 / mean_x2
        # delta method on the batched means: per-batch ratios are too noisy
        # for heavy-tailed X^2 at small batch sizes
        if k > 1:
            cov = np.cov(np.vstack([bm, bm2]), ddof=1) / k
            grad = np.array([2 * mean_x / mean_x2, -mean_x ** 2 / mean_x2 ** 2])
            var_ratio = float(grad @ cov @ grad)
            stderr_ratio = float(np.sqrt(max(var_ratio, 0.0)))
        else:
            stderr_ratio = 0.0
    else:  # deterministic zero-variance edge (e.g. depth 0)
        ratio = 1.0
        stderr_ratio = 0.0
    return MomentEstimate(
        n_quadruples=n_quadruples,
        sector=sector,
        layers=layers,
        trials=trials,
        mean_x=mean_x,
        mean_x2=mean_x2,
        ratio=ratio,
        stderr_mean_x=stderr_x,
        stderr_mean_x2=stderr_x2,
        stderr_ratio=stderr_ratio,
        seed=seed,
    )


def min_depth_for_threshold(n_quadruples: int, sector: str, threshold: float,
                            max_layers: int, trials: int, seed: int,
                            x: FockState | None = None):
    """Smallest depth whose ratio estimate clears the threshold by one stderr.

    Monotone scan L = 0, 1, ..., max_layers; returns (depth or None, rows).
    Depth 0 (the identity ensemble) is judged only when its output probability
    is genuinely nonzero: a constant X has ratio 1 by convention, but a
    constant zero carries no anticoncentration content.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    rows = []
    found = None
    for layers in range(0, max_layers + 1):
        est = moment_estimate(n_quadruples, sector, layers, trials, seed + layers, x=x)
        rows.append(est)
        judged = layers >= 1 or est.mean_x2 > 0
        if judged and found is None and est.ratio - est.stderr_ratio >= threshold:
            found = layers
            break
    return found, rows
