"""Monte-Carlo simulation of the efficient active-FLO tomography protocol.

One round prepares each of the 2d single-Majorana-excitation states, evolves
it through the unknown circuit, and measures each Majorana-string observable,
yielding a full 2d x 2d matrix of +-1 outcomes whose mean is the orthogonal
matrix O encoding the circuit. The estimator is the SO-projected polar factor
of the running average.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import ORTHOGONAL, GroupElement, polar_orthogonal_factor


def required_rounds(modes: int, epsilon: float, delta: float) -> int:
    """ceil(28 d^3 / eps^2 * ln(4 d / delta)): the certified sample budget."""
    if modes < 1:
        raise ValueError("need at least one mode")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not 0.0 < epsilon <= 2.0 * modes:
        raise ValueError("epsilon must lie in (0, 2d]")
    return math.ceil(28.0 * modes ** 3 / epsilon ** 2 * math.log(4.0 * modes / delta))


@dataclass
class TomographyRecord:
    """Running sum of the per-round +-1 outcome matrices."""

    dim: int
    rounds: int = 0
    running_sum: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.running_sum is None:
            self.running_sum = np.zeros((self.dim, self.dim))

    def add(self, round_matrix: np.ndarray) -> None:
        self.running_sum = self.running_sum + round_matrix
        self.rounds += 1

    def merge(self, other: "TomographyRecord") -> "TomographyRecord":
        if other.dim != self.dim:
            raise ValueError("mismatched dimensions")
        out = TomographyRecord(self.dim)
        out.running_sum = self.running_sum + other.running_sum
        out.rounds = self.rounds + other.rounds
        return out

    def average(self) -> np.ndarray:
        if self.rounds == 0:
            raise ValueError("no rounds recorded")
        return self.running_sum / self.rounds


def simulate_round(o_true: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One protocol round: independent +-1 entries with means O_yx.

    A two-valued observable's distribution is fixed by its mean, so the
    outcome is +1 with probability (1 + O_yx)/2 per entry. Entries beyond
    [-1, 1] by more than 1e-10 trigger a warning before clamping.
    """
    o = np.asarray(o_true, dtype=float)
    excess = np.max(np.abs(o)) - 1.0
    if excess > 1e-10:
        warnings.warn(f"matrix entries exceed [-1, 1] by {excess:.2e}; clamping")
    p_plus = np.clip((1.0 + o) / 2.0, 0.0, 1.0)
    return np.where(rng.random(o.shape) < p_plus, 1.0, -1.0)


def simulate_rounds(o_true: np.ndarray, rounds: int,
                    rng: np.random.Generator) -> TomographyRecord:
    """Vectorized batch of independent rounds accumulated into a record."""
    o = np.asarray(o_true, dtype=float)
    record = TomographyRecord(o.shape[0])
    p_plus = np.clip((1.0 + o) / 2.0, 0.0, 1.0)
    chunk = max(1, min(rounds, 10 ** 7 // o.size))
    done = 0
    while done < rounds:
        take = min(chunk, rounds - done)
        draws = rng.random((take,) + o.shape) < p_plus
        outcomes = np.where(draws, 1.0, -1.0)
        record.running_sum = record.running_sum + outcomes.sum(axis=0)
        record.rounds += take
        done += take
    return record


def estimate(record: TomographyRecord) -> tuple[np.ndarray, float]:
    """SO-projected estimator: the polar factor of the sample average.

    Returns (O_hat, ||M_hat - O_hat||): the reported distance bounds the
    projection step's own contribution to the error.
    """
    m_hat = record.average()
    o_hat = polar_orthogonal_factor(m_hat)
    gap = float(np.linalg.norm(m_hat - o_hat, ord=2))
    return o_hat, gap


def diamond_bound(o: np.ndarray, o_prime: np.ndarray) -> float:
    """2 d ||O - O'||: certified diamond-norm distance of the FLO channels."""
    o = np.asarray(o, dtype=float)
    modes = o.shape[0] // 2
    return float(2.0 * modes * np.linalg.norm(o - np.asarray(o_prime), ord=2))


@dataclass(frozen=True)
class TrialResult:
    trial: int
    rounds: int
    op_norm_error: float
    diamond: float
    success: bool


def run_protocol(o_true: np.ndarray, epsilon: float, delta: float, trials: int,
                 rng: np.random.Generator, rounds: int | None = None) -> list[TrialResult]:
    """Repeat the full tomography pipeline and score diamond-norm successes."""
    o_true = GroupElement(ORTHOGONAL, o_true).matrix
    modes = o_true.shape[0] // 2
    r = required_rounds(modes, epsilon, delta) if rounds is None else rounds
    out = []
    for trial in range(trials):
        record = simulate_rounds(o_true, r, rng)
        o_hat, _ = estimate(record)
        err = float(np.linalg.norm(o_hat - o_true, ord=2))
        dia = diamond_bound(o_true, o_hat)
        out.append(TrialResult(trial, r, err, dia, dia <= epsilon))
    return out
