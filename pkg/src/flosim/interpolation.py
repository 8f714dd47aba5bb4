"""Berlekamp-Welch rational recovery over exact rationals, equispaced
polynomial fitting, degree-bound calculators, and the desk-scale
worst-to-average-case reduction demo.

Exact recovery runs over arbitrary-precision rationals only; float inputs
route to least-squares fitting with residual reporting, because the linear
system behind the decoder is meaningless under rounding and physical output
probabilities are not rational at rational nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

try:
    from gmpy2 import mpq as _fast_rational
except ImportError:  # pragma: no cover
    _fast_rational = Fraction

from . import highprec
from .fock import FockState
from .linalg import ORTHOGONAL, UNITARY, haar_special_orthogonal, haar_unitary
from .sampling import default_outcome

PASSIVE = "passive"
ACTIVE = "active"


class InsufficientPointsError(ValueError):
    """Fewer evaluation points than the decoder needs."""


class RecoveryError(RuntimeError):
    """No rational function of the stated degrees fits all but t points."""


# --- exact polynomial helpers ----------------------------------------------------
# the helpers are generic over exact rational types; hot paths run on gmpy2
# rationals and convert to Fraction at the public boundary


def _as_fast(value) -> "_fast_rational":
    if isinstance(value, Fraction):
        return _fast_rational(value.numerator, value.denominator)
    return _fast_rational(value)


def _as_fraction(value) -> Fraction:
    return Fraction(value.numerator, value.denominator)


def poly_trim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def poly_eval(p, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _is_zero_poly(p) -> bool:
    return all(c == 0 for c in p)


def poly_divmod(a, b):
    a = list(a)
    b = poly_trim(list(b))
    if _is_zero_poly(b):
        raise ZeroDivisionError("polynomial division by zero")
    zero = a[0] * 0 if a else b[0] * 0
    q = [zero] * max(1, len(a) - len(b) + 1)
    r = list(a)
    while len(r) >= len(b) and not _is_zero_poly(r):
        shift = len(r) - len(b)
        factor = r[-1] / b[-1]
        if factor == 0:
            r.pop()
            continue
        q[shift] = q[shift] + factor
        for i, c in enumerate(b):
            r[shift + i] = r[shift + i] - factor * c
        r.pop()
        r = r if r else [zero]
    return poly_trim(q), poly_trim(r if r else [zero])


def poly_gcd(a, b):
    a = poly_trim(list(a))
    b = poly_trim(list(b))
    while not _is_zero_poly(b):
        _, r = poly_divmod(a, b)
        a, b = b, poly_trim(r)
    if a[-1] != 0:
        a = [c / a[-1] for c in a]  # monic
    return a


@dataclass(frozen=True)
class RationalFunctionExact:
    """Coprime numerator/denominator over exact rationals, denominator monic."""

    numerator: tuple[Fraction, ...]
    denominator: tuple[Fraction, ...]

    @property
    def degrees(self) -> tuple[int, int]:
        return len(self.numerator) - 1, len(self.denominator) - 1

    def __call__(self, x: Fraction) -> Fraction:
        den = poly_eval(self.denominator, x)
        if den == 0:
            raise ZeroDivisionError("pole of the rational function")
        return poly_eval(self.numerator, x) / den

    @classmethod
    def from_polys(cls, num, den) -> "RationalFunctionExact":
        num = poly_trim([_as_fast(c) for c in num])
        den = poly_trim([_as_fast(c) for c in den])
        g = poly_gcd(num, den)
        if len(g) > 1:
            num, _ = poly_divmod(num, g)
            den, _ = poly_divmod(den, g)
        lead = den[-1]
        num = [_as_fraction(c / lead) for c in num]
        den = [_as_fraction(c / lead) for c in den]
        return cls(tuple(num), tuple(den))


def _rational_kernel_vector(rows: list[list[Fraction]], n_cols: int):
    """A nonzero kernel vector of the homogeneous system, by exact elimination.

    Arithmetic runs over gmpy2 rationals when available (identical exact
    semantics, much faster reduction) and converts back to Fraction.
    """
    zero = _fast_rational(0)
    m = [[_fast_rational(c.numerator, c.denominator) for c in r] for r in rows]
    pivots: dict[int, int] = {}
    row = 0
    for col in range(n_cols):
        pivot = None
        for r in range(row, len(m)):
            if m[r][col] != zero:
                pivot = r
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        pv = m[row][col]
        m[row] = [c / pv for c in m[row]]
        for r in range(len(m)):
            if r != row and m[r][col] != zero:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[row])]
        pivots[col] = row
        row += 1
        if row == len(m):
            break
    free = [c for c in range(n_cols) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    vec = [Fraction(0)] * n_cols
    vec[fc] = Fraction(1)
    for col, r in pivots.items():
        value = -m[r][fc]
        vec[col] = Fraction(value.numerator, value.denominator)
    return vec


def bw_rational_recover(points, d1: int, d2: int, t: int) -> RationalFunctionExact:
    """Berlekamp-Welch decoding of a rational function of degrees (d1, d2)
    from L > d1 + d2 + 2t exact-rational evaluations with at most t errors.

    Solves N(x_i) = r_i * D(x_i) for deg N <= d1 + t, deg D <= d2 + t; the
    recovered reduced fraction is verified against the point set and a
    RecoveryError is raised when more than t points disagree.
    """
    pts = [(Fraction(x), Fraction(r)) for x, r in points]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("evaluation nodes must be distinct")
    L = len(pts)
    if L <= d1 + d2 + 2 * t:
        raise InsufficientPointsError(
            f"need more than d1+d2+2t = {d1 + d2 + 2 * t} points, got {L}"
        )
    n_num = d1 + t + 1
    n_den = d2 + t + 1
    rows = []
    for x, r in pts:
        row = []
        xp = Fraction(1)
        for _ in range(n_num):
            row.append(xp)
            xp *= x
        xp = Fraction(1)
        for _ in range(n_den):
            row.append(-r * xp)
            xp *= x
        rows.append(row)
    vec = _rational_kernel_vector(rows, n_num + n_den)
    if vec is None:
        raise RecoveryError("no nonzero solution of the decoding system")
    num = poly_trim(list(vec[:n_num])) or [Fraction(0)]
    den = poly_trim(list(vec[n_num:]))
    if den == [Fraction(0)]:
        raise RecoveryError("vanishing denominator in the decoding solution")
    func = RationalFunctionExact.from_polys(num, den)
    got_d1, got_d2 = func.degrees
    if got_d1 > d1 or got_d2 > d2:
        raise RecoveryError("recovered degrees exceed the stated bounds")
    fast_num = [_as_fast(c) for c in func.numerator]
    fast_den = [_as_fast(c) for c in func.denominator]
    bad = 0
    for x, r in pts:
        xf = _as_fast(x)
        den_val = poly_eval(fast_den, xf)
        if den_val == 0:
            bad += 1
            continue
        if poly_eval(fast_num, xf) != _as_fast(r) * den_val:
            bad += 1
    if bad > t:
        raise RecoveryError(f"{bad} disagreements exceed the error budget t={t}")
    return func


# --- float-side fitting -------------------------------------------------------------


def polynomial_fit_equispaced(values, degree: int, lo: float, hi: float,
                              dps: int = highprec.DPS):
    """Least-squares fit on equispaced nodes in [lo, hi] in extended precision.

    ``values`` are the samples at ``numpy.linspace(lo, hi, len(values))``.
    Returns (evaluator, max node residual).
    """
    n = len(values)
    if n < degree + 1:
        raise InsufficientPointsError("need at least degree+1 nodes")
    thetas = np.linspace(lo, hi, n)
    return highprec.fit_polynomial(thetas, values, degree, dps=dps)


def paturi_bound(eps: float, k: int, delta: float) -> float:
    """eps * exp(4 k (1 + 1/Delta)): extrapolation blow-up to theta = 0."""
    if not 0.0 < delta <= 1.0:
        raise ValueError("Delta must lie in (0, 1]")
    return float(eps * math.exp(4.0 * k * (1.0 + 1.0 / delta)))


def degree_bounds(sector: str, n_quadruples: int) -> tuple[int, int]:
    """Rational degrees of p_x along the Cayley path: (16 N^2, 16 N^2) passive,
    (32 N^2, 32 N^2) active (2dn and 2d^2 with d = 4N, n = 2N)."""
    if n_quadruples < 1:
        raise ValueError("need at least one quadruple")
    if sector == PASSIVE:
        return 16 * n_quadruples ** 2, 16 * n_quadruples ** 2
    if sector == ACTIVE:
        return 32 * n_quadruples ** 2, 32 * n_quadruples ** 2
    raise ValueError(f"unknown sector {sector!r}")


# --- reduction demo ------------------------------------------------------------------


def _random_rational_function(d1: int, d2: int, nodes,
                              rng: np.random.Generator) -> RationalFunctionExact:
    while True:
        num = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 8)))
               for _ in range(d1 + 1)]
        den = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 8)))
               for _ in range(d2)] + [Fraction(1)]
        if num[-1] == 0:
            num[-1] = Fraction(1)
        func = RationalFunctionExact.from_polys(num, den)
        if func.degrees != (d1, d2):
            continue
        # the demo evaluates at the nodes and extrapolates to 0: no poles there
        if any(poly_eval(func.denominator, x) == 0 for x in [*nodes, Fraction(0)]):
            continue
        return func


def reduction_demo_exact(sector: str, n_quadruples: int, delta: Fraction, L: int,
                         corruptions: int, t_budget: int,
                         rng: np.random.Generator) -> dict:
    """Synthetic-exact reduction: plant a rational function with the sector's
    degree bounds, evaluate at L rational nodes in [1-Delta, 1], corrupt some
    values, and recover p(0) exactly with the Berlekamp-Welch decoder."""
    d1, d2 = degree_bounds(sector, n_quadruples)
    delta = Fraction(delta)
    nodes = [1 - delta + delta * Fraction(i, L - 1) for i in range(L)]
    func = _random_rational_function(d1, d2, nodes, rng)
    values = [func(x) for x in nodes]
    corrupted = sorted(rng.choice(L, size=corruptions, replace=False).tolist())
    for i in corrupted:
        values[i] += Fraction(1 + int(rng.integers(0, 5)), 3)
    points = list(zip(nodes, values))
    recovered = bw_rational_recover(points, d1, d2, t_budget)
    rec0 = recovered(Fraction(0))
    true0 = func(Fraction(0))
    return {
        "recovered_p0": rec0,
        "true_p0": true0,
        "abs_error": abs(rec0 - true0),
        "corruptions": corruptions,
        "exact_match": recovered == func,
    }


def reduction_demo_float(sector: str, n_quadruples: int, delta: float, L: int,
                         seed: int, x0: FockState | None = None,
                         dps: int = highprec.DPS) -> dict:
    """Physical-float reduction: evaluate p_x0 along the Cayley path, multiply
    by the shared circuit denominator, fit the degree-d1 polynomial on the
    equispaced nodes in [1-Delta, 1], and extrapolate to theta = 0.

    Evaluations run in extended precision: the Paturi-style blow-up of the
    extrapolation makes double-precision node values useless at these degrees.
    """
    if n_quadruples != 1:
        raise ValueError("the desk-scale demo is sized for N = 1")
    rng = np.random.default_rng(seed)
    d1, _ = degree_bounds(sector, n_quadruples)
    if x0 is None:
        x0 = default_outcome(sector, n_quadruples)
    d = 4 * n_quadruples
    with mp.workdps(dps):
        if sector == PASSIVE:
            group, dim, power = UNITARY, d, 2 * n_quadruples
            g0 = haar_unitary(dim, rng)
            g = haar_unitary(dim, rng)
            prob = highprec.mp_passive_magic_probability
        else:
            group, dim, power = ORTHOGONAL, 2 * d, 4 * n_quadruples
            g0 = haar_special_orthogonal(dim, rng)
            g = haar_special_orthogonal(dim, rng)
            prob = highprec.mp_active_magic_probability
        g0_mp = highprec.to_mp_matrix(g0)
        x_mp = highprec.mp_inverse_cayley(highprec.to_mp_matrix(g), group)
        thetas = np.linspace(1.0 - delta, 1.0, L)
        dvals = []
        for theta in thetas:
            gt = highprec.mp_deform_path(g0_mp, x_mp, theta)
            p = prob(gt, x0, n_quadruples)
            q = highprec.mp_q_value(x_mp, theta, group, power)
            dvals.append(p * q)
        fit, node_resid = highprec.fit_polynomial(thetas, dvals, d1, dps=dps)
        recovered = float(fit(0.0))  # Q(0) = 1
        true0 = float(prob(g0_mp, x0, n_quadruples))
    return {
        "recovered_p0": recovered,
        "true_p0": true0,
        "abs_error": abs(recovered - true0),
        "node_residual": node_resid,
        "nodes": L,
        "delta": delta,
    }
