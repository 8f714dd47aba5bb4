"""Extended-precision (mpmath) evaluation of output probabilities along the
Cayley path, and least-squares polynomial fitting in a well-conditioned basis.

The rational-path structure p(theta) * Q(theta) = polynomial holds as an exact
algebraic identity in the *stored* matrices once the generator is exactly
(skew-)symmetrized, so evaluating at 50+ significant digits makes the
extrapolation to theta = 0 limited only by working precision, not by the
float64 representation of the inputs.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np

from .amplitudes import fock_projector_monomials, magic_state_monomials
from .fock import FockState, magic_input_expansion
from .linalg import UNITARY

DPS = 60


def to_mp_matrix(m: np.ndarray) -> mp.matrix:
    m = np.asarray(m)
    out = mp.matrix(m.shape[0], m.shape[1])
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            v = m[i, j]
            out[i, j] = mp.mpc(float(np.real(v)), float(np.imag(v)))
    return out


def mp_inverse_cayley(g: mp.matrix, group: str) -> mp.matrix:
    """(I - g)(I + g)^-1, exactly (skew-)symmetrized in the stored precision."""
    n = g.rows
    x = (mp.eye(n) - g) * (mp.eye(n) + g) ** -1
    xt = x.T
    if group == UNITARY:
        xt = xt.apply(mp.conj)
    return (x - xt) * mp.mpf("0.5")


def mp_deform_path(g0: mp.matrix, x: mp.matrix, theta) -> mp.matrix:
    """g0 (I - theta X)(I + theta X)^-1 for the exact stored generator X."""
    n = x.rows
    t = mp.mpf(theta)
    return g0 * (mp.eye(n) - t * x) * (mp.eye(n) + t * x) ** -1


def mp_q_value(x: mp.matrix, theta, group: str, power: int):
    """det(I + theta X)-based circuit denominator: |det|^(2 power) for the
    unitary group, det^power for the orthogonal group."""
    n = x.rows
    t = mp.mpf(theta)
    det = mp.det(mp.eye(n) + t * x)
    if group == UNITARY:
        return (det * mp.conj(det)).real ** power
    return det.real ** power


def mp_passive_magic_probability(u: mp.matrix, x: FockState, n_quad: int):
    """|<x| pi_pas(U) |psi_in>|^2 with mpmath submatrix determinants."""
    rows = [j - 1 for j in x.occupied_modes()]
    total = mp.mpc(0)
    coeff = mp.power(mp.mpf(2), -mp.mpf(n_quad) / 2)
    for subset, _ in magic_input_expansion(n_quad):
        cols = [j - 1 for j in subset]
        sub = mp.matrix(len(rows), len(cols))
        for i, r in enumerate(rows):
            for j, c in enumerate(cols):
                sub[i, j] = u[r, c]
        total += coeff * mp.det(sub)
    return (total * mp.conj(total)).real


def mp_active_magic_probability(o: mp.matrix, x: FockState, n_quad: int):
    """p_x via the Majorana-monomial expansion with mpmath determinants."""
    d = 4 * n_quad
    v_coeffs = fock_projector_monomials(x)
    w_coeffs = magic_state_monomials(n_quad)
    total = mp.mpc(0)
    for b_set, w in w_coeffs.items():
        cols = [j - 1 for j in b_set]
        wb = mp.mpc(w.real, w.imag)
        for a_set, v in v_coeffs.items():
            if len(a_set) != len(b_set):
                continue
            if a_set:
                rows = [i - 1 for i in a_set]
                sub = mp.matrix(len(rows), len(cols))
                for i, r in enumerate(rows):
                    for j, c in enumerate(cols):
                        sub[i, j] = o[r, c]
                det = mp.det(sub)
            else:
                det = mp.mpf(1)
            k = len(a_set)
            sign = -1 if (k * (k - 1) // 2) % 2 else 1
            total += wb * mp.mpc(v.real, v.imag) * sign * det
    return (mp.mpf(2) ** d * total).real


def fit_polynomial(thetas, values, degree: int, dps: int = DPS):
    """Least-squares polynomial fit in a Chebyshev basis scaled to the nodes.

    Returns a callable evaluator and the maximum residual on the nodes. All
    arithmetic runs at ``dps`` significant digits (>= 128-bit significands).
    """
    with mp.workdps(dps):
        ts = [mp.mpf(t) for t in thetas]
        ys = [mp.mpf(v) for v in values]
        lo, hi = min(ts), max(ts)
        mid = (lo + hi) / 2
        half = (hi - lo) / 2 if hi > lo else mp.mpf(1)

        def basis_row(t):
            u = (t - mid) / half
            row = [mp.mpf(1)]
            if degree >= 1:
                row.append(u)
            for k in range(2, degree + 1):
                row.append(2 * u * row[-1] - row[-2])
            return row

        a = mp.matrix([basis_row(t) for t in ts])
        y = mp.matrix(ys)
        at = a.T
        coeffs = mp.lu_solve(at * a, at * y)

        def evaluate(t):
            with mp.workdps(dps):
                row = basis_row(mp.mpf(t))
                return mp.fsum(c * b for c, b in zip(coeffs, row))

        max_resid = max(abs(evaluate(t) - yv) for t, yv in zip(ts, ys))
        return evaluate, float(max_resid)
