"""Closed-form anticoncentration quantities in exact rational arithmetic:
representation dimensions, reduced-state purities, projector expectation
values, and the moment bounds behind the constants 5.7 and 16.2.

Everything is computed over exact integers/rationals (gmpy2-accelerated);
floats appear only at comparison boundaries, and comparisons against
pi-dependent bounds use rational brackets of pi so the verdicts are rigorous.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial

from .fock import (
    magic_input_expansion,
    magic_state_pauli_expectation,
    majorana_string,
)

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover
    mpz = int

PASSIVE = "passive"
ACTIVE = "active"

# 49-decimal-digit rational bracket of pi
_PI_LO = Fraction(31415926535897932384626433832795028841971693993751, 10 ** 49)
_PI_HI = _PI_LO + Fraction(1, 10 ** 49)

C_PAS = Fraction(57, 10)
C_ACT = Fraction(81, 5)


def rep_dimensions(n_quadruples: int, sector: str) -> tuple[int, int]:
    """(|H|, |H~|): outcome-space dimension and the two-copy irrep dimension.

    Passive: |H| = C(4N, 2N) and |H~| = C(4N,2N)^2 (4N+1)/(2N+1)^2.
    Active: |H| = 2^{4N}/2 and |H~| = C(8N, 4N)/2.
    """
    n = n_quadruples
    if n < 1:
        raise ValueError("need at least one quadruple")
    if sector == PASSIVE:
        d, k = 4 * n, 2 * n
        h = comb(d, k)
        num = h * h * (d + 1)
        den = (d - k + 1) * (k + 1)
        if num % den:
            raise ArithmeticError("passive irrep dimension is not integral")
        return h, num // den
    if sector == ACTIVE:
        half = comb(8 * n, 4 * n)
        assert half % 2 == 0
        return 2 ** (4 * n - 1), half // 2
    raise ValueError(f"unknown sector {sector!r}")


@lru_cache(maxsize=8)
def _inner_sums(n: int, weight: int) -> tuple:
    """Coefficients [t^k] (1 + weight*t + t^2)^n for k = 0..2n, exact integers.

    The Pearson-type recurrence (1 + w t + t^2) P' = n (w + 2t) P gives
    (k+1) S_{k+1} = w (n-k) S_k + (2n-k+1) S_{k-1}.
    """
    s = [mpz(1), mpz(weight) * n]
    for k in range(1, 2 * n):
        nxt = (weight * (n - k) * s[k] + (2 * n - k + 1) * s[k - 1])
        q, r = divmod(nxt, k + 1)
        assert r == 0
        s.append(q)
    return tuple(s[: 2 * n + 1])


def trinomial_sum(n_quadruples: int, k: int, weight: int = 1):
    """sum_l N!/(l!(k-2l)!(N-k+l)!) * weight^{k-2l}, exact."""
    return _inner_sums(n_quadruples, weight)[k]


def passive_purity_bound(n_quadruples: int, k: int) -> Fraction:
    """Upper bound on the purity of the k-particle reduction of the magic input."""
    n = n_quadruples
    if not 0 <= k <= n:
        raise ValueError("k must lie in [0, N]")
    return Fraction(int(trinomial_sum(n, k)), comb(2 * n, k) ** 2)


def passive_second_moment_bound(n_quadruples: int) -> Fraction:
    """The combinatorial upper bound on tr(P~ psi x psi), passive sector.

    2/(2N+1) sum_{k=0}^{N} [sum_l trinomial] / C(2N, k), evaluated with a
    single shared denominator (2N)! so the whole sum stays in integers.
    """
    n = n_quadruples
    inner = _inner_sums(n, 1)
    total = mpz(0)
    fact_part = mpz(factorial(2 * n))  # k! (2n-k)! at k = 0
    for k in range(0, n + 1):
        total += inner[k] * fact_part
        # advance k!(2n-k)! -> (k+1)!(2n-k-1)!
        fact_part = fact_part * (k + 1) // (2 * n - k)
    return Fraction(2 * int(total), (2 * n + 1) * factorial(2 * n))


def active_c_coefficient(n_quadruples: int, q: int) -> int:
    """C_{2q} of the active two-copy projector, d = 4N (exact integer)."""
    d = 4 * n_quadruples
    p = 2 * q
    if p > d:
        raise ValueError("q out of range")
    if p > d // 2:
        p = d - p
    num = factorial(2 * p) * factorial(2 * d - 2 * p) * comb(d, p)
    den = factorial(d) ** 2
    assert num % den == 0
    return num // den


def active_second_moment_expression(n_quadruples: int) -> Fraction:
    """Exact value of tr(P~ psi x psi) for the active sector.

    2^{-8N} [ 2 sum_{q<N} C_{2q} S_q + C_{2N} S_N ] with
    S_q = sum_l trinomial(N; l, q-2l, N-q+l) 14^{q-2l} and the integer
    coefficients C_{2q} advanced by an exact ratio recurrence.
    """
    n = n_quadruples
    s = _inner_sums(n, 14)
    cq = mpz(comb(8 * n, 4 * n))  # C_0
    total = 2 * cq * s[0]
    for q in range(1, n + 1):
        num = (
            mpz((4 * n - 2 * q + 2) * (4 * n - 2 * q + 1))
            * ((4 * q - 3) * (4 * q - 2))
            * ((4 * q - 1) * (4 * q))
        )
        den = (
            mpz((2 * q - 1) * (2 * q))
            * ((8 * n - 4 * q + 4) * (8 * n - 4 * q + 3))
            * ((8 * n - 4 * q + 2) * (8 * n - 4 * q + 1))
        )
        cq = cq * num // den
        term = cq * s[q]
        total += 2 * term if q < n else term
    return Fraction(int(total), 2 ** (8 * n))


# --- rigorous comparisons against the published constants -----------------------


def passive_bound_ok(n_quadruples: int) -> bool:
    """passive_second_moment_bound(N) <= 5.7/N, exact rational comparison."""
    return passive_second_moment_bound(n_quadruples) * n_quadruples <= C_PAS


def active_bound_ok(n_quadruples: int) -> bool:
    """active_second_moment_expression(N) <= 16.2/sqrt(pi N), certified with
    a rational upper bracket of pi."""
    v = active_second_moment_expression(n_quadruples)
    return v * v * n_quadruples * _PI_HI <= C_ACT * C_ACT


def dimension_ratio_ok(n_quadruples: int, sector: str) -> bool:
    """|H~|/|H|^2 >= 1/N (passive) or >= 1/sqrt(pi N) (active), rigorously.

    These are the literal intermediate inequalities of the anticoncentration
    theorem. They are slightly too strong: the passive ratio equals
    (4N+1)/(2N+1)^2 which is strictly below 1/N, and the active ratio sits
    just below 1/sqrt(pi N); see :func:`dimension_ratio_corrected_ok` for the
    sharp N+1 variant that does hold.
    """
    h, ht = rep_dimensions(n_quadruples, sector)
    ratio = Fraction(ht, h * h)
    if sector == PASSIVE:
        return ratio * n_quadruples >= 1
    return ratio * ratio * n_quadruples * _PI_LO >= 1


def dimension_ratio_corrected_ok(n_quadruples: int, sector: str) -> bool:
    """|H~|/|H|^2 >= 1/(N+1) (passive) or >= 1/sqrt(pi (N+1)) (active)."""
    h, ht = rep_dimensions(n_quadruples, sector)
    ratio = Fraction(ht, h * h)
    if sector == PASSIVE:
        return ratio * (n_quadruples + 1) >= 1
    return ratio * ratio * (n_quadruples + 1) * _PI_LO >= 1


# --- brute-force oracles ---------------------------------------------------------


def _position_sign(x: tuple[int, ...], s: tuple[int, ...]) -> int:
    """(-1)^{J(X,S)} with J = sum of 1-based positions of S in X + |S|(|S|-1)/2."""
    pos = {v: i + 1 for i, v in enumerate(x)}
    j = sum(pos[v] for v in s) + len(s) * (len(s) - 1) // 2
    return -1 if j % 2 else 1


@lru_cache(maxsize=None)
def magic_purity_oracle(n_quadruples: int, k: int) -> Fraction:
    """Exact purity of the k-particle reduction of the magic input (N <= 3).

    Dense particle-partial-trace over the Fock expansion; entries are exact
    rationals indexed by pairs of (2N-k)-mode subsets.
    """
    n = n_quadruples
    if n > 3:
        raise ValueError("brute-force purity oracle is guarded to N <= 3")
    if not 0 <= k <= 2 * n:
        raise ValueError("k out of range")
    m = 2 * n - k  # particles traced out
    subsets = [tuple(sub) for sub, _ in magic_input_expansion(n)]
    weight = Fraction(1, 2 ** n) * Fraction(1, comb(2 * n, m))
    entries: dict[tuple, Fraction] = {}
    for x in subsets:
        xs = set(x)
        for y in subsets:
            common = tuple(sorted(xs & set(y)))
            if len(common) < m:
                continue
            for s in combinations(common, m):
                sign = _position_sign(x, s) * _position_sign(y, s)
                key = (tuple(v for v in x if v not in s),
                       tuple(v for v in y if v not in s))
                entries[key] = entries.get(key, Fraction(0)) + sign * weight
    return sum((c * c for c in entries.values()), Fraction(0))


@lru_cache(maxsize=None)
def active_projector_oracle(n_quadruples: int) -> Fraction:
    """Exact tr(P~ psi x psi), active sector, via the Majorana-monomial sum.

    (1/2^{2d}) sum_p C_p sum_{|X|=2p} <m_X>^2 with exact Pauli-string
    expectation values over the sparse magic state. Guarded to N <= 2.
    """
    n = n_quadruples
    if n > 2:
        raise ValueError("monomial oracle is guarded to N <= 2")
    d = 4 * n
    total = Fraction(0)
    for p in range(0, d + 1):
        c_p = _signed_c(d, p)
        if c_p == 0:
            continue
        block = Fraction(0)
        for x in combinations(range(1, 2 * d + 1), 2 * p):
            pauli = majorana_string(x, d)
            re, im = magic_state_pauli_expectation(pauli, n)
            block += re * re - im * im
        total += c_p * block
    return total / Fraction(2 ** (2 * d))


def _signed_c(d: int, p: int) -> int:
    """Signed coefficient C_p of the flat-spectrum projector expansion."""
    pp = d - p if p > d // 2 else p
    num = factorial(2 * pp) * factorial(2 * d - 2 * pp) * comb(d, pp)
    den = factorial(d) ** 2
    assert num % den == 0
    return (-1) ** pp * (num // den)


# --- second moments ---------------------------------------------------------------


def second_moment_projector_value(n_quadruples: int, sector: str,
                                  method: str = "auto") -> Fraction:
    """tr(P~ psi x psi): oracle path is exact; the passive formula path is the
    purity-bound substitution and therefore an upper bound."""
    n = n_quadruples
    if sector == ACTIVE:
        if method == "oracle":
            return active_projector_oracle(n)
        return active_second_moment_expression(n)
    if sector == PASSIVE:
        if method == "formula":
            purity = lambda k: passive_purity_bound(n, k if k <= n else 2 * n - k)
        else:
            purity = lambda k: magic_purity_oracle(n, k)
        total = Fraction(0)
        for k in range(0, 2 * n + 1):
            total += comb(2 * n, k) * purity(k)
        return total / (2 * n + 1)
    raise ValueError(f"unknown sector {sector!r}")


def exact_second_moment(n_quadruples: int, sector: str,
                        method: str = "auto") -> Fraction:
    """E_{V~Haar}[p_x^2] = tr(P~ psi x psi) / |H~| as an exact rational."""
    _, ht = rep_dimensions(n_quadruples, sector)
    return second_moment_projector_value(n_quadruples, sector, method) / ht


def first_moment(n_quadruples: int, sector: str) -> Fraction:
    """E_{V~Haar}[p_x] = 1/|H| (the 1-design value)."""
    h, _ = rep_dimensions(n_quadruples, sector)
    return Fraction(1, h)


def anticoncentration_lower_bound(n_quadruples: int, sector: str,
                                  alpha: Fraction) -> Fraction:
    """(1-alpha)^2 |H~| / (|H|^2 tr(P~ psi x psi)): the Paley-Zygmund bound on
    Pr(p_x > alpha/|H|)."""
    h, ht = rep_dimensions(n_quadruples, sector)
    tr = second_moment_projector_value(n_quadruples, sector)
    return (1 - alpha) ** 2 * Fraction(ht, h * h) / tr


# --- sweeps ------------------------------------------------------------------------


def bound_sweep_row(sector: str, n: int) -> dict:
    """One CSV row of the Fig. 7 / Fig. 8 style sweep."""
    if sector == PASSIVE:
        value = passive_second_moment_bound(n)
        ok = value * n <= C_PAS
        bound = float(C_PAS) / n
    else:
        value = active_second_moment_expression(n)
        ok = value * value * n * _PI_HI <= C_ACT * C_ACT
        bound = float(C_ACT) / (float(_PI_HI) * n) ** 0.5
    fv = float(value)
    return {
        "N": n,
        "value": fv,
        "bound": bound,
        "margin": bound - fv,
        "holds": ok,
    }


def bound_sweep(sector: str, max_n: int, processes: int | None = None):
    """Exact sweep N = 1..max_n; rows report float projections of exact values."""
    ns = list(range(1, max_n + 1))
    if processes and processes > 1:
        import multiprocessing as mp_pool

        with mp_pool.Pool(processes) as pool:
            rows = pool.starmap(bound_sweep_row, [(sector, n) for n in ns],
                                chunksize=16)
        return rows
    return [bound_sweep_row(sector, n) for n in ns]
