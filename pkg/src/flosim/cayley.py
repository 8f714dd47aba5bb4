"""Cayley transform, path deformation, eigenphase change of variable,
denominator polynomials, deformed-measure sampling, and TVD checks.

The group parameter ``d`` follows the source convention: U(d) has d
eigenphases, SO(2d) has d planar-rotation phases; both TVD bounds read
d^2 * Delta / 2 in that parameter.
"""

from __future__ import annotations

import numpy as np

from .linalg import (
    ORTHOGONAL,
    UNITARY,
    GroupElement,
    check_skew_symmetric,
    eigenphases,
    haar_special_orthogonal,
    haar_unitary,
)

PHASE_EDGE_TOL = 1e-8


class SingularityError(ValueError):
    """Group element has an eigenvalue at -1: the inverse Cayley map is undefined."""


def cayley_transform(x: np.ndarray, group: str) -> GroupElement:
    """f(X) = (I - X)(I + X)^-1 from the Lie algebra into the group."""
    x = np.asarray(x)
    n = x.shape[0]
    if group == UNITARY:
        if np.linalg.norm(x + x.conj().T) > 1e-10 * max(1.0, np.linalg.norm(x)):
            raise ValueError("unitary case needs a skew-Hermitian generator")
    else:
        check_skew_symmetric(x, tol=1e-10)
        x = np.real(x)
    m = np.linalg.solve((np.eye(n) + x).T, (np.eye(n) - x).T).T
    return GroupElement(group, m)


def _phases_or_raise(g: GroupElement) -> np.ndarray:
    phases = eigenphases(g.matrix, g.group)
    if np.any(np.abs(np.abs(phases) - np.pi) < PHASE_EDGE_TOL):
        raise SingularityError("eigenphase within 1e-8 of +-pi")
    return phases


def inverse_cayley(g: GroupElement) -> np.ndarray:
    """f^-1(g) = (I - g)(I + g)^-1; raises on spectrum at -1 (measure zero)."""
    _phases_or_raise(g)
    m = g.matrix
    n = m.shape[0]
    x = np.linalg.solve((np.eye(n) + m).T, (np.eye(n) - m).T).T
    if g.group == ORTHOGONAL:
        x = np.real(x)
        x = (x - x.T) / 2  # exact antisymmetrization kills float residue
    else:
        x = (x - x.conj().T) / 2
    return x


def deform(g: GroupElement, theta: float) -> GroupElement:
    """F_theta(g) = ((1-t) I + (1+t) g) ((1+t) I + (1-t) g)^-1, t in [0, 1]."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    m = g.matrix
    n = m.shape[0]
    if theta == 0.0:
        eye = np.eye(n) if g.group == ORTHOGONAL else np.eye(n, dtype=complex)
        return GroupElement(g.group, eye)
    num = (1 - theta) * np.eye(n) + (1 + theta) * m
    den = (1 + theta) * np.eye(n) + (1 - theta) * m
    out = np.linalg.solve(den.T, num.T).T
    return GroupElement(g.group, out)


def deform_via_generator(g: GroupElement, theta: float) -> GroupElement:
    """F_theta(g) = f(theta f^-1(g)); spectral-consistency cross-check route."""
    x = inverse_cayley(g)
    return cayley_transform(theta * x, g.group)


def deform_path(g0: GroupElement, g: GroupElement, theta: float) -> GroupElement:
    """g_theta = g0 F_theta(g): rational interpolation from g0 (theta=0) to g0 g."""
    f = deform(g, theta)
    return GroupElement(g0.group, g0.matrix @ f.matrix)


def deformed_sample(g0: GroupElement, theta: float,
                    rng: np.random.Generator) -> GroupElement:
    """One draw of mu_G^theta: g0 F_theta(g) with g Haar."""
    if g0.group == UNITARY:
        g = GroupElement(UNITARY, haar_unitary(g0.dim, rng))
    else:
        g = GroupElement(ORTHOGONAL, haar_special_orthogonal(g0.dim, rng))
    return deform_path(g0, g, theta)


def change_of_variable(phi, theta: float):
    """Eigenphase map of the deformation: phi -> 2 atan(theta tan(phi/2))."""
    return 2.0 * np.arctan(theta * np.tan(np.asarray(phi) / 2.0))


# --- denominator polynomials ----------------------------------------------------


def q_polynomial(g: GroupElement, level="group") -> np.ndarray:
    """Coefficients (ascending) of the real denominator polynomial.

    Group level: prod_j (1 + theta^2 tan^2(phi_j/2)) over the d generalized
    eigenphases (|Q|^2 for the unitary group, Q itself for the orthogonal).
    Circuit level ("circuit", N): the same product raised to the power n = 2N
    (passive) or d = 4N (active), so the theta-degrees are 16 N^2 and 32 N^2.
    """
    phases = _phases_or_raise(g)
    t2 = np.tan(phases / 2.0) ** 2
    base = np.array([1.0])
    for v in t2:
        base = np.polynomial.polynomial.polymul(base, np.array([1.0, 0.0, v]))
    if level == "group":
        return base
    kind, n_quad = level
    if kind != "circuit":
        raise ValueError(f"unknown level {level!r}")
    if g.group == UNITARY:
        if g.dim != 4 * n_quad:
            raise ValueError("passive circuit level needs dim = 4N")
        power = 2 * n_quad
    else:
        if g.dim != 8 * n_quad:
            raise ValueError("active circuit level needs dim = 8N")
        power = 4 * n_quad
    out = np.array([1.0])
    for _ in range(power):
        out = np.polynomial.polynomial.polymul(out, base)
    return out


def q_value(g_or_x, theta, group: str, power: int = 1, generator: bool = False):
    """Pointwise denominator evaluation via det(I + theta X), X = f^-1(g).

    Returns |det|^2 raised to ``power`` for the unitary group and det^power
    for the orthogonal group; identical to evaluating :func:`q_polynomial`
    but numerically exact as a rational identity in the stored matrix.
    """
    x = g_or_x if generator else inverse_cayley(g_or_x)
    n = x.shape[0]
    det = np.linalg.det(np.eye(n) + np.asarray(theta) * x)
    if group == UNITARY:
        return float(abs(det) ** 2) ** power
    return float(np.real(det)) ** power


def polynomial_value(coeffs: np.ndarray, theta) -> np.ndarray:
    return np.polynomial.polynomial.polyval(theta, coeffs)


def q_lower_bound_frequency(group: str, dim: int, delta_tilde: float, theta: float,
                            samples: int, rng: np.random.Generator) -> dict:
    """Empirical frequency of |Q_g(theta)|^2 <= [1 + (theta pi/delta~)^2]^d
    against the 1 - d delta~/pi lower bound (d = number of phases)."""
    n_phases = dim if group == UNITARY else dim // 2
    cap = (1.0 + (theta * np.pi / delta_tilde) ** 2) ** n_phases
    hits = 0
    for _ in range(samples):
        m = haar_unitary(dim, rng) if group == UNITARY else haar_special_orthogonal(dim, rng)
        g = GroupElement(group, m)
        try:
            val = q_value(g, theta, group)
        except SingularityError:
            continue
        if val <= cap:
            hits += 1
    freq = hits / samples
    lower = 1.0 - n_phases * delta_tilde / np.pi
    return {"frequency": freq, "lower_bound": lower,
            "stderr": float(np.sqrt(max(freq * (1 - freq), 1e-12) / samples))}


# --- total variation distance ----------------------------------------------------


def _weyl_density(group: str, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    if group == UNITARY:
        return 2.0 - 2.0 * np.cos(p1 - p2)
    return (np.cos(p1) - np.cos(p2)) ** 2


def tvd_exact_d2(group: str, delta: float, grid: int = 1200) -> float:
    """TVD between the Haar measure and its theta = 1 - Delta deformation for
    two-phase groups (U(2), SO(4)), by quadrature of the Weyl densities."""
    theta = 1.0 - delta
    if theta <= 0.0:
        raise ValueError("need Delta < 1")
    edges = np.linspace(-np.pi, np.pi, grid + 1)
    mids = (edges[:-1] + edges[1:]) / 2.0
    p1, p2 = np.meshgrid(mids, mids, indexing="ij")
    base = _weyl_density(group, p1, p2)
    base /= base.sum()
    # pull the deformed measure back: phi(psi) = 2 atan(tan(psi/2)/theta)
    tan_half = np.tan(mids / 2.0)
    phi = 2.0 * np.arctan(tan_half / theta)
    jac = theta * (1.0 + tan_half ** 2) / (theta ** 2 + tan_half ** 2)
    f1, f2 = np.meshgrid(phi, phi, indexing="ij")
    j1, j2 = np.meshgrid(jac, jac, indexing="ij")
    deformed = _weyl_density(group, f1, f2) * j1 * j2
    deformed /= deformed.sum()
    return float(0.5 * np.abs(base - deformed).sum())


def tvd_empirical(group: str, dim: int, delta: float, samples: int,
                  rng: np.random.Generator, bins: int = 200) -> dict:
    """Pooled-eigenphase marginal TVD estimate between Haar and deformed draws.

    A per-coordinate histogram estimate: conservative as a marginal proxy and
    reported as an estimate, not a certificate.
    """
    theta = 1.0 - delta
    haar_phases = []
    def_phases = []
    for _ in range(samples):
        m = haar_unitary(dim, rng) if group == UNITARY else haar_special_orthogonal(dim, rng)
        haar_phases.append(eigenphases(m, group))
        m2 = haar_unitary(dim, rng) if group == UNITARY else haar_special_orthogonal(dim, rng)
        g2 = GroupElement(group, m2)
        def_phases.append(eigenphases(deform(g2, theta).matrix, group))
    a = np.concatenate(haar_phases)
    b = np.concatenate(def_phases)
    edges = np.linspace(-np.pi, np.pi, bins + 1)
    ha, _ = np.histogram(a, bins=edges)
    hb, _ = np.histogram(b, bins=edges)
    est = 0.5 * np.abs(ha / ha.sum() - hb / hb.sum()).sum()
    slack = float(np.sqrt(bins / min(ha.sum(), hb.sum())))
    return {"estimate": float(est), "slack": slack}


def tvd_check(group: str, d: int, delta: float, samples: int,
              rng: np.random.Generator) -> dict:
    """TVD estimate plus the d^2 Delta/2 certificate bound.

    ``d`` counts generalized eigenphases: U(d) has matrix dimension d, the
    orthogonal case SO(2d) has matrix dimension 2d. For d = 2 the estimate is
    the exact-density quadrature; otherwise a pooled empirical histogram.
    """
    bound = d * d * delta / 2.0
    dim = d if group == UNITARY else 2 * d
    if d == 2:
        est = tvd_exact_d2(group, delta)
        return {"estimate": est, "bound": bound, "method": "exact", "slack": 0.0}
    out = tvd_empirical(group, dim, delta, samples, rng)
    out.update({"bound": bound, "method": "empirical"})
    return out
