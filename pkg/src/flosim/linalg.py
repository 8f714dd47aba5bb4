"""Dense linear-algebra kernel: Haar sampling, Pfaffian, polar factor, spectra.

All routines are pure functions of their inputs plus an explicitly passed
``numpy.random.Generator``; tolerances are fixed module constants chosen for
double precision at desk scale (matrix dimension <= 32).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

UNITARY_TOL = 1e-12
GROUP_TOL = 1e-10
SKEW_TOL = 1e-12

UNITARY = "unitary"
ORTHOGONAL = "orthogonal"


class GroupMembershipError(ValueError):
    """Input matrix is not in the claimed matrix group within tolerance."""


class DimensionError(ValueError):
    """Input matrix has an unsupported shape."""


@dataclass(frozen=True)
class GroupElement:
    """A matrix tagged as living in U(d) or SO(2d).

    ``group`` is ``"unitary"`` or ``"orthogonal"``; membership is validated
    on construction to within ``tol`` (operator residuals).
    """

    group: str
    matrix: np.ndarray
    tol: float = GROUP_TOL

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {m.shape}")
        if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
            raise ValueError("matrix entries must be finite")
        if self.group == UNITARY:
            err = np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0]))
            if err > self.tol:
                raise GroupMembershipError(f"not unitary: residual {err:.3e}")
        elif self.group == ORTHOGONAL:
            if m.shape[0] % 2:
                raise DimensionError("orthogonal elements act on an even dimension")
            if np.iscomplexobj(m) and np.max(np.abs(m.imag)) > self.tol:
                raise GroupMembershipError("orthogonal element must be real")
            m = m.real
            err = np.linalg.norm(m.T @ m - np.eye(m.shape[0]))
            if err > self.tol:
                raise GroupMembershipError(f"not orthogonal: residual {err:.3e}")
            if abs(np.linalg.det(m) - 1.0) > 1e-8:
                raise GroupMembershipError("determinant is not +1")
        else:
            raise ValueError(f"unknown group tag {self.group!r}")
        object.__setattr__(self, "matrix", np.array(m, copy=True))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SpectralData:
    """Eigenphases and the conjugation bringing a group element to canonical form.

    ``element.matrix == diagonalizer^-1 @ canonical @ diagonalizer`` up to
    1e-10, where ``canonical`` is ``diag(exp(i*phases))`` for unitaries and a
    direct sum of 2x2 planar rotations by ``phases`` for special orthogonals.
    Phases are sorted ascending and lie in (-pi, pi].
    """

    group: str
    phases: np.ndarray
    diagonalizer: np.ndarray

    def canonical_matrix(self) -> np.ndarray:
        if self.group == UNITARY:
            return np.diag(np.exp(1j * self.phases))
        blocks = [rotation_block(phi) for phi in self.phases]
        return sla.block_diag(*blocks)

    def reconstruct(self) -> np.ndarray:
        h = self.diagonalizer
        return h.conj().T @ self.canonical_matrix() @ h


def rotation_block(phi: float) -> np.ndarray:
    """exp(phi * X) for the planar generator X = |2><1| - |1><2|."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of U(dim) via QR of a complex Ginibre matrix.

    The R-diagonal phase correction makes the QR map measure-preserving.
    """
    if dim < 1:
        raise DimensionError("dim must be >= 1")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_special_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of SO(dim), dim even.

    QR of a real Ginibre matrix with sign correction samples Haar O(dim);
    the det = -1 coset is mapped into SO(dim) by flipping the last column,
    which pushes Haar measure on the coset onto Haar measure on SO(dim).
    """
    if dim < 2 or dim % 2:
        raise DimensionError("dim must be a positive even integer")
    m = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(m)
    d = np.diag(r)
    q = q * np.sign(d)
    if np.linalg.det(q) < 0:
        q = q.copy()
        q[:, -1] *= -1
    return q


def check_skew_symmetric(a: np.ndarray, tol: float = SKEW_TOL) -> None:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("expected a square matrix")
    scale = max(np.linalg.norm(a), 1.0)
    if np.linalg.norm(a + a.T) > tol * scale:
        raise ValueError("matrix is not skew-symmetric within tolerance")


def pfaffian(a: np.ndarray) -> complex | float:
    """Pfaffian of an even-dimensional skew-symmetric matrix.

    Skew-symmetric tridiagonalization (Parlett-Reid) with partial pivoting;
    numerically stable, O(n^3), exact sign. Works for real or complex input.
    """
    a = np.asarray(a)
    check_skew_symmetric(a)
    n = a.shape[0]
    if n % 2:
        raise DimensionError("Pfaffian requires even dimension")
    if n == 0:
        return 1.0
    a = a.astype(complex if np.iscomplexobj(a) else float).copy()
    val = 1.0
    for k in range(0, n - 1, 2):
        pivot = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if pivot != k + 1:
            a[[k + 1, pivot], :] = a[[pivot, k + 1], :]
            a[:, [k + 1, pivot]] = a[:, [pivot, k + 1]]
            val = -val
        if a[k + 1, k] == 0.0:
            return 0.0
        val = val * a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col)
            a[k + 2:, k + 2:] -= np.outer(col, tau)
    return val


def polar_orthogonal_factor(m: np.ndarray) -> np.ndarray:
    """Orthogonal factor of the real polar decomposition, projected into SO.

    Q = U V^T from the SVD m = U S V^T minimizes ||m - Q P||. When det(Q) is
    -1 the sign of the singular direction with the smallest singular value is
    flipped, which is the minimal-perturbation way to land in SO (rank
    deficiencies resolve by the same tie-break).
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError("expected a square matrix")
    u, _, vt = np.linalg.svd(m)
    q = u @ vt
    if np.linalg.det(q) < 0:
        u = u.copy()
        u[:, -1] *= -1  # numpy sorts singular values descending; last is smallest
        q = u @ vt
    return q


def _pair_real_schur_phases(t: np.ndarray, z: np.ndarray, tol: float):
    """Extract rotation angles and a reordered orthogonal basis from a real Schur form."""
    n = t.shape[0]
    phases = []
    plus_cols = []
    minus_cols = []
    pair_cols = []
    i = 0
    while i < n:
        if i + 1 < n and abs(t[i + 1, i]) > tol:
            c = t[i, i]
            s = t[i + 1, i]
            phi = float(np.arctan2(s, c))
            pair_cols.append((phi, z[:, i].copy(), z[:, i + 1].copy()))
            i += 2
        else:
            if t[i, i] > 0:
                plus_cols.append(z[:, i].copy())
            else:
                minus_cols.append(z[:, i].copy())
            i += 1
    # det = +1 guarantees an even number of -1 eigenvalues; +1 count is even
    # too since the total dimension is even.
    for cols, phi in ((plus_cols, 0.0), (minus_cols, np.pi)):
        for j in range(0, len(cols), 2):
            pair_cols.append((phi, cols[j], cols[j + 1]))
    pair_cols.sort(key=lambda item: item[0])
    basis = []
    for phi, v1, v2 in pair_cols:
        phases.append(phi)
        basis.extend([v1, v2])
    return np.array(phases), np.column_stack(basis)


def spectral(g: GroupElement) -> SpectralData:
    """Diagonalize a unitary, or block-diagonalize a special orthogonal.

    Unitary case: Schur form of a normal matrix gives an orthonormal
    eigenbasis. Orthogonal case: real Schur form, with +1/-1 eigenvalues
    paired into 0- and pi-angle planar rotation blocks.
    """
    m = g.matrix
    if g.group == UNITARY:
        t, z = sla.schur(m.astype(complex), output="complex")
        phases = np.angle(np.diag(t))
        order = np.argsort(phases, kind="stable")
        phases = phases[order]
        z = z[:, order]
        return SpectralData(UNITARY, phases, z.conj().T)
    t, z = sla.schur(m, output="real")
    phases, basis = _pair_real_schur_phases(t, z, tol=1e-12)
    # enforce the sign convention of the rotation block: basis may give -phi
    for j, phi in enumerate(phases):
        v1 = basis[:, 2 * j]
        v2 = basis[:, 2 * j + 1]
        s_actual = float(v2 @ (m @ v1))
        if s_actual * np.sin(phi) < 0:
            basis[:, 2 * j + 1] = -v2
    order = np.argsort(phases, kind="stable")
    phases = phases[order]
    cols = []
    for j in order:
        cols.extend([basis[:, 2 * j], basis[:, 2 * j + 1]])
    h = np.column_stack(cols).T
    return SpectralData(ORTHOGONAL, phases, h)


def eigenphases(matrix: np.ndarray, group: str) -> np.ndarray:
    """Sorted generalized eigenphases: d values for U(d), d values for SO(2d)."""
    if group == UNITARY:
        return np.sort(np.angle(np.linalg.eigvals(matrix)))
    return spectral(GroupElement(ORTHOGONAL, matrix)).phases
