"""Dense complex linear algebra for small (d <= 64) matrices.

Matrices are plain ``numpy`` complex arrays. Products and Kronecker
products go straight to numpy; the spectral routines (Hermitian Jacobi
eigensolver, one-sided Jacobi SVD, unitary eigendecomposition) are
implemented here so that their tolerances are under our control.

Vectorization is row-major throughout: ``vec(rho)[i*d + j] == rho[i, j]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DimensionError, NotHermitianError, NotUnitaryError

Slot = Literal["first", "second"]

HERMITIAN_RTOL = 1e-10
JACOBI_OFF_RTOL = 1e-13
JACOBI_MAX_SWEEPS = 100
UNITARY_TOL = 1e-9
PHASE_CLUSTER_TOL = 1e-8
# eigenphases within this distance of -pi are snapped to +pi
PI_SNAP_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in ascending order with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m, *, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.size == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def _square(m, name: str = "matrix") -> np.ndarray:
    a = as_matrix(m, name=name)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def hermiticity_defect(h: np.ndarray) -> float:
    """Relative Frobenius distance from Hermiticity."""
    scale = max(np.linalg.norm(h), 1.0)
    return float(np.linalg.norm(h - h.conj().T) / scale)


def check_hermitian(h, tol: float = HERMITIAN_RTOL, name: str = "matrix") -> np.ndarray:
    a = _square(h, name)
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitianError(f"{name} is not Hermitian (relative defect {defect:.3e} > {tol:.1e})")
    return a


def unitarity_defect(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))


def check_unitary(u, tol: float = UNITARY_TOL, name: str = "matrix") -> np.ndarray:
    a = _square(u, name)
    defect = unitarity_defect(a)
    if defect > tol:
        raise NotUnitaryError(f"{name} is not unitary (defect {defect:.3e} > {tol:.1e})")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product with slot order (a, b)."""
    return np.kron(as_matrix(a, name="a"), as_matrix(b, name="b"))


def partial_trace(m, d_first: int, d_second: int, keep: Slot = "first") -> np.ndarray:
    """Trace out one factor of a (d_first*d_second)-square operator."""
    a = _square(m)
    n = d_first * d_second
    if a.shape[0] != n:
        raise DimensionError(f"operator is {a.shape[0]}-dimensional, expected {d_first}*{d_second}={n}")
    t = a.reshape(d_first, d_second, d_first, d_second)
    if keep == "first":
        return np.einsum("ikjk->ij", t)
    if keep == "second":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")


def reshuffle(m, d: int) -> np.ndarray:
    """Realignment ``out[(i,k),(j,l)] = in[(i,j),(k,l)]``; an involution."""
    a = _square(m)
    if a.shape[0] != d * d:
        raise DimensionError(f"reshuffle expects a {d * d}x{d * d} matrix, got {a.shape}")
    return a.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def realign(m, d_first: int, d_second: int) -> np.ndarray:
    """Rectangular realignment used for operator Schmidt decomposition.

    Maps an operator on first (x) second to a (d_first^2 x d_second^2) matrix
    whose rank is the operator Schmidt rank.
    """
    a = _square(m)
    if a.shape[0] != d_first * d_second:
        raise DimensionError(f"operator is {a.shape[0]}-dimensional, expected {d_first * d_second}")
    t = a.reshape(d_first, d_second, d_first, d_second)
    return t.transpose(0, 2, 1, 3).reshape(d_first * d_first, d_second * d_second)


def _jacobi_rotation(app: float, aqq: float, apq: complex):
    """Unitary 2x2 block that annihilates the (p, q) entry of a Hermitian pivot."""
    mag = abs(apq)
    phase = apq / mag
    tau = (aqq - app) / (2.0 * mag)
    t = np.copysign(1.0, tau) / (abs(tau) + np.hypot(1.0, tau))
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    ph = np.conj(phase)
    return np.array([[c, s], [-s * ph, c * ph]])


def eigh(h, tol: float = HERMITIAN_RTOL) -> Spectrum:
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Raises NotHermitianError when the relative asymmetry exceeds ``tol``.
    """
    a = check_hermitian(h, tol).copy()
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return Spectrum(np.real(np.diag(a)).copy(), v)
    threshold = JACOBI_OFF_RTOL * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                g = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], v[:, order])


def eigvalsh(h, tol: float = HERMITIAN_RTOL) -> np.ndarray:
    return eigh(h, tol).eigenvalues


def _complete_columns(u: np.ndarray, k: int) -> np.ndarray:
    """Replace columns k.. of ``u`` with an orthonormal completion of columns :k."""
    rows, cols = u.shape
    basis = [u[:, j] for j in range(k)]
    for e in np.eye(rows, dtype=complex):
        if len(basis) == cols:
            break
        w = e.copy()
        for _ in range(2):
            for b in basis:
                w -= np.vdot(b, w) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            basis.append(w / nrm)
    return np.column_stack(basis)


def svd(m, tol: float = 1e-15, max_sweeps: int = 60):
    """Thin SVD by one-sided (Hestenes) Jacobi.

    Returns ``(U, s, V)`` with ``m == U @ diag(s) @ V^H``, ``s`` descending.
    """
    a = as_matrix(m)
    rows, cols = a.shape
    if rows < cols:
        v, s, u = svd(a.conj().T, tol, max_sweeps)
        return u, s, v
    w = a.copy()
    v = np.eye(cols, dtype=complex)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                alpha = np.vdot(w[:, p], w[:, p]).real
                beta = np.vdot(w[:, q], w[:, q]).real
                gamma = np.vdot(w[:, p], w[:, q])
                g = abs(gamma)
                if g <= tol * np.sqrt(alpha * beta) or g < 1e-300:
                    continue
                rotated = True
                phase = np.conj(gamma) / g
                zeta = (beta - alpha) / (2.0 * g)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.array([[c, s], [-s * phase, c * phase]])
                idx = [p, q]
                w[:, idx] = w[:, idx] @ rot
                v[:, idx] = v[:, idx] @ rot
        if not rotated:
            break
    sig = np.linalg.norm(w, axis=0)
    order = np.argsort(-sig, kind="stable")
    sig, w, v = sig[order], w[:, order], v[:, order]
    cutoff = max(sig[0], 1e-300) * 1e-14 if sig.size else 0.0
    k = int(np.sum(sig > cutoff))
    u = np.zeros((rows, cols), dtype=complex)
    u[:, :k] = w[:, :k] / sig[:k]
    if k < cols:
        u = _complete_columns(u, k)
    return u, sig, v


def _unitary_eig(u):
    """Eigenphases in (-pi, pi] and eigenvectors of a unitary.

    Diagonalizes a generic Hermitian combination of the Hermitian and
    anti-Hermitian parts, then splits near-degenerate clusters using the
    Hermitian part alone. Vectors within a true degenerate cluster are
    re-orthonormalized.
    """
    herm = 0.5 * (u + u.conj().T)
    anti = -0.5j * (u - u.conj().T)
    mix = herm + (1.0 / np.sqrt(3.0)) * anti
    spec = eigh(mix, tol=1e-8)
    w, vecs = spec.eigenvalues, spec.eigenvectors.copy()
    n = len(w)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] < PHASE_CLUSTER_TOL:
            stop += 1
        if stop - start > 1:
            block = vecs[:, start:stop]
            inner = eigh(block.conj().T @ herm @ block, tol=1e-8)
            block = block @ inner.eigenvectors
            q, _ = np.linalg.qr(block)
            vecs[:, start:stop] = q
        start = stop
    vals = np.einsum("ij,ik,kj->j", vecs.conj(), u, vecs)
    phases = np.angle(vals)
    phases[phases <= -np.pi + PI_SNAP_TOL] = np.pi
    return phases, vecs


def unitary_exp(h, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` via its spectral decomposition."""
    spec = eigh(h)
    v = spec.eigenvectors
    return (v * np.exp(-1j * spec.eigenvalues * t)) @ v.conj().T


def logm_unitary(u) -> np.ndarray:
    """Hermitian ``H`` with ``exp(-i H) == u``, eigenvalues of ``H`` in (-pi, pi].

    A generator eigenvalue of exactly pi (unitary eigenvalue -1) is taken as +pi.
    """
    a = check_unitary(u)
    phases, v = _unitary_eig(a)
    gen = -phases
    gen[gen <= -np.pi + PI_SNAP_TOL] = np.pi
    h = (v * gen) @ v.conj().T
    return 0.5 * (h + h.conj().T)


def unitary_power(u, exponent: float, branch: str = "principal") -> np.ndarray:
    """Spectral power of a unitary on the chosen branch.

    The principal branch keeps eigenphases in (-pi, pi]; ``alternate``
    sends an eigenphase of exactly pi to -pi before scaling.
    """
    a = check_unitary(u)
    phases, v = _unitary_eig(a)
    if branch == "alternate":
        phases = np.where(np.abs(phases - np.pi) <= PI_SNAP_TOL, -np.pi, phases)
    elif branch != "principal":
        raise ValueError(f"unknown branch {branch!r}")
    return (v * np.exp(1j * phases * exponent)) @ v.conj().T


def lstsq_minnorm(coeff, rhs, rank_tol: float = 1e-12):
    """Minimum-norm least squares through a rank-revealing pseudo-inverse.

    Returns ``(solution, rank, residual)``; ``residual`` is the Frobenius
    norm of ``coeff @ solution - rhs``.
    """
    a = as_matrix(coeff, name="coeff")
    b = as_matrix(rhs, name="rhs")
    if a.shape[0] != b.shape[0]:
        raise DimensionError(f"coeff has {a.shape[0]} rows but rhs has {b.shape[0]}")
    u, s, v = svd(a)
    if s.size == 0 or s[0] == 0.0:
        x = np.zeros((a.shape[1], b.shape[1]), dtype=complex)
        return x, 0, float(np.linalg.norm(b))
    keep = s > rank_tol * s[0]
    rank = int(np.sum(keep))
    x = (v[:, keep] / s[keep]) @ (u[:, keep].conj().T @ b)
    residual = float(np.linalg.norm(a @ x - b))
    return x, rank, residual


def condition_number(m) -> float:
    _, s, _ = svd(_square(m))
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])
