"""Reduced dynamical maps: Kraus operators from dilations, A-matrices,
Choi matrices, CP/TP verdicts, inversion and family inference.

An A-matrix acts on row-major vectorized density matrices,
``vec(rho') = A @ vec(rho)``; its reshuffle is the (unnormalized) Choi
matrix, whose trace is ``d_S`` for trace-preserving maps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import tensor_core as tc
from .errors import DimensionError, IncompleteKraus, SingularMap
from .unitaries import GateConvention

COND_LIMIT = 1e12
CP_TOL = 1e-8
KRAUS_TOL = 1e-9
CHOI_HERM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class AMatrix:
    matrix: np.ndarray
    d_s: int

    def __post_init__(self):
        m = tc.as_matrix(self.matrix, name="A-matrix")
        if m.shape != (self.d_s**2, self.d_s**2):
            raise DimensionError(f"A-matrix for d_S={self.d_s} must be {self.d_s**2}-square, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return (self.matrix @ rho.reshape(-1)).reshape(self.d_s, self.d_s)

    def __matmul__(self, other: "AMatrix") -> "AMatrix":
        return AMatrix(self.matrix @ other.matrix, self.d_s)

    def to_dict(self) -> dict:
        return matrix_record(self.matrix, self.d_s)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    matrix: np.ndarray
    d_s: int

    def to_dict(self) -> dict:
        return matrix_record(self.matrix, self.d_s)


@dataclass(frozen=True, eq=False)
class KrausSet:
    operators: tuple

    def __post_init__(self):
        ops = tuple(tc.as_matrix(k, name="Kraus operator") for k in self.operators)
        if not ops:
            raise IncompleteKraus("empty Kraus set")
        object.__setattr__(self, "operators", ops)

    @property
    def d_s(self) -> int:
        return self.operators[0].shape[1]

    def completeness_defect(self) -> float:
        total = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(self.d_s))))

    def compose(self, first: "KrausSet") -> "KrausSet":
        """Kraus set of ``self`` applied after ``first``."""
        return KrausSet(tuple(a @ b for a in self.operators for b in first.operators))


@dataclass(frozen=True, eq=False)
class CPVerdict:
    verdict: str
    min_eigenvalue: float
    spectrum: np.ndarray = field(repr=False)

    @property
    def is_cp(self) -> bool:
        return self.verdict == "CP"


def matrix_record(m: np.ndarray, d_s: int) -> dict:
    return {"d_S": d_s, "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_record(record: dict) -> tuple[np.ndarray, int]:
    m = np.asarray(record["re"], dtype=float) + 1j * np.asarray(record["im"], dtype=float)
    return m, int(record["d_S"])


def a_to_json(a: AMatrix) -> str:
    return json.dumps(a.to_dict())


def a_from_json(text: str) -> AMatrix:
    m, d = matrix_from_record(json.loads(text))
    return AMatrix(m, d)


# -- construction ------------------------------------------------------------

def _env_slot(conv) -> str:
    if isinstance(conv, GateConvention):
        return conv.env_slot
    if conv in ("first", "second"):
        return conv
    raise ValueError(f"expected a GateConvention or an environment slot name, got {conv!r}")


def kraus_from_dilation(u, chi_env, conv, d_env: int | None = None) -> KrausSet:
    """``K_mu = <mu|_E u |chi>_E``.

    ``conv`` is a GateConvention (its ``env_slot`` is used) or directly the
    environment slot name, ``"first"`` or ``"second"``.
    """
    u = tc.check_unitary(u, name="joint unitary")
    chi = np.asarray(chi_env, dtype=complex).reshape(-1)
    d_e = chi.size if d_env is None else d_env
    if chi.size != d_e:
        raise DimensionError("environment state dimension mismatch")
    if abs(np.linalg.norm(chi) - 1.0) > 1e-10:
        raise ValueError("environment state is not normalized")
    n = u.shape[0]
    if n % d_e:
        raise DimensionError(f"joint dimension {n} not divisible by environment dimension {d_e}")
    d_s = n // d_e
    if _env_slot(conv) == "second":
        t = u.reshape(d_s, d_e, d_s, d_e)
        contracted = np.einsum("aebf,f->eab", t, chi)
    else:
        t = u.reshape(d_e, d_s, d_e, d_s)
        contracted = np.einsum("eafb,f->eab", t, chi)
    return KrausSet(tuple(contracted[mu] for mu in range(d_e)))


def a_from_kraus(k: KrausSet, tol: float = KRAUS_TOL) -> AMatrix:
    """``A = sum_mu K_mu (x) conj(K_mu)``."""
    defect = k.completeness_defect()
    if defect > tol:
        raise IncompleteKraus(f"Kraus completeness defect {defect:.3e} > {tol:.1e}")
    a = sum(np.kron(op, op.conj()) for op in k.operators)
    return AMatrix(a, k.d_s)


def a_from_unitary(u, chi_env, conv) -> AMatrix:
    return a_from_kraus(kraus_from_dilation(u, chi_env, conv))


def choi_from_a(a: AMatrix) -> ChoiMatrix:
    return ChoiMatrix(tc.reshuffle(a.matrix, a.d_s), a.d_s)


def a_from_choi(b: ChoiMatrix) -> AMatrix:
    return AMatrix(tc.reshuffle(b.matrix, b.d_s), b.d_s)


# -- verdicts ----------------------------------------------------------------

def cp_check(b: ChoiMatrix, tol: float = CP_TOL) -> CPVerdict:
    """CP iff the smallest Choi eigenvalue is >= -tol * max(1, ||B||_2)."""
    spec = tc.eigh(b.matrix, tol=CHOI_HERM_TOL)
    w = spec.eigenvalues
    norm2 = float(np.max(np.abs(w)))
    verdict = "CP" if w[0] >= -tol * max(1.0, norm2) else "NCP"
    return CPVerdict(verdict, float(w[0]), w)


def verdict_from_spectrum(eigenvalues: Sequence[float], tol: float = CP_TOL) -> str:
    w = np.asarray(eigenvalues, dtype=float)
    return "CP" if w.min() >= -tol * max(1.0, float(np.max(np.abs(w)))) else "NCP"


def tp_check(a: AMatrix, tol: float = 1e-9) -> bool:
    """Trace preservation: ``sum_i A[(i,i),(k,l)] == delta_kl``."""
    d = a.d_s
    t = a.matrix.reshape(d, d, d, d)
    traced = np.einsum("iikl->kl", t)
    return bool(np.max(np.abs(traced - np.eye(d))) <= tol)


def herm_check(a: AMatrix, tol: float = 1e-9) -> bool:
    """Hermiticity preservation: ``A[(i,j),(k,l)] == conj(A[(j,i),(l,k)])``."""
    d = a.d_s
    t = a.matrix.reshape(d, d, d, d)
    return bool(np.max(np.abs(t - t.transpose(1, 0, 3, 2).conj())) <= tol)


# -- inversion and intermediate maps ----------------------------------------

def invert_a(a: AMatrix, cond_limit: float = COND_LIMIT) -> AMatrix:
    cond = tc.condition_number(a.matrix)
    if not cond <= cond_limit:
        raise SingularMap(
            f"dynamical map is not invertible (condition number {cond:.3e} > {cond_limit:.1e}); "
            "the first-leg joint state is maximally entangled or the map collapses a direction",
            condition=cond,
        )
    inv = np.linalg.solve(a.matrix, np.eye(a.matrix.shape[0]))
    return AMatrix(inv, a.d_s)


def intermediate_a(a_total: AMatrix, a_first: AMatrix, cond_limit: float = COND_LIMIT) -> AMatrix:
    """``a_total @ inverse(a_first)``."""
    return a_total @ invert_a(a_first, cond_limit)


def intermediate_map(u2, u1, chi_env, conv, cond_limit: float = COND_LIMIT) -> AMatrix:
    """Map induced on the system by applying ``u2`` to ``u1 (rho_S (x) chi)``.

    This is ``A(u2 u1, chi) A(u1, chi)^-1``; for ``u1 = 1`` it is the
    ordinary Kraus map of ``u2``.
    """
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.asarray(u2, dtype=complex)
    a_first = a_from_unitary(u1, chi_env, conv)
    a_total = a_from_unitary(u2 @ u1, chi_env, conv)
    return intermediate_a(a_total, a_first, cond_limit)


# -- family inference --------------------------------------------------------

@dataclass(frozen=True)
class FamilyDiagnostics:
    rank: int
    residual: float
    unique: bool
    n_pairs: int


def infer_a_from_family(pairs, enforce_tp: bool = True, rank_tol: float = 1e-10):
    """Least-squares A-matrix from ``(rho_in, rho_out)`` pairs.

    Unknowns are the entries of A in row-major order. Each pair gives the
    equations ``(1 (x) vec(rho_in)^T) vec(A) = vec(rho_out)``; trace
    preservation adds ``(vec(1)^T (x) 1) vec(A) = vec(1)`` with a large
    weight. The minimum-norm solution is returned with its diagnostics.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one (rho_in, rho_out) pair")
    d = np.asarray(pairs[0][0]).shape[0]
    n = d * d
    eye_n = np.eye(n)
    blocks, rhs = [], []
    for rho_in, rho_out in pairs:
        x = np.asarray(rho_in, dtype=complex).reshape(-1)
        y = np.asarray(rho_out, dtype=complex).reshape(-1)
        blocks.append(np.kron(eye_n, x[None, :]))
        rhs.append(y)
    coeff = np.vstack(blocks)
    b = np.concatenate(rhs)
    if enforce_tp:
        scale = 1e3 * max(float(np.max(np.abs(coeff))), 1.0)
        t = np.eye(d).reshape(-1)
        blocks_tp = np.kron(t[None, :], eye_n)
        coeff = np.vstack([coeff, scale * blocks_tp])
        b = np.concatenate([b, scale * t])
    sol, rank, residual = tc.lstsq_minnorm(coeff, b[:, None], rank_tol)
    a = AMatrix(sol[:, 0].reshape(n, n), d)
    return a, FamilyDiagnostics(rank, residual, rank == n * n, len(pairs))
