"""Bipartite pure and mixed states: Schmidt form, entropies, product tests."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import tensor_core as tc
from .errors import DimensionError

Base = Literal["bits", "nats"]

NORM_TOL = 1e-12
PRODUCT_TOL = 1e-9
NEG_EIG_TOL = 1e-10


def _other(slot: str) -> str:
    return "second" if slot == "first" else "first"


@dataclass(frozen=True, eq=False)
class JointPureState:
    """Normalized pure state of a two-slot system.

    ``system_slot`` records which tensor slot holds the system; the other
    slot is the environment. Amplitudes are stored in (first, second) order.
    """

    amplitudes: np.ndarray
    d_first: int
    d_second: int
    system_slot: Literal["first", "second"]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.d_first * self.d_second:
            raise DimensionError(
                f"{amps.size} amplitudes do not fit dims {self.d_first}x{self.d_second}"
            )
        if self.system_slot not in ("first", "second"):
            raise ValueError(f"system_slot must be 'first' or 'second', got {self.system_slot!r}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes, d_first: int, d_second: int, system_slot: str = "first"):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(amps / np.linalg.norm(amps), d_first, d_second, system_slot)

    @classmethod
    def product(cls, first, second, system_slot: str = "first"):
        a = np.asarray(first, dtype=complex).reshape(-1)
        b = np.asarray(second, dtype=complex).reshape(-1)
        return cls.normalized(np.kron(a, b), a.size, b.size, system_slot)

    @property
    def dim(self) -> int:
        return self.d_first * self.d_second

    @property
    def env_slot(self) -> str:
        return _other(self.system_slot)

    @property
    def d_system(self) -> int:
        return self.d_first if self.system_slot == "first" else self.d_second

    @property
    def d_env(self) -> int:
        return self.d_second if self.system_slot == "first" else self.d_first

    def coefficients(self) -> np.ndarray:
        """Amplitudes as a (d_first x d_second) matrix."""
        return self.amplitudes.reshape(self.d_first, self.d_second)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def swapped(self) -> "JointPureState":
        """Same physical state with the tensor slots exchanged."""
        amps = self.coefficients().T.reshape(-1)
        return JointPureState(amps, self.d_second, self.d_first, _other(self.system_slot))

    def with_system_slot(self, slot: str) -> "JointPureState":
        return self if slot == self.system_slot else self.swapped()

    def evolve(self, u) -> "JointPureState":
        out = np.asarray(u, dtype=complex) @ self.amplitudes
        return JointPureState.normalized(out, self.d_first, self.d_second, self.system_slot)

    def reduced(self, keep: str | None = None) -> np.ndarray:
        """Reduced density matrix of ``keep`` (default: the system slot)."""
        keep = keep or self.system_slot
        c = self.coefficients()
        if keep == "first":
            return c @ c.conj().T
        return c.T @ c.conj()

    def to_dict(self) -> dict:
        return {
            "d_first": self.d_first,
            "d_second": self.d_second,
            "system_slot": self.system_slot,
            "re": self.amplitudes.real.tolist(),
            "im": self.amplitudes.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, record: dict) -> "JointPureState":
        amps = np.asarray(record["re"], dtype=float) + 1j * np.asarray(record["im"], dtype=float)
        return cls(amps, int(record["d_first"]), int(record["d_second"]), record["system_slot"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "JointPureState":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        m = tc.check_hermitian(self.matrix, name="density matrix")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"density matrix has trace {tr!r}")
        w = tc.eigvalsh(m)
        if w[0] < -NEG_EIG_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {w[0]:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if not self.dims:
            object.__setattr__(self, "dims", (m.shape[0],))


def schmidt(psi: JointPureState):
    """Schmidt coefficients (descending) and the paired bases.

    ``psi == sum_k coeffs[k] * kron(left[:, k], right[:, k])`` where left
    lives on the first slot and right on the second.
    """
    u, s, v = tc.svd(psi.coefficients())
    return s, u, v.conj()


def _entropy_from_probs(p: np.ndarray, base: Base) -> float:
    p = p[p > 0.0]
    if base == "bits":
        return max(float(-np.sum(p * np.log2(p))), 0.0)
    if base == "nats":
        return max(float(-np.sum(p * np.log(p))), 0.0)
    raise ValueError(f"unknown entropy base {base!r}")


def entanglement_entropy(psi: JointPureState, base: Base = "bits") -> float:
    coeffs, _, _ = schmidt(psi)
    return _entropy_from_probs(coeffs**2, base)


def vn_entropy(rho, base: Base = "bits") -> float:
    """Von Neumann entropy; eigenvalues in [-1e-10, 0) are clamped to zero."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else tc.check_hermitian(rho, name="rho")
    w = tc.eigvalsh(m)
    if w[0] < -NEG_EIG_TOL:
        raise ValueError(f"eigenvalue {w[0]:.3e} below -{NEG_EIG_TOL}")
    return _entropy_from_probs(np.clip(w, 0.0, None), base)


def is_product(psi: JointPureState, tol: float = PRODUCT_TOL) -> bool:
    coeffs, _, _ = schmidt(psi)
    return coeffs.size < 2 or bool(coeffs[1] < tol)


def is_maximally_entangled(psi: JointPureState, tol: float = PRODUCT_TOL) -> bool:
    k = min(psi.d_first, psi.d_second)
    coeffs, _, _ = schmidt(psi)
    return bool(np.all(np.abs(coeffs[:k] - 1.0 / np.sqrt(k)) < tol))


def product_factors(psi: JointPureState, tol: float = PRODUCT_TOL):
    """Return ``(first, second)`` factors of a product state, or None."""
    coeffs, left, right = schmidt(psi)
    if coeffs.size > 1 and coeffs[1] >= tol:
        return None
    return coeffs[0] * left[:, 0], right[:, 0]


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def phase_distance(a, b) -> float:
    """Distance between two unit vectors up to a global phase."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))
