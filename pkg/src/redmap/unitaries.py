"""Named gates, controlled embeddings, unitary roots, Haar sampling and
locality tests for joint system-environment unitaries."""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Literal

import numpy as np

from . import tensor_core as tc
from .errors import DimensionError, NonLocalUnitary
from .states import JointPureState, ket

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
GATE_NAMES = ("CNOT", "SQRT_CNOT", "CPHASE", "SQRT_CPHASE", "X", "Y", "Z")
LOCALITY_TOL = 1e-9


@dataclass(frozen=True)
class GateConvention:
    """How ``|0><0| (x) 1 + |1><1| (x) U`` is laid out on two slots.

    control_slot: tensor slot that carries the control qubit.
    root_branch: branch used for square (and higher) roots of gates with a
        -1 eigenvalue.
    tensor_order: ``SE`` puts the system in the first slot, ``ES`` in the second.
    """

    control_slot: Literal["first", "second"]
    root_branch: Literal["principal", "alternate"]
    tensor_order: Literal["SE", "ES"]

    def __post_init__(self):
        if self.control_slot not in ("first", "second"):
            raise ValueError(f"control_slot must be 'first' or 'second', got {self.control_slot!r}")
        if self.root_branch not in ("principal", "alternate"):
            raise ValueError(f"root_branch must be 'principal' or 'alternate', got {self.root_branch!r}")
        if self.tensor_order not in ("SE", "ES"):
            raise ValueError(f"tensor_order must be 'SE' or 'ES', got {self.tensor_order!r}")

    @property
    def system_slot(self) -> str:
        return "first" if self.tensor_order == "SE" else "second"

    @property
    def env_slot(self) -> str:
        return "second" if self.tensor_order == "SE" else "first"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, record: dict) -> "GateConvention":
        return cls(record["control_slot"], record["root_branch"], record["tensor_order"])

    def label(self) -> str:
        return f"control={self.control_slot},branch={self.root_branch},order={self.tensor_order}"


def pauli(name: str) -> np.ndarray:
    try:
        return PAULI[name.lower()].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli {name!r}; expected one of x, y, z") from None


def unitary_root(u, n: int, branch: str = "principal") -> np.ndarray:
    """Spectral n-th root: eigenphases in (-pi, pi] are divided by n."""
    if n < 1:
        raise ValueError("root order must be >= 1")
    return tc.unitary_power(u, 1.0 / n, branch)


def controlled(u, conv: GateConvention) -> np.ndarray:
    """``|0><0| (x) 1 + |1><1| (x) u`` with the control in ``conv.control_slot``.

    For a d-dimensional ``u`` the control is a qubit and the target is d-dimensional.
    """
    u = tc.check_unitary(u, name="controlled block")
    d = u.shape[0]
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    eye = np.eye(d, dtype=complex)
    if conv.control_slot == "first":
        return np.kron(p0, eye) + np.kron(p1, u)
    return np.kron(eye, p0) + np.kron(u, p1)


def named_gate(name: str, conv: GateConvention) -> np.ndarray:
    """Two-qubit gate (or single-qubit Pauli) by CLI name."""
    key = name.upper()
    if key in ("X", "Y", "Z"):
        return pauli(key)
    if key == "CNOT":
        return controlled(PAULI["x"], conv)
    if key == "SQRT_CNOT":
        return controlled(unitary_root(PAULI["x"], 2, conv.root_branch), conv)
    if key == "CPHASE":
        return controlled(PAULI["z"], conv)
    if key == "SQRT_CPHASE":
        return controlled(unitary_root(PAULI["z"], 2, conv.root_branch), conv)
    raise ValueError(f"unknown gate {name!r}; expected one of {', '.join(GATE_NAMES)}")


def local_operator(system_op, env_op, conv: GateConvention) -> np.ndarray:
    """Tensor a system and an environment operator in ``conv``'s slot order."""
    if conv.tensor_order == "SE":
        return np.kron(system_op, env_op)
    return np.kron(env_op, system_op)


# -- Haar sampling -----------------------------------------------------------

def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based stream for sample ``index`` under ``seed``.

    Philox is keyed by (seed, index), so every sample is reproducible on its
    own regardless of the order or thread it is drawn in.
    """
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, index & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def haar_unitary(d: int, seed: int | None = None, *, rng: np.random.Generator | None = None) -> np.ndarray:
    """Haar-distributed d x d unitary.

    Gaussian matrix, QR, then the phases of R's diagonal are pushed into Q
    so the distribution is exactly invariant.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if rng is None:
        rng = rng_for(0 if seed is None else seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


# -- locality ----------------------------------------------------------------

def operator_schmidt_values(u, d_first: int, d_second: int) -> np.ndarray:
    _, s, _ = tc.svd(tc.realign(u, d_first, d_second))
    return s


def is_local_unitary(u, d_first: int, d_second: int, tol: float = LOCALITY_TOL) -> bool:
    """True iff ``u`` factorizes as a tensor product (operator Schmidt rank 1)."""
    u = tc.as_matrix(u)
    if u.shape != (d_first * d_second, d_first * d_second):
        raise DimensionError(f"operator shape {u.shape} does not match dims {d_first}x{d_second}")
    s = operator_schmidt_values(u, d_first, d_second)
    return s.size < 2 or bool(s[1] < tol * s[0])


def local_factors(u, d_first: int, d_second: int, tol: float = LOCALITY_TOL):
    """Split a local unitary into ``(a, b)`` with ``u == kron(a, b)``."""
    if not is_local_unitary(u, d_first, d_second, tol):
        raise NonLocalUnitary("operator is not a tensor product")
    left, s, right = tc.svd(tc.realign(u, d_first, d_second))
    a = np.sqrt(s[0]) * left[:, 0].reshape(d_first, d_first)
    b = np.sqrt(s[0]) * right[:, 0].conj().reshape(d_second, d_second)
    # fix the scalar freedom so that a is unitary
    scale = np.linalg.norm(a[:, 0])
    return a / scale, b * scale


# -- dilation ----------------------------------------------------------------

def dilation_from_state(phi: JointPureState):
    """Unitary taking the product basis state |0,0> to ``phi``.

    ``phi`` is completed to an orthonormal basis by modified Gram-Schmidt
    (phi first, then the computational basis) and the computational basis
    is mapped onto it in order. Returns ``(u1, pre_product)``.
    """
    n = phi.dim
    basis = [phi.amplitudes.copy()]
    for e in np.eye(n, dtype=complex):
        if len(basis) == n:
            break
        w = e.copy()
        for _ in range(2):
            for b in basis:
                w -= np.vdot(b, w) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            basis.append(w / nrm)
    u1 = np.column_stack(basis)
    pre = JointPureState(ket(0, n), phi.d_first, phi.d_second, phi.system_slot)
    return u1, pre
