"""Exact state-vector substrate: states, gates, Hermitian evolution, measurement.

States are plain complex numpy vectors. Basis index ``k`` is read as a bit
string with qubit 0 as the most significant bit, so on three qubits index 6
is ``110``.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-12


def as_state(v, tol: float = NORM_TOL) -> np.ndarray:
    """Return ``v`` as a complex vector, rejecting anything not unit-norm."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"state must be a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("state has non-finite amplitudes")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state is not normalized: |v| = {norm!r}")
    return v


def basis_state(k: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


def inner_product(u, v) -> complex:
    """Return ``<u|v> = sum_k conj(u_k) v_k``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return complex(np.vdot(u, v))


class HermitianOperator:
    """Dense Hermitian matrix with a lazily cached eigendecomposition.

    Parameters
    ----------
    matrix : array_like, shape (N, N)
        Must equal its conjugate transpose within ``tol`` elementwise.
    """

    def __init__(self, matrix, tol: float = HERMITIAN_TOL):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"Hermitian operator must be square, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator has non-finite entries")
        dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if dev > tol:
            raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3g})")
        m.setflags(write=False)
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def max_abs_entry(self) -> float:
        """Largest entry magnitude (the cost model's Lambda)."""
        return float(np.max(np.abs(self.matrix)))

    @property
    def sparsity(self) -> int:
        """Maximum number of nonzeros in any row (the cost model's d)."""
        return int(np.max(np.count_nonzero(self.matrix, axis=1)))

    @cached_property
    def _eigh(self):
        return np.linalg.eigh(self.matrix)

    def to_dense(self) -> np.ndarray:
        return self.matrix

    def propagator(self, t: float) -> np.ndarray:
        """Return the unitary ``exp(-i H t)``."""
        w, vecs = self._eigh
        return (vecs * np.exp(-1j * w * t)) @ vecs.conj().T

    def apply_propagator(self, t: float, v: np.ndarray) -> np.ndarray:
        w, vecs = self._eigh
        return vecs @ (np.exp(-1j * w * t) * (vecs.conj().T @ v))


class DiagonalHermitian:
    """Hermitian operator that is diagonal in the computational basis."""

    def __init__(self, diag):
        d = np.array(diag, dtype=float)
        if d.ndim != 1:
            raise ValueError("diagonal must be one-dimensional")
        if not np.all(np.isfinite(d)):
            raise ValueError("diagonal has non-finite entries")
        d.setflags(write=False)
        self.diag = d

    @property
    def dim(self) -> int:
        return self.diag.shape[0]

    @property
    def max_abs_entry(self) -> float:
        return float(np.max(np.abs(self.diag)))

    @property
    def sparsity(self) -> int:
        return 1

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag).astype(complex)

    def propagator(self, t: float) -> np.ndarray:
        return np.diag(np.exp(-1j * self.diag * t))

    def apply_propagator(self, t: float, v: np.ndarray) -> np.ndarray:
        return np.exp(-1j * self.diag * t) * v


def _as_operator(H):
    if isinstance(H, (HermitianOperator, DiagonalHermitian)):
        return H
    return HermitianOperator(H)


def is_unitary(U, tol: float = NORM_TOL) -> bool:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))) <= tol)


def hadamard_gate() -> np.ndarray:
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)


def toffoli_gate() -> np.ndarray:
    """Controlled-controlled-NOT on three qubits: swaps ``110`` and ``111``."""
    U = np.eye(8, dtype=complex)
    U[[6, 7]] = U[[7, 6]]
    return U


def measure(v, rng: np.random.Generator, shots: int | None = None):
    """Sample computational-basis outcomes with probability ``|v_k|^2``.

    Returns a single index when ``shots`` is None, otherwise an integer array
    of ``shots`` independent outcomes.
    """
    v = as_state(v)
    probs = np.abs(v) ** 2
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    u = rng.random(1 if shots is None else shots)
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), v.size - 1)
    return int(idx[0]) if shots is None else idx


def evolve(H, t: float, v) -> np.ndarray:
    """Return ``exp(-i H t) v``; negative ``t`` applies the inverse map."""
    H = _as_operator(H)
    v = as_state(v)
    if not np.isfinite(t):
        raise ValueError(f"evolution time must be finite, got {t!r}")
    if v.size != H.dim:
        raise ValueError(f"dimension mismatch: operator {H.dim}, state {v.size}")
    return H.apply_propagator(t, v)


def survival_probability(H_minus, H_true, t: float, v0) -> float:
    """Probability that ``v0`` survives forward evolution then model inversion.

    Computes ``|<v0| exp(i H_minus t) exp(-i H_true t) |v0>|^2``: the system
    evolves under ``H_true`` for time ``t`` and a simulator undoes evolution
    under the hypothesis ``H_minus``.
    """
    v0 = as_state(v0)
    forward = evolve(H_true, t, v0)
    # <v0| e^{iH_- t} = (e^{-iH_- t} v0)^dagger
    back = evolve(H_minus, t, v0)
    p = abs(np.vdot(back, forward)) ** 2
    return float(min(max(p, 0.0), 1.0))
