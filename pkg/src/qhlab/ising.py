"""Parameterized Ising Hamiltonians ``H(x) = sum_{(i,j)} x_ij Z_i Z_j``.

Every member of the family is diagonal in the computational basis, so the
models are represented by their energy vector. Spin convention: bit value 0
maps to spin +1, bit value 1 to spin -1 (``Z = diag(1, -1)``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .statevector import DiagonalHermitian

MAX_QUBITS = 24


@dataclass(frozen=True)
class CouplingGraph:
    """Interaction graph on ``n_qubits`` with ordered edges ``(i, j)``, ``i < j``."""

    n_qubits: int
    edges: tuple[tuple[int, int], ...]
    kind: str = "custom"

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not 0 <= i < j < self.n_qubits:
                raise ValueError(f"invalid edge ({i}, {j}) for {self.n_qubits} qubits")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edges")
        if self.kind not in ("complete", "line", "custom"):
            raise ValueError(f"unknown graph kind {self.kind!r}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def complete(cls, n: int) -> CouplingGraph:
        return cls(n, tuple(itertools.combinations(range(n), 2)), "complete")

    @classmethod
    def line(cls, n: int) -> CouplingGraph:
        return cls(n, tuple((i, i + 1) for i in range(n - 1)), "line")

    @property
    def dim(self) -> int:
        """Number of couplings, i.e. the parameter dimension."""
        return len(self.edges)

    @property
    def hilbert_dim(self) -> int:
        return 2**self.n_qubits

    @cached_property
    def edge_signs(self) -> np.ndarray:
        """Matrix ``P`` of shape ``(2**n, dim)`` with ``P[z, e] = s_i(z) s_j(z)``.

        The energy vector of ``H(x)`` is then ``P @ x``.
        """
        if self.n_qubits > MAX_QUBITS:
            raise ValueError(f"at most {MAX_QUBITS} qubits supported")
        n = self.n_qubits
        z = np.arange(2**n)[:, None]
        shifts = n - 1 - np.arange(n)
        spins = (1 - 2 * ((z >> shifts) & 1)).astype(np.int8)
        if not self.edges:
            return np.zeros((2**n, 0), dtype=np.int8)
        i, j = np.array(self.edges).T
        out = spins[:, i] * spins[:, j]
        out.setflags(write=False)
        return out


def _check_params(x, graph: CouplingGraph) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != graph.dim:
        raise ValueError(
            f"parameter length {x.shape[-1]} does not match {graph.dim} edges"
        )
    return x


def ising_energies(x, graph: CouplingGraph) -> np.ndarray:
    """Energy vector(s) ``E_x(z)``; ``x`` may be a single vector or a stack ``(M, dim)``.

    A stack returns shape ``(2**n, M)``.
    """
    x = _check_params(x, graph)
    return graph.edge_signs @ x.T


def ising_diagonal(x, graph: CouplingGraph) -> DiagonalHermitian:
    x = _check_params(x, graph)
    if x.ndim != 1:
        raise ValueError("ising_diagonal takes a single parameter vector")
    return DiagonalHermitian(ising_energies(x, graph))


def model_norm_diff(x, x_prime, graph: CouplingGraph, norm: str = "spectral") -> float:
    """Norm of ``H(x) - H(x')``.

    ``norm="spectral"`` gives the operator 2-norm, which for diagonal models is
    ``max_z |E_x(z) - E_x'(z)|``; ``norm="frobenius"`` is offered for
    sensitivity studies.
    """
    diff = _check_params(x, graph) - _check_params(x_prime, graph)
    delta = graph.edge_signs @ diff
    if norm == "spectral":
        return float(np.max(np.abs(delta)))
    if norm == "frobenius":
        return float(np.sqrt(np.sum(delta**2)))
    raise ValueError(f"unknown norm {norm!r}")


def uniform_superposition(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one qubit")
    N = 2**n
    return np.full(N, 1.0 / np.sqrt(N), dtype=complex)
