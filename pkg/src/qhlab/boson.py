"""Desk-scale boson sampling: permanents, outcome enumeration and sampling.

An interferometer is described by its ``m x n`` transition matrix ``A`` (the
first ``n`` columns of an ``m``-mode unitary, one column per input photon).
The probability of observing photon counts ``S = (s_1, ..., s_m)`` is
``|Per(A_S)|^2 / (s_1! ... s_m!)`` where ``A_S`` repeats row ``i`` of ``A``
``s_i`` times.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .distance import DiscreteDistribution

ENUMERATION_BUDGET = 10**6
MINORS_MAX = 12


def _square(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {M.shape}")
    return M


def permanent_minors(M) -> complex:
    """Permanent by cofactor expansion along the first row.

    Exponential in the worst way (``O(n!)``); kept as an independent check on
    :func:`permanent_ryser`.
    """
    M = _square(M)
    n = M.shape[0]
    if n > MINORS_MAX:
        raise ValueError(f"expansion by minors limited to n <= {MINORS_MAX}")
    if n == 0:
        return 1.0 + 0j

    def expand(rows: int, cols: tuple[int, ...]) -> complex:
        if len(cols) == 1:
            return M[rows, cols[0]]
        total = 0j
        for pos, c in enumerate(cols):
            a = M[rows, c]
            if a != 0:
                total += a * expand(rows + 1, cols[:pos] + cols[pos + 1 :])
        return total

    return complex(expand(0, tuple(range(n))))


def permanent_ryser(M) -> complex:
    """Permanent by Ryser's inclusion-exclusion formula in Gray-code order.

    Each step toggles one column into or out of the subset, so the row sums
    are updated in ``O(n)`` and the whole evaluation costs ``O(2^n n)``.
    """
    M = _square(M)
    n = M.shape[0]
    if n == 0:
        return 1.0 + 0j
    row_sums = np.zeros(n, dtype=complex)
    in_subset = np.zeros(n, dtype=bool)
    size = 0
    total = 0j
    for k in range(1, 2**n):
        # column whose membership flips between Gray codes k-1 and k
        j = (k & -k).bit_length() - 1
        if in_subset[j]:
            row_sums -= M[:, j]
            size -= 1
        else:
            row_sums += M[:, j]
            size += 1
        in_subset[j] = not in_subset[j]
        total += (-1) ** size * np.prod(row_sums)
    return complex((-1) ** n * total)


@dataclass(frozen=True)
class Interferometer:
    """Transition matrix ``A`` with orthonormal columns, shape ``(m, n)``."""

    A: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=complex)
        if A.ndim != 2 or A.shape[1] > A.shape[0] or A.shape[1] < 1:
            raise ValueError(f"transition matrix must be m x n with 1 <= n <= m, got {A.shape}")
        gram = A.conj().T @ A
        if np.max(np.abs(gram - np.eye(A.shape[1]))) > 1e-9:
            raise ValueError("transition matrix columns are not orthonormal")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def modes(self) -> int:
        return self.A.shape[0]

    @property
    def photons(self) -> int:
        return self.A.shape[1]


def _as_interferometer(A) -> Interferometer:
    return A if isinstance(A, Interferometer) else Interferometer(A)


def _check_outcome(S, m: int, n: int) -> tuple[int, ...]:
    S = tuple(int(s) for s in S)
    if len(S) != m or any(s < 0 for s in S):
        raise ValueError(f"outcome {S} is not a list of {m} non-negative counts")
    if sum(S) != n:
        raise ValueError(f"outcome {S} has {sum(S)} photons, expected {n}")
    return S


def build_A_S(A, S) -> np.ndarray:
    """Stack ``s_i`` copies of row ``i`` of ``A`` for every mode ``i``."""
    A = _as_interferometer(A)
    S = _check_outcome(S, A.modes, A.photons)
    rows = np.repeat(np.arange(A.modes), S)
    return A.A[rows]


def outcome_probability(A, S) -> float:
    A = _as_interferometer(A)
    S = _check_outcome(S, A.modes, A.photons)
    perm = permanent_ryser(build_A_S(A, S))
    denom = math.prod(math.factorial(s) for s in S)
    return float(abs(perm) ** 2 / denom)


def enumerate_outcomes(m: int, n: int) -> list[tuple[int, ...]]:
    """All photon-count tuples of ``n`` photons in ``m`` modes.

    Ordered with the count in mode 0 descending first, e.g. ``m=2, n=2`` gives
    ``[(2, 0), (1, 1), (0, 2)]``.
    """
    if m < 1 or n < 0:
        raise ValueError("need m >= 1 modes and n >= 0 photons")
    count = math.comb(m + n - 1, n)
    if count > ENUMERATION_BUDGET:
        raise ValueError(f"{count} outcomes exceeds enumeration budget {ENUMERATION_BUDGET}")

    def rec(modes: int, photons: int):
        if modes == 1:
            yield (photons,)
            return
        for first in range(photons, -1, -1):
            for rest in rec(modes - 1, photons - first):
                yield (first,) + rest

    return list(rec(m, n))


def full_distribution(A) -> DiscreteDistribution:
    A = _as_interferometer(A)
    outcomes = enumerate_outcomes(A.modes, A.photons)
    probs = np.array([outcome_probability(A, S) for S in outcomes])
    return DiscreteDistribution(probs, labels=outcomes)


def sample_outcome(A, shots: int, rng: np.random.Generator) -> list[tuple[int, ...]]:
    """Draw ``shots`` i.i.d. outcomes by inverse CDF over the exact distribution."""
    dist = full_distribution(A)
    idx = dist.sample(shots, rng)
    return [dist.labels[i] for i in idx]


def haar_random_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``m x m`` unitary from the QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_random_interferometer(m: int, n: int, rng: np.random.Generator) -> Interferometer:
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= photons <= modes, got n={n}, m={m}")
    return Interferometer(haar_random_unitary(m, rng)[:, :n])


def hong_ou_mandel() -> Interferometer:
    """The balanced two-mode beam splitter with one photon in each input."""
    return Interferometer(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0))


def format_outcome(S) -> str:
    return "-".join(str(int(s)) for s in S)


def parse_outcome(text: str) -> tuple[int, ...]:
    return tuple(int(s) for s in text.strip().split("-"))


def read_matrix_json(path) -> np.ndarray:
    """Load ``{"rows": [[[re, im], ...], ...]}`` as a complex matrix."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or set(data) != {"rows"}:
        raise ValueError(f"{path}: expected an object with a single 'rows' key")
    rows = data["rows"]
    try:
        M = np.array([[complex(re, im) for re, im in row] for row in rows])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: entries must be [re, im] pairs") from exc
    if M.ndim != 2:
        raise ValueError(f"{path}: rows must have equal length")
    return M


def write_matrix_json(M, path) -> None:
    M = np.asarray(M, dtype=complex)
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in M]
    with open(path, "w") as fh:
        json.dump({"rows": rows}, fh)
        fh.write("\n")
