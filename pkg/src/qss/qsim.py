"""Dense simulation primitives for small multiqubit registers.

Conventions used throughout the package:

- Qubit 0 is the most significant bit of the amplitude index, so
  ``make_basis_state(2, "10")`` puts amplitude 1 at index 2.
- Measurement outcomes are written as +-1 eigenvalues, never as bits.
- All operations are pure functions of their inputs; randomness enters
  only through an explicitly passed ``numpy.random.Generator``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    InvalidArgument,
    InvalidDimension,
    InvalidState,
    ZeroProbabilityBranch,
)

MAX_STATE_QUBITS = 20
MAX_DENSITY_QUBITS = 12

ATOL_EXACT = 1e-10
ATOL_EIG = 1e-8
PSD_FLOOR = -1e-9
PROB_FLOOR = 1e-12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

#: The three measurement axes; identity is not a measurement.
AXES = ("X", "Y", "Z")

# Columns are the +1 and -1 eigenvectors of the corresponding Pauli.
EIGENBASIS = {
    "X": np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0),
    "Y": np.array([[1.0, 1.0], [1.0j, -1.0j]], dtype=complex) / np.sqrt(2.0),
    "Z": np.eye(2, dtype=complex),
}

#: Per-qubit measurement results, each entry +1 or -1.
Outcome = tuple[int, ...]


def _check_axis(axis: str) -> None:
    if axis not in AXES:
        raise InvalidArgument(f"measurement axis must be one of {AXES}, got {axis!r}")


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_STATE_QUBITS:
            raise InvalidArgument(
                f"n_qubits must be in [1, {MAX_STATE_QUBITS}], got {self.n_qubits}"
            )
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise InvalidDimension(
                f"expected {2**self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        if abs(np.linalg.norm(amps) - 1.0) > ATOL_EXACT:
            raise InvalidState(f"state norm {np.linalg.norm(amps)} is not 1")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amps: np.ndarray) -> "PureState":
        """Build a state from an unnormalized amplitude vector."""
        amps = np.asarray(amps, dtype=complex)
        n = int(round(np.log2(amps.size)))
        if 2**n != amps.size:
            raise InvalidDimension(f"amplitude count {amps.size} is not a power of 2")
        norm = np.linalg.norm(amps)
        if norm < PROB_FLOOR:
            raise InvalidState("cannot normalize a (near-)zero vector")
        return cls(n, amps / norm)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(
            self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj())
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, unit-trace operator on ``n_qubits`` qubits."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_DENSITY_QUBITS:
            raise InvalidArgument(
                f"n_qubits must be in [1, {MAX_DENSITY_QUBITS}], got {self.n_qubits}"
            )
        dim = 2**self.n_qubits
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (dim, dim):
            raise InvalidDimension(f"expected shape {(dim, dim)}, got {m.shape}")
        if np.abs(m - m.conj().T).max() > ATOL_EXACT:
            raise InvalidState("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > ATOL_EXACT:
            raise InvalidState(f"trace {np.trace(m)} is not 1")
        if np.linalg.eigvalsh(m).min() < PSD_FLOOR:
            raise InvalidState("density matrix has a negative eigenvalue")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, one letter per qubit.

    ``axes`` is a string over "IXYZ"; "I" marks qubits outside the support.
    """

    axes: str

    def __post_init__(self):
        if not self.axes or any(c not in "IXYZ" for c in self.axes):
            raise InvalidArgument(f"axes must be a nonempty string over IXYZ, got {self.axes!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.axes)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.axes) if c != "I")

    @classmethod
    def uniform(cls, axis: str, n: int) -> "PauliString":
        _check_axis(axis)
        return cls(axis * n)


State = Union[PureState, DensityMatrix]


def make_basis_state(n: int, bits: str) -> PureState:
    """Computational basis state |bits>, qubit 0 being the most significant bit."""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    if len(bits) != n:
        raise InvalidDimension(f"bit string length {len(bits)} != n = {n}")
    if any(b not in "01" for b in bits):
        raise InvalidArgument(f"bits must be over 01, got {bits!r}")
    amps = np.zeros(2**n, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return PureState(n, amps)


def _apply_one(arr: np.ndarray, axis: int, mat: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix to one tensor axis of a (2,)*k array."""
    out = np.tensordot(mat, arr, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def apply_pauli_string(state: PureState, p: PauliString) -> PureState:
    if p.n_qubits != state.n_qubits:
        raise InvalidDimension(
            f"Pauli string on {p.n_qubits} qubits applied to {state.n_qubits}-qubit state"
        )
    arr = state.amplitudes.reshape((2,) * state.n_qubits)
    for q, ax in enumerate(p.axes):
        if ax != "I":
            arr = _apply_one(arr, q, PAULI[ax])
    return PureState(state.n_qubits, arr.reshape(-1))


def expectation(state: State, p: PauliString) -> float:
    """Expectation value of a Pauli string, clamped to [-1, 1]."""
    if p.n_qubits != state.n_qubits:
        raise InvalidDimension(
            f"Pauli string on {p.n_qubits} qubits, state on {state.n_qubits}"
        )
    if isinstance(state, PureState):
        val = np.vdot(state.amplitudes, apply_pauli_string(state, p).amplitudes)
    else:
        n = state.n_qubits
        arr = state.matrix.reshape((2,) * (2 * n))
        for q, ax in enumerate(p.axes):
            if ax != "I":
                arr = _apply_one(arr, q, PAULI[ax])
        val = np.trace(arr.reshape(2**n, 2**n))
    if abs(val.imag) > ATOL_EXACT:
        raise InvalidState(f"expectation {val} has a nonzero imaginary part")
    return float(min(1.0, max(-1.0, val.real)))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the sorted qubit subset ``keep``."""
    keep_set = sorted(set(keep))
    n = rho.n_qubits
    if not keep_set:
        raise InvalidArgument("keep set must be nonempty")
    if keep_set[0] < 0 or keep_set[-1] >= n:
        raise InvalidArgument(f"keep indices must be in [0, {n}), got {keep_set}")
    arr = rho.matrix.reshape((2,) * (2 * n))
    n_cur = n
    for q in sorted(set(range(n)) - set(keep_set), reverse=True):
        arr = np.trace(arr, axis1=q, axis2=n_cur + q)
        n_cur -= 1
    return DensityMatrix(n_cur, arr.reshape(2**n_cur, 2**n_cur))


def reduce_state(state: State, keep: Iterable[int]) -> DensityMatrix:
    """Partial trace that also accepts pure-state input."""
    rho = state.density() if isinstance(state, PureState) else state
    return partial_trace(rho, keep)


def project(
    state: PureState,
    qubits: Sequence[int],
    basis: str,
    outcomes: Sequence[int],
) -> tuple[float, PureState]:
    """Project the listed qubits onto the given +-1 outcomes of one Pauli axis.

    Returns the branch probability and the renormalized full-register state
    (projected qubits collapse onto the chosen eigenvector).
    """
    _check_axis(basis)
    if len(outcomes) != len(qubits):
        raise InvalidArgument("one outcome is required per projected qubit")
    if any(o not in (1, -1) for o in outcomes):
        raise InvalidArgument(f"outcomes must be +-1, got {list(outcomes)}")
    if len(set(qubits)) != len(qubits):
        raise InvalidArgument("projected qubits must be distinct")
    if any(q < 0 or q >= state.n_qubits for q in qubits):
        raise InvalidArgument("projected qubit index out of range")
    arr = state.amplitudes.reshape((2,) * state.n_qubits)
    for q, oc in zip(qubits, outcomes):
        v = EIGENBASIS[basis][:, 0 if oc == 1 else 1]
        arr = _apply_one(arr, q, np.outer(v, v.conj()))
    flat = arr.reshape(-1)
    prob = float(np.vdot(flat, flat).real)
    if prob <= PROB_FLOOR:
        raise ZeroProbabilityBranch(
            f"branch probability {prob} below threshold {PROB_FLOOR}"
        )
    return prob, PureState(state.n_qubits, flat / np.sqrt(prob))


def measure_sample(
    state: PureState,
    bases: Sequence[str],
    rng: np.random.Generator,
) -> tuple[Outcome, PureState]:
    """Sample one projective measurement of every qubit in the given Pauli bases."""
    n = state.n_qubits
    if len(bases) != n:
        raise InvalidDimension(f"need {n} bases, got {len(bases)}")
    for ax in bases:
        _check_axis(ax)
    arr = state.amplitudes.reshape((2,) * n)
    for q, ax in enumerate(bases):
        # express the state in the measurement eigenbasis of qubit q
        arr = _apply_one(arr, q, EIGENBASIS[ax].conj().T)
    probs = np.abs(arr.reshape(-1)) ** 2
    probs /= probs.sum()
    idx = int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))
    idx = min(idx, 2**n - 1)
    bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
    outcome = tuple(1 - 2 * b for b in bits)
    post = np.ones(1, dtype=complex)
    for q, ax in enumerate(bases):
        post = np.kron(post, EIGENBASIS[ax][:, bits[q]])
    return outcome, PureState(n, post)


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, sorted descending."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidDimension(f"expected a square matrix, got shape {m.shape}")
    if np.abs(m - m.conj().T).max() > ATOL_EIG:
        raise InvalidState("matrix is not Hermitian within 1e-8")
    vals = np.sort(np.linalg.eigvalsh(m))[::-1]
    if abs(vals.sum() - np.trace(m).real) > ATOL_EIG * max(1.0, abs(np.trace(m))):
        raise InvalidState("eigenvalue sum does not match the trace")
    return vals
