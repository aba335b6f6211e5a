"""Local-realism analyzers: Horodecki criterion, correlation tensors,
two-setting sufficiency sums, collapse visibility, and noise thresholds.

Tensor axes are ordered (x, y, z) = (0, 1, 2) per party, parties in register
order, stored dense as a (3,)*n array.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, InvalidArgument, InvalidDimension
from .qsim import DensityMatrix, PauliString, PureState, State, expectation

__all__ = [
    "CorrelationTensor",
    "LocalFrame",
    "ThresholdReport",
    "correlation_matrix_2q",
    "horodecki_m",
    "correlation_tensor",
    "plane_sum",
    "full_sum",
    "rotate_tensor",
    "maximize_plane_sum",
    "collapse_visibility",
    "crit_noise_g",
    "crit_noise_ghz",
    "crossover_scan",
    "lr_sufficiency_thresholds",
]

MAX_TENSOR_QUBITS = 8
_AXIS_CHARS = "XYZ"


@dataclass(frozen=True)
class CorrelationTensor:
    """Full N-party Pauli correlation tensor T_{x1...xN}."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        ent = np.array(self.entries, dtype=float)
        if ent.shape != (3,) * self.n:
            raise InvalidDimension(f"expected shape {(3,) * self.n}, got {ent.shape}")
        if np.abs(ent).max() > 1.0 + 1e-9:
            raise InvalidArgument("tensor entries must lie in [-1, 1]")
        ent.flags.writeable = False
        object.__setattr__(self, "entries", ent)


@dataclass(frozen=True)
class LocalFrame:
    """Per-party orthonormal direction pair spanning the measurement plane.

    ``axes`` has shape (n, 2, 3): axes[i, 0] and axes[i, 1] are party i's two
    unit directions.
    """

    axes: np.ndarray

    def __post_init__(self):
        ax = np.array(self.axes, dtype=float)
        if ax.ndim != 3 or ax.shape[1:] != (2, 3):
            raise InvalidDimension(f"expected shape (n, 2, 3), got {ax.shape}")
        norms = np.linalg.norm(ax, axis=2)
        if np.abs(norms - 1.0).max() > 1e-10:
            raise InvalidArgument("frame directions must be unit vectors")
        dots = np.einsum("ik,ik->i", ax[:, 0], ax[:, 1])
        if np.abs(dots).max() > 1e-10:
            raise InvalidArgument("frame direction pairs must be orthogonal")
        ax.flags.writeable = False
        object.__setattr__(self, "axes", ax)

    @property
    def n(self) -> int:
        return self.axes.shape[0]

    @classmethod
    def default(cls, n: int) -> "LocalFrame":
        """The protocol's fixed sigma_x / sigma_y plane for every party."""
        ax = np.zeros((n, 2, 3))
        ax[:, 0, 0] = 1.0
        ax[:, 1, 1] = 1.0
        return cls(ax)


def correlation_matrix_2q(rho: DensityMatrix) -> np.ndarray:
    """T_ij = tr(rho sigma_i x sigma_j) for a two-qubit state."""
    if rho.n_qubits != 2:
        raise InvalidDimension(f"expected a 2-qubit state, got {rho.n_qubits} qubits")
    t = np.empty((3, 3))
    for i, a in enumerate(_AXIS_CHARS):
        for j, b in enumerate(_AXIS_CHARS):
            t[i, j] = expectation(rho, PauliString(a + b))
    return t


def horodecki_m(rho: DensityMatrix) -> float:
    """M(rho): sum of the two largest eigenvalues of T^T T.

    The state violates some CHSH inequality iff M > 1; the maximal CHSH
    value is 2 sqrt(M).
    """
    t = correlation_matrix_2q(rho)
    vals = np.sort(np.linalg.eigvalsh(t.T @ t))
    return float(vals[-1] + vals[-2])


def correlation_tensor(state: State) -> CorrelationTensor:
    """Dense correlation tensor of a pure or mixed n-qubit state, n <= 8."""
    n = state.n_qubits
    if n > MAX_TENSOR_QUBITS:
        raise BudgetExceeded(f"correlation tensor capped at n <= {MAX_TENSOR_QUBITS}")
    entries = np.empty((3,) * n)
    for idx in itertools.product(range(3), repeat=n):
        axes = "".join(_AXIS_CHARS[i] for i in idx)
        entries[idx] = expectation(state, PauliString(axes))
    return CorrelationTensor(n, entries)


def _contract_party(arr: np.ndarray, axis: int, mat: np.ndarray) -> np.ndarray:
    out = np.tensordot(mat, arr, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def plane_sum(t: CorrelationTensor, frame: LocalFrame | None = None) -> float:
    """Sum of squared tensor entries with every index in the frame's plane.

    The default frame is the protocol's fixed sigma_x / sigma_y axes.
    """
    if frame is None:
        restricted = t.entries[(slice(0, 2),) * t.n]
        return float((restricted**2).sum())
    if frame.n != t.n:
        raise InvalidDimension("frame party count does not match tensor")
    arr = t.entries
    for i in range(t.n):
        arr = _contract_party(arr, i, frame.axes[i])
    return float((arr**2).sum())


def full_sum(t: CorrelationTensor) -> float:
    """Sum of all 3^n squared entries; invariant under local rotations."""
    return float((t.entries**2).sum())


def rotate_tensor(t: CorrelationTensor, rotations: np.ndarray) -> CorrelationTensor:
    """Re-express the tensor in rotated local coordinate systems.

    ``rotations`` has shape (n, 3, 3); row k of rotations[i] is party i's new
    k-th direction in the old coordinates.
    """
    rot = np.asarray(rotations, dtype=float)
    if rot.shape != (t.n, 3, 3):
        raise InvalidDimension(f"expected shape {(t.n, 3, 3)}, got {rot.shape}")
    arr = t.entries
    for i in range(t.n):
        arr = _contract_party(arr, i, rot[i])
    return CorrelationTensor(t.n, arr)


def _random_frame(n: int, rng: np.random.Generator) -> np.ndarray:
    frames = np.empty((n, 2, 3))
    for i in range(n):
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        frames[i] = q[:, :2].T
    return frames


def maximize_plane_sum(
    t: CorrelationTensor, restarts: int = 64, seed: int = 0
) -> tuple[float, LocalFrame]:
    """Heuristic frame search: alternating per-party plane optimization.

    For fixed other-party planes the optimal plane of party i is the span of
    the top two eigenvectors of a 3x3 moment matrix, so each sweep is exact
    per party.  The value returned is a certified lower bound on the true
    maximum over all local frames.
    """
    if restarts < 1:
        raise InvalidArgument(f"restarts must be >= 1, got {restarts}")
    n = t.n
    best_val = -np.inf
    best_axes = LocalFrame.default(n).axes.copy()
    for r in range(restarts):
        rng = np.random.default_rng((seed, r))
        axes = LocalFrame.default(n).axes.copy() if r == 0 else _random_frame(n, rng)
        prev = -np.inf
        for _ in range(200):
            val = prev
            for i in range(n):
                arr = t.entries
                # contract every other party with its current plane
                for j in range(n):
                    if j != i:
                        arr = _contract_party(arr, j, axes[j])
                mat = np.moveaxis(arr, i, -1).reshape(-1, 3)
                q_mom = mat.T @ mat
                w, v = np.linalg.eigh(q_mom)
                axes[i, 0] = v[:, -1]
                axes[i, 1] = v[:, -2]
                val = float(w[-1] + w[-2])
            if val - prev < 1e-12:
                prev = val
                break
            prev = val
        if prev > best_val:
            best_val = prev
            best_axes = axes.copy()
    return best_val, LocalFrame(best_axes)


def collapse_visibility(n: int, p: float) -> float:
    """Werner visibility of the two-qubit state left after n-2 parties
    project the noisy n-qubit carrier onto a uniform sigma_z pattern."""
    if n < 4:
        raise InvalidArgument(f"collapse analysis needs n >= 4, got {n}")
    if not 0.0 < p <= 1.0:
        # at p = 0 the pure branch vanishes and the Werner fit degenerates
        raise InvalidArgument(f"visibility must be in (0, 1], got {p}")
    return 1.0 / (1.0 + (1.0 - p) * n / (p * 2 ** (n - 2)))


def crit_noise_g(n: int) -> float:
    """Visibility above which the noisy G carrier has no LR model
    (via the collapsed two-qubit Werner state)."""
    if n < 4:
        raise InvalidArgument(f"threshold defined for n >= 4, got {n}")
    return n / (n + (math.sqrt(2.0) - 1.0) * 2 ** (n - 2))


def crit_noise_ghz(n: int) -> float:
    """Visibility above which the noisy GHZ state violates the full
    two-setting correlation inequalities: 1/sqrt(2^(n-1))."""
    if n < 4:
        raise InvalidArgument(f"threshold defined for n >= 4, got {n}")
    return 1.0 / math.sqrt(2 ** (n - 1))


@dataclass(frozen=True)
class ThresholdReport:
    n: int
    p_crit_g: float
    q_crit_ghz: float
    g_more_robust: bool


def crossover_scan(n_min: int, n_max: int) -> list[ThresholdReport]:
    """Critical visibilities over a range of qubit counts.

    ``g_more_robust`` flags p_crit_g < q_crit_ghz, i.e. the G carrier keeps
    its (collapse-based) nonclassicality at lower visibility than the GHZ
    carrier tolerates; the flip happens between n = 12 and n = 13.
    """
    if n_min < 4 or n_max < n_min:
        raise InvalidArgument("need 4 <= n_min <= n_max")
    reports = []
    for n in range(n_min, n_max + 1):
        p = crit_noise_g(n)
        q = crit_noise_ghz(n)
        reports.append(ThresholdReport(n, p, q, p < q))
    return reports


def lr_sufficiency_thresholds() -> tuple[float, float]:
    """The fixed-frame LR-sufficiency bound for the noisy 6-qubit G carrier
    and the violation threshold of the noisy 6-qubit GHZ state."""
    return math.sqrt(3.0 / 16.0), 1.0 / math.sqrt(32.0)


#: Visibility below which the noisy 6-qubit G carrier has an LR model in
#: every local frame (from the full squared-tensor sum 23).
G6_ANY_FRAME_BOUND = 1.0 / math.sqrt(23.0)
