"""Evan's coherent individual attack and the resulting security quantities.

The attack acts only on the two-dimensional span {|xi>|0>, |xibar>|0>} of the
Bob register plus a one-qubit probe; the protocol state never leaves that
span, so the map is implemented as an isometry there and nowhere else.

Register layout of the tripartite state: Alice is qubit 0, the 2M-1 Bobs are
qubits 1..2M-1, Evan's probe is qubit 2M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgument
from .qsim import (
    DensityMatrix,
    EIGENBASIS,
    PureState,
    _apply_one,
    project,
    reduce_state,
)
from .states import CARRIERS, make_carrier_branches

__all__ = [
    "AttackScenario",
    "TripartiteState",
    "SecurityReport",
    "evan_unitary_action",
    "attacked_state",
    "rho_ab",
    "rho_ae",
    "rho_b",
    "coalition_collapse",
    "binary_entropy",
    "shannon_entropy",
    "mutual_info_ab",
    "mutual_info_ae",
    "exact_mutual_info_ab",
    "security_report",
    "qber_x",
]


@dataclass(frozen=True)
class AttackScenario:
    """Carrier family, qubit count N = 2m, and attack angle phi (radians)."""

    carrier: str
    m: int
    phi: float

    def __post_init__(self):
        if self.carrier not in CARRIERS:
            raise InvalidArgument(f"carrier must be one of {CARRIERS}, got {self.carrier!r}")
        if self.m < 1:
            raise InvalidArgument(f"m must be >= 1, got {self.m}")
        if not 0.0 <= self.phi <= math.pi / 2 + 1e-12:
            raise InvalidArgument(f"phi must be in [0, pi/2], got {self.phi}")

    @property
    def n_parties(self) -> int:
        return 2 * self.m


@dataclass(frozen=True)
class TripartiteState:
    """Pure state of Alice, the Bobs, and Evan's probe after the attack."""

    psi: PureState
    scenario: AttackScenario


@dataclass(frozen=True)
class SecurityReport:
    phi: float
    i_ab: float
    i_ae: float
    margin: float
    secure: bool


def evan_unitary_action(branch: str, phi: float) -> dict[tuple[str, int], float]:
    """Image of |branch>|0> under the attack, as {(branch, probe_bit): amplitude}.

    ``branch`` is "xi" or "xibar".
    """
    if branch not in ("xi", "xibar"):
        raise InvalidArgument(f"branch must be 'xi' or 'xibar', got {branch!r}")
    if not 0.0 <= phi <= math.pi / 2 + 1e-12:
        raise InvalidArgument(f"phi must be in [0, pi/2], got {phi}")
    if branch == "xi":
        return {("xi", 0): 1.0}
    return {("xibar", 0): math.cos(phi), ("xi", 1): math.sin(phi)}


def attacked_state(scenario: AttackScenario) -> TripartiteState:
    """|psi>_ABE on 2m+1 qubits after Evan's attack on the carrier."""
    xi, xibar = make_carrier_branches(scenario.carrier, scenario.m)
    c, s = math.cos(scenario.phi), math.sin(scenario.phi)
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1 = np.array([0.0, 1.0], dtype=complex)
    amps = (
        np.kron(np.kron(e0, xi.amplitudes), e0)
        + c * np.kron(np.kron(e1, xibar.amplitudes), e0)
        + s * np.kron(np.kron(e1, xi.amplitudes), e1)
    ) / np.sqrt(2.0)
    return TripartiteState(PureState(2 * scenario.m + 1, amps), scenario)


def rho_ab(t: TripartiteState) -> DensityMatrix:
    """Alice + all Bobs, Evan traced out."""
    return reduce_state(t.psi, range(2 * t.scenario.m))


def rho_b(t: TripartiteState) -> DensityMatrix:
    """The Bobs alone."""
    return reduce_state(t.psi, range(1, 2 * t.scenario.m))


def rho_ae(t: TripartiteState) -> DensityMatrix:
    """Alice + Evan's probe (two qubits)."""
    return reduce_state(t.psi, (0, 2 * t.scenario.m))


def coalition_collapse(
    t: TripartiteState, kept_bob: int, outcome_sign: int = 1
) -> DensityMatrix:
    """Two-qubit (Alice, B_k) state after the other Bobs post-select.

    For the G carrier the other 2M-2 Bobs project in the sigma_z basis onto
    the all-|0> (outcome_sign=+1) or all-|1> (outcome_sign=-1) pattern; for
    the GHZ carrier they project in sigma_x onto all-plus or all-minus.
    """
    m = t.scenario.m
    if m < 2:
        raise InvalidArgument("coalition collapse needs m >= 2 (at least two Bobs)")
    if not 1 <= kept_bob <= 2 * m - 1:
        raise InvalidArgument(f"kept_bob must be a Bob qubit in [1, {2 * m - 1}]")
    if outcome_sign not in (1, -1):
        raise InvalidArgument("outcome_sign must be +-1")
    others = [q for q in range(1, 2 * m) if q != kept_bob]
    basis = "Z" if t.scenario.carrier == "G" else "X"
    _, collapsed = project(t.psi, others, basis, [outcome_sign] * len(others))
    return reduce_state(collapsed, (0, kept_bob))


def binary_entropy(p: float) -> float:
    """H(p) in bits, with 0 log 0 = 0."""
    if not 0.0 <= p <= 1.0:
        raise InvalidArgument(f"probability must be in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def shannon_entropy(dist: Sequence[float]) -> float:
    """Shannon entropy in bits of a probability vector."""
    d = np.asarray(dist, dtype=float)
    if d.size == 0 or d.min() < -1e-9 or abs(d.sum() - 1.0) > 1e-9:
        raise InvalidArgument("input is not a probability distribution")
    d = d[d > 0.0]
    return float(-(d * np.log2(d)).sum())


def mutual_info_ab(phi: float) -> float:
    """Closed-form I(A:B) = 1 - H((1 + cos phi)/2) in bits."""
    if not 0.0 <= phi <= math.pi / 2 + 1e-12:
        raise InvalidArgument(f"phi must be in [0, pi/2], got {phi}")
    return 1.0 - binary_entropy((1.0 + math.cos(phi)) / 2.0)


def mutual_info_ae(phi: float) -> float:
    """Closed-form I(A:E); equals I(A:B) at the complementary angle."""
    return mutual_info_ab(math.pi / 2 - phi)


def qber_x(phi: float) -> float:
    """Probability that Alice's bit disagrees with the Bobs' product bit."""
    if not 0.0 <= phi <= math.pi / 2 + 1e-12:
        raise InvalidArgument(f"phi must be in [0, pi/2], got {phi}")
    return (1.0 - math.cos(phi)) / 2.0


def _joint_product_distribution(rho: DensityMatrix, basis: str) -> np.ndarray:
    """Joint distribution of (Alice outcome, product of Bob outcomes).

    Entry [i, j]: i = 0 for Alice +1, j = 0 for Bob-product +1.
    """
    n = rho.n_qubits
    arr = rho.matrix.reshape((2,) * (2 * n))
    u = EIGENBASIS[basis].conj().T
    for q in range(n):
        arr = _apply_one(arr, q, u)  # rows
        arr = _apply_one(arr, n + q, u.conj())  # columns
    probs = np.diag(arr.reshape(2**n, 2**n)).real
    joint = np.zeros((2, 2))
    for idx, p in enumerate(probs):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        a = bits[0]
        prod_bit = sum(bits[1:]) % 2  # product of +-1 outcomes is -1 iff odd
        joint[a, prod_bit] += p
    # roundoff can leave entries a few ulp outside [0, 1]
    return np.clip(joint, 0.0, 1.0)


def exact_mutual_info_ab(scenario: AttackScenario) -> float:
    """I(A:B) from the exact outcome distribution of the attacked state.

    Both all-x and all-y measurement rounds are exercised with equal weight,
    matching the sifted-round average of the protocol.
    """
    rho = rho_ab(attacked_state(scenario))
    h_cond = 0.0
    for basis in ("X", "Y"):
        joint = _joint_product_distribution(rho, basis)
        h = 0.0
        for j in range(2):
            pb = joint[:, j].sum()
            if pb > 0.0:
                h += pb * binary_entropy(joint[0, j] / pb)
        h_cond += 0.5 * h
    p_alice = _joint_product_distribution(rho, "X").sum(axis=1)[0]
    return binary_entropy(p_alice) - h_cond


def security_report(scenario: AttackScenario) -> SecurityReport:
    """Closed-form security verdict: secure iff I(A:B) > I(A:E)."""
    i_ab = mutual_info_ab(scenario.phi)
    i_ae = mutual_info_ae(scenario.phi)
    margin = i_ab - i_ae
    return SecurityReport(scenario.phi, i_ab, i_ae, margin, margin > 0.0)
