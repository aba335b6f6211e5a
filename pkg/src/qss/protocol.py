"""Monte Carlo simulation of the secret-sharing rounds.

Each round distributes one attacked carrier state, every party (Alice plus
the 2m-1 Bobs) independently measures sigma_x or sigma_y with probability
1/2, and sifting keeps only the rounds in which all parties used the same
basis.  Outcome +1 maps to bit 0, outcome -1 to bit 1.

Transcripts are bit-reproducible: the whole run is a deterministic function
of (config, seed).
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .attack import AttackScenario, attacked_state
from .errors import EmptySiftedSet, InvalidArgument
from .qsim import EIGENBASIS, Outcome, _apply_one

__all__ = [
    "ProtocolConfig",
    "RoundRecord",
    "ProtocolTranscript",
    "run_protocol",
    "reconstruct_key",
    "coalition_info",
    "estimate_mutual_info",
    "transcript_to_jsonl",
    "transcript_summary",
]


@dataclass(frozen=True)
class ProtocolConfig:
    m: int
    rounds: int
    scenario: AttackScenario
    seed: int

    def __post_init__(self):
        if self.m < 2:
            raise InvalidArgument(f"protocol needs m >= 2, got {self.m}")
        if self.rounds < 1:
            raise InvalidArgument(f"rounds must be >= 1, got {self.rounds}")
        if self.scenario.m != self.m:
            raise InvalidArgument("scenario.m must match config.m")

    @property
    def n_parties(self) -> int:
        return 2 * self.m


@dataclass(frozen=True)
class RoundRecord:
    bases: str  # one of "XY" per party, e.g. "XXYXXY"
    outcomes: Outcome  # +-1 per party
    sifted: bool
    basis_label: str  # "X", "Y", or "mixed"


@dataclass(frozen=True)
class ProtocolTranscript:
    config: ProtocolConfig
    records: tuple[RoundRecord, ...]
    alice_key: tuple[int, ...]
    bob_product_key: tuple[int, ...]
    sift_count: int


def _outcome_distributions(config: ProtocolConfig) -> dict[int, np.ndarray]:
    """Cumulative outcome distribution for every basis combination.

    Key: integer whose bit q (MSB first over parties) is 1 for sigma_y.
    Value: cumulative probabilities over the 2^(2m) party-outcome indices,
    marginalized over Evan's probe.
    """
    n_parties = config.n_parties
    psi = attacked_state(config.scenario).psi
    base = psi.amplitudes.reshape((2,) * psi.n_qubits)
    tables = {}
    for combo in range(2**n_parties):
        arr = base
        for q in range(n_parties):
            ax = "Y" if (combo >> (n_parties - 1 - q)) & 1 else "X"
            arr = _apply_one(arr, q, EIGENBASIS[ax].conj().T)
        probs = (np.abs(arr) ** 2).reshape(2**n_parties, 2).sum(axis=1)
        tables[combo] = np.cumsum(probs / probs.sum())
    return tables


def run_protocol(config: ProtocolConfig) -> ProtocolTranscript:
    """Simulate all rounds, sift, and derive both key strings."""
    n_parties = config.n_parties
    rng = np.random.default_rng(config.seed)
    basis_bits = rng.integers(0, 2, size=(config.rounds, n_parties))
    uniforms = rng.random(config.rounds)

    tables = _outcome_distributions(config)
    powers = 1 << np.arange(n_parties - 1, -1, -1)
    combos = basis_bits @ powers
    outcome_idx = np.empty(config.rounds, dtype=np.int64)
    for combo in np.unique(combos):
        sel = combos == combo
        outcome_idx[sel] = np.searchsorted(
            tables[int(combo)], uniforms[sel], side="right"
        )
    outcome_idx = np.minimum(outcome_idx, 2**n_parties - 1)

    shifts = np.arange(n_parties - 1, -1, -1)
    outcome_bits = (outcome_idx[:, None] >> shifts) & 1
    outcomes = 1 - 2 * outcome_bits

    # all-y rounds carry a carrier-dependent parity sign: the full-y
    # correlation is (-1)^(m+1) for the G carrier and (-1)^m for GHZ
    if config.scenario.carrier == "G":
        y_sign = (-1) ** (config.m + 1)
    else:
        y_sign = (-1) ** config.m
    records = []
    alice_key = []
    bob_key = []
    for r in range(config.rounds):
        bases = "".join("Y" if b else "X" for b in basis_bits[r])
        all_x = bases == "X" * n_parties
        all_y = bases == "Y" * n_parties
        sifted = all_x or all_y
        label = "X" if all_x else ("Y" if all_y else "mixed")
        outc = tuple(int(v) for v in outcomes[r])
        records.append(RoundRecord(bases, outc, sifted, label))
        if sifted:
            alice_key.append((1 - outc[0]) // 2)
            prod = int(np.prod(outc[1:]))
            if all_y:
                prod *= y_sign
            bob_key.append((1 - prod) // 2)
    return ProtocolTranscript(
        config,
        tuple(records),
        tuple(alice_key),
        tuple(bob_key),
        len(alice_key),
    )


def reconstruct_key(
    t: ProtocolTranscript,
) -> tuple[tuple[int, ...], tuple[int, ...], float]:
    """Alice's bits, the Bobs' cooperative reconstruction, and their error rate."""
    if t.sift_count == 0:
        raise EmptySiftedSet("transcript has no sifted rounds")
    errors = sum(a != b for a, b in zip(t.alice_key, t.bob_product_key))
    return t.alice_key, t.bob_product_key, errors / t.sift_count


def estimate_mutual_info(samples: Sequence[tuple[object, object]]) -> float:
    """Plug-in mutual information (bits) between paired labels and symbols."""
    if len(samples) < 2:
        raise InvalidArgument("need at least 2 samples")
    n = len(samples)
    joint = Counter(samples)
    left = Counter(x for x, _ in samples)
    right = Counter(y for _, y in samples)

    def _h(counts: Counter) -> float:
        return -sum((c / n) * math.log2(c / n) for c in counts.values())

    return _h(left) + _h(right) - _h(joint)


def coalition_info(t: ProtocolTranscript, subset: Iterable[int]) -> float:
    """Plug-in estimate of I(Alice's sifted bit : subset outcome tuple).

    ``subset`` holds Bob qubit indices (1 .. 2m-1) and must leave out at
    least one Bob; the all-Bobs case is key reconstruction, not a coalition.
    """
    bobs = set(range(1, t.config.n_parties))
    sub = sorted(set(subset))
    if not sub or not set(sub) <= bobs:
        raise InvalidArgument(f"subset must be a nonempty set of Bob indices {sorted(bobs)}")
    if set(sub) == bobs:
        raise InvalidArgument("subset must be proper; use reconstruct_key for all Bobs")
    if t.sift_count == 0:
        raise EmptySiftedSet("transcript has no sifted rounds")
    samples = []
    key_iter = iter(t.alice_key)
    for rec in t.records:
        if rec.sifted:
            a = next(key_iter)
            samples.append((a, tuple(rec.outcomes[q] for q in sub)))
    return estimate_mutual_info(samples)


def transcript_to_jsonl(t: ProtocolTranscript) -> Iterable[str]:
    """One JSON document per round."""
    for i, rec in enumerate(t.records):
        yield json.dumps(
            {
                "round": i,
                "bases": rec.bases,
                "outcomes": list(rec.outcomes),
                "sifted": rec.sifted,
            },
            separators=(",", ":"),
        )


def transcript_summary(
    t: ProtocolTranscript, coalition_subsets: Sequence[Sequence[int]] = ()
) -> dict:
    """Summary dictionary: sift count, error rate, coalition-information table."""
    _, _, error_rate = reconstruct_key(t)
    table = {
        ",".join(str(q) for q in sub): coalition_info(t, sub)
        for sub in coalition_subsets
    }
    return {
        "rounds": t.config.rounds,
        "sift_count": t.sift_count,
        "sift_rate": t.sift_count / t.config.rounds,
        "error_rate": error_rate,
        "coalition_info": table,
    }
