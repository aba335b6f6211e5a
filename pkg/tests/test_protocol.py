"""Monte Carlo protocol rounds, sifting, keys, and information estimates."""

import json
import math

import numpy as np
import pytest

from qss.attack import AttackScenario, binary_entropy
from qss.errors import EmptySiftedSet, InvalidArgument
from qss.protocol import (
    ProtocolConfig,
    ProtocolTranscript,
    RoundRecord,
    coalition_info,
    estimate_mutual_info,
    reconstruct_key,
    run_protocol,
    transcript_summary,
    transcript_to_jsonl,
)


def make_transcript(carrier="G", m=3, rounds=1000, phi=0.0, seed=2024):
    config = ProtocolConfig(m, rounds, AttackScenario(carrier, m, phi), seed)
    return run_protocol(config)


@pytest.fixture(scope="module")
def clean_run():
    """phi = 0, M = 3, 10^5 rounds: the reference no-attack transcript."""
    return make_transcript(rounds=100_000)


@pytest.fixture(scope="module")
def crossover_run():
    """phi = pi/4, M = 3, 10^5 rounds."""
    return make_transcript(rounds=100_000, phi=math.pi / 4)


class TestConfigValidation:
    def test_m_too_small(self):
        with pytest.raises(InvalidArgument):
            ProtocolConfig(1, 10, AttackScenario("G", 1, 0.0), 0)

    def test_scenario_mismatch(self):
        with pytest.raises(InvalidArgument):
            ProtocolConfig(3, 10, AttackScenario("G", 2, 0.0), 0)

    def test_zero_rounds(self):
        with pytest.raises(InvalidArgument):
            ProtocolConfig(2, 0, AttackScenario("G", 2, 0.0), 0)


class TestDeterminism:
    def test_same_seed_same_transcript(self):
        t1 = make_transcript(rounds=500, seed=42)
        t2 = make_transcript(rounds=500, seed=42)
        assert t1.records == t2.records
        assert t1.alice_key == t2.alice_key
        assert t1.bob_product_key == t2.bob_product_key

    def test_different_seed_different_rounds(self):
        t1 = make_transcript(rounds=500, seed=1)
        t2 = make_transcript(rounds=500, seed=2)
        assert t1.records != t2.records


class TestSiftingAndParity:
    def test_parity_holds_in_every_sifted_round(self, clean_run):
        m = clean_run.config.m
        y_sign = (-1) ** (m + 1)
        checked = 0
        for rec in clean_run.records:
            if not rec.sifted:
                continue
            prod = int(np.prod(rec.outcomes))
            expected = 1 if rec.basis_label == "X" else y_sign
            assert prod == expected
            checked += 1
        assert checked == clean_run.sift_count

    def test_sift_rate_matches_expectation(self, clean_run):
        n_parties = clean_run.config.n_parties
        p = 2.0 ** (1 - n_parties)  # all-x or all-y out of 2^n combinations
        n = clean_run.config.rounds
        se = math.sqrt(p * (1 - p) / n)
        assert abs(clean_run.sift_count / n - p) < 5 * se

    def test_mixed_rounds_not_sifted(self, clean_run):
        for rec in clean_run.records[:2000]:
            assert rec.sifted == (rec.basis_label in ("X", "Y"))
            assert (len(set(rec.bases)) == 1) == rec.sifted

    def test_ghz_carrier_parity(self):
        t = make_transcript(carrier="GHZ", m=2, rounds=20_000)
        y_sign = (-1) ** t.config.m
        for rec in t.records:
            if rec.sifted:
                expected = 1 if rec.basis_label == "X" else y_sign
                assert int(np.prod(rec.outcomes)) == expected

    def test_m2_parity_sign_flips(self):
        # M = 2: the all-y product is -1, so Bob's key still matches Alice's
        t = make_transcript(m=2, rounds=20_000)
        _, _, err = reconstruct_key(t)
        assert err == 0.0


class TestKeyReconstruction:
    def test_error_free_without_attack(self, clean_run):
        alice, bob, err = reconstruct_key(clean_run)
        assert err == 0.0
        assert alice == bob
        assert len(alice) == clean_run.sift_count

    def test_qber_at_crossover(self, crossover_run):
        _, _, err = reconstruct_key(crossover_run)
        p = (1.0 - math.cos(math.pi / 4)) / 2.0
        se = math.sqrt(p * (1 - p) / crossover_run.sift_count)
        assert abs(err - p) < 5 * se

    def test_full_interception_randomizes(self):
        t = make_transcript(rounds=30_000, phi=math.pi / 2)
        _, _, err = reconstruct_key(t)
        se = math.sqrt(0.25 / t.sift_count)
        assert abs(err - 0.5) < 5 * se

    def test_error_rate_monotone_in_phi(self):
        errs = []
        for phi in (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2):
            t = make_transcript(rounds=30_000, phi=phi, seed=7)
            errs.append(reconstruct_key(t)[2])
        assert all(a < b for a, b in zip(errs, errs[1:]))

    def test_empty_sifted_set(self):
        base = make_transcript(rounds=10)
        mixed = RoundRecord("XXYXXY", (1,) * 6, False, "mixed")
        empty = ProtocolTranscript(base.config, (mixed,), (), (), 0)
        with pytest.raises(EmptySiftedSet):
            reconstruct_key(empty)


class TestMutualInfoEstimator:
    def test_perfectly_correlated(self):
        samples = [(b, b) for b in (0, 1) * 500]
        assert estimate_mutual_info(samples) == pytest.approx(1.0, abs=1e-12)

    def test_constant_symbol(self):
        samples = [(b, "fixed") for b in (0, 1) * 500]
        assert estimate_mutual_info(samples) == pytest.approx(0.0, abs=1e-12)

    def test_independent_near_zero(self):
        rng = np.random.default_rng(5)
        n = 100_000
        xs = rng.integers(0, 2, n)
        ys = rng.integers(0, 2, n)
        # plug-in estimator bias for a 2x2 table is about 3/(2 n ln 2)
        assert estimate_mutual_info(list(zip(xs, ys))) < 3.0 / (n * math.log(2))

    def test_needs_samples(self):
        with pytest.raises(InvalidArgument):
            estimate_mutual_info([(0, 0)])


class TestCoalitionInfo:
    def test_rejects_all_bobs(self, clean_run):
        with pytest.raises(InvalidArgument):
            coalition_info(clean_run, range(1, 6))

    def test_rejects_non_bob_indices(self, clean_run):
        with pytest.raises(InvalidArgument):
            coalition_info(clean_run, [0, 1])

    def test_single_bob_learns_residual_correlation(self, clean_run):
        # a single Bob's sifted outcome is correlated with Alice's bit at
        # strength 1/3 on the 6-qubit carrier, i.e. about 1 - H(2/3) bits
        info = coalition_info(clean_run, [1])
        analytic = 1.0 - binary_entropy(2.0 / 3.0)
        assert abs(info - analytic) < 0.03
        assert info > 0.02

    def test_ghz_single_bob_learns_nothing(self):
        t = make_transcript(carrier="GHZ", m=3, rounds=100_000)
        assert coalition_info(t, [3]) < 0.02

    def test_coalition_info_grows_with_size(self, clean_run):
        sizes = [
            coalition_info(clean_run, list(range(1, 1 + k))) for k in (1, 2, 4)
        ]
        assert sizes[0] < sizes[1] < sizes[2]
        # and stays strictly below the full bit Alice holds
        assert sizes[2] < 1.0

    def test_no_signaling_marginals(self, clean_run):
        # every party's raw outcome is unbiased regardless of phi
        outcomes = np.array([rec.outcomes for rec in clean_run.records])
        n = outcomes.shape[0]
        for q in range(outcomes.shape[1]):
            mean = outcomes[:, q].mean()
            assert abs(mean) < 5.0 / math.sqrt(n)


class TestTranscriptExport:
    def test_jsonl_round_shape(self):
        t = make_transcript(rounds=20)
        lines = list(transcript_to_jsonl(t))
        assert len(lines) == 20
        doc = json.loads(lines[3])
        assert doc["round"] == 3
        assert set(doc) == {"round", "bases", "outcomes", "sifted"}
        assert len(doc["bases"]) == 6
        assert all(o in (-1, 1) for o in doc["outcomes"])

    def test_summary_fields(self):
        t = make_transcript(rounds=5000, seed=11)
        summary = transcript_summary(t, [(1,), (1, 2)])
        assert summary["rounds"] == 5000
        assert summary["sift_count"] == t.sift_count
        assert summary["error_rate"] == 0.0
        assert set(summary["coalition_info"]) == {"1", "1,2"}
