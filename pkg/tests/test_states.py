"""Carrier-state constructors, collapse branches, noise, serialization."""

import functools
import itertools

import numpy as np
import pytest

from qss.errors import InvalidArgument
from qss.qsim import PauliString, expectation
from qss.states import (
    add_white_noise,
    carrier_state,
    g_state,
    ghz_state,
    make_carrier_branches,
    state_from_json,
    state_to_json,
    v_states,
    w_state,
    wbar_state,
    xi_states,
)


class TestWStates:
    def test_w3_amplitudes(self):
        amps = w_state(3).amplitudes
        expected = np.zeros(8)
        expected[[1, 2, 4]] = 1.0 / np.sqrt(3.0)
        assert np.abs(amps - expected).max() < 1e-12

    def test_wbar2_amplitudes(self):
        amps = wbar_state(2).amplitudes
        expected = np.zeros(4)
        expected[[1, 2]] = 1.0 / np.sqrt(2.0)
        assert np.abs(amps - expected).max() < 1e-12

    def test_w4_wbar4_orthogonal(self):
        assert abs(np.vdot(w_state(4).amplitudes, wbar_state(4).amplitudes)) < 1e-12

    @pytest.mark.parametrize("n", [5, 6, 7, 8])
    def test_g_overlaps_with_both_components(self, n):
        g = g_state(n).amplitudes
        assert np.vdot(w_state(n).amplitudes, g).real == pytest.approx(
            1.0 / np.sqrt(2.0), abs=1e-10
        )
        assert np.vdot(wbar_state(n).amplitudes, g).real == pytest.approx(
            1.0 / np.sqrt(2.0), abs=1e-10
        )

    def test_minimum_size(self):
        with pytest.raises(InvalidArgument):
            w_state(1)


class TestGState:
    def test_g2_is_bell_state(self):
        amps = g_state(2).amplitudes
        expected = np.zeros(4)
        expected[[1, 2]] = 1.0 / np.sqrt(2.0)
        assert np.abs(amps - expected).max() < 1e-12

    def test_g4_from_x_product_states(self):
        # independent construction via np.kron of single-qubit x eigenvectors
        plus = np.array([1.0, 1.0]) / np.sqrt(2.0)
        minus = np.array([1.0, -1.0]) / np.sqrt(2.0)
        kron4 = lambda v: functools.reduce(np.kron, [v] * 4)
        expected = (kron4(plus) - kron4(minus)) / np.sqrt(2.0)
        actual = g_state(4).amplitudes
        phase = np.vdot(expected, actual)
        phase /= abs(phase)
        assert np.abs(actual - phase * expected).max() < 1e-10

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_all_x_correlation(self, m):
        n = 2 * m
        assert expectation(g_state(n), PauliString.uniform("X", n)) == pytest.approx(
            1.0, abs=1e-10
        )

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_all_y_correlation_alternates(self, m):
        n = 2 * m
        assert expectation(g_state(n), PauliString.uniform("Y", n)) == pytest.approx(
            (-1.0) ** (m + 1), abs=1e-10
        )

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_all_y_vanishes_for_odd_n(self, n):
        assert expectation(g_state(n), PauliString.uniform("Y", n)) == pytest.approx(
            0.0, abs=1e-10
        )

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_permutation_symmetric(self, n):
        tensor = g_state(n).amplitudes.reshape((2,) * n)
        for i, j in itertools.combinations(range(n), 2):
            swapped = np.swapaxes(tensor, i, j)
            assert np.abs(swapped - tensor).max() < 1e-12

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_invariant_under_global_flip(self, n):
        tensor = g_state(n).amplitudes.reshape((2,) * n)
        flipped = tensor[(slice(None, None, -1),) * n]
        assert np.abs(flipped - tensor).max() < 1e-12


class TestGHZState:
    def test_amplitudes(self):
        amps = ghz_state(3).amplitudes
        expected = np.zeros(8)
        expected[[0, 7]] = 1.0 / np.sqrt(2.0)
        assert np.abs(amps - expected).max() < 1e-12

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_all_z_correlation(self, n):
        assert expectation(ghz_state(n), PauliString.uniform("Z", n)) == pytest.approx(
            1.0, abs=1e-10
        )


class TestBranchStates:
    def test_m1_degenerate_pair(self):
        xi, xibar = xi_states(1)
        assert np.abs(xi.amplitudes - [0.0, 1.0]).max() < 1e-12
        assert np.abs(xibar.amplitudes - [1.0, 0.0]).max() < 1e-12

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_branches_orthonormal(self, m):
        xi, xibar = xi_states(m)
        assert abs(np.vdot(xi.amplitudes, xibar.amplitudes)) < 1e-12
        assert np.linalg.norm(xi.amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_xi_m2_explicit(self):
        # (|100> + |010> + |001> + |111>)/2
        xi, _ = xi_states(2)
        expected = np.zeros(8)
        expected[[4, 2, 1, 7]] = 0.5
        assert np.abs(xi.amplitudes - expected).max() < 1e-12

    def test_xibar_is_bit_flip_of_xi(self):
        xi, xibar = xi_states(3)
        k = xi.n_qubits
        flipped = xi.amplitudes.reshape((2,) * k)[(slice(None, None, -1),) * k]
        assert np.abs(flipped.reshape(-1) - xibar.amplitudes).max() < 1e-12

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_v_states_reconstruct_carrier(self, n):
        # (1/sqrt 2)(|v0>|0> + |v1>|1>) on qubits (1..n-1, n) reassembled
        # qubit-0-last must equal g_state(n) with qubit 0 moved to the end;
        # equivalently |g_n> = (1/sqrt 2)(|0>|v0'>...) -- check via direct
        # index arithmetic: amplitude of |b, y> is v_b[y]/sqrt(2)
        v0, v1 = v_states(n)
        g = g_state(n).amplitudes
        half = 2 ** (n - 1)
        assert np.abs(g[:half] - v0.amplitudes / np.sqrt(2.0)).max() < 1e-12
        assert np.abs(g[half:] - v1.amplitudes / np.sqrt(2.0)).max() < 1e-12

    def test_ghz_branches_are_basis_states(self):
        b0, b1 = make_carrier_branches("GHZ", 3)
        assert np.argmax(np.abs(b0.amplitudes)) == 0
        assert np.argmax(np.abs(b1.amplitudes)) == 31
        assert abs(np.vdot(b0.amplitudes, b1.amplitudes)) < 1e-12

    def test_unknown_carrier(self):
        with pytest.raises(InvalidArgument):
            make_carrier_branches("cluster", 2)

    def test_carrier_state_dispatch(self):
        assert np.abs(
            carrier_state("G", 4).amplitudes - g_state(4).amplitudes
        ).max() < 1e-12
        assert np.abs(
            carrier_state("GHZ", 4).amplitudes - ghz_state(4).amplitudes
        ).max() < 1e-12


class TestWhiteNoise:
    def test_full_visibility(self):
        s = g_state(2)
        noisy = add_white_noise(s, 1.0)
        assert np.abs(noisy.realized.matrix - s.density().matrix).max() < 1e-12

    def test_zero_visibility(self):
        noisy = add_white_noise(g_state(2), 0.0)
        assert np.abs(noisy.realized.matrix - np.eye(4) / 4).max() < 1e-12

    def test_out_of_range(self):
        with pytest.raises(InvalidArgument):
            add_white_noise(g_state(2), 1.5)

    def test_convex_combination(self):
        s = g_state(3)
        p = 0.37
        noisy = add_white_noise(s, p)
        expected = p * s.density().matrix + (1 - p) * np.eye(8) / 8
        assert np.abs(noisy.realized.matrix - expected).max() < 1e-12


class TestSerialization:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_round_trip_bit_exact(self, n):
        s = g_state(n)
        back = state_from_json(state_to_json(s))
        assert back.n_qubits == n
        assert np.array_equal(back.amplitudes, s.amplitudes)

    def test_complex_amplitudes_survive(self):
        from qss.qsim import PureState

        amps = np.array([0.6, 0.8j])
        s = PureState.from_amplitudes(amps)
        back = state_from_json(state_to_json(s))
        assert np.array_equal(back.amplitudes, s.amplitudes)
