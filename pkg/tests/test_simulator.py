import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from packwalk.builder import CoinTable, WalkConfig, reference_table
from packwalk.circuit import Circuit, CircuitError, SizeError, WireLayout, mcx, not_gate, swap
from packwalk.kernels import apply_1q, apply_swap, apply_x, coin_unitary, rx
from packwalk.simulator import (MAX_DENSE_WIRES, Distribution, Histogram, StateVector,
                                ancilla_weight, apply_circuit, coin_operator_matrix,
                                direct_walk_oracle, position_distribution, propagate_basis,
                                run_walk, sample, shift_matrix)

angles = st.tuples(st.floats(0, np.pi), st.floats(0, np.pi),
                   st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi))


@pytest.mark.parametrize("args,expected", [
    ((0, 0, 0, 0), np.eye(2)),
    ((0, np.pi, 0, 0), [[0, -1], [1, 0]]),
    ((np.pi / 2, 0, 0, 0), 1j * np.eye(2)),
    ((0, 0, np.pi, 0), [[1, 0], [0, -1]]),
])
def test_coin_unitary_examples(args, expected):
    np.testing.assert_allclose(coin_unitary(*args), expected, atol=1e-15)


def test_coin_unitary_reference_entry():
    a, t, p, l = reference_table()[0]
    u = coin_unitary(a, t, p, l)
    c, s = np.cos(t / 2), np.sin(t / 2)
    expected = np.exp(1j * a) * np.array([[c, -np.exp(1j * l) * s],
                                          [np.exp(1j * p) * s, np.exp(1j * (p + l)) * c]])
    np.testing.assert_allclose(u, expected, atol=1e-15)


@settings(max_examples=100)
@given(angles)
def test_coin_unitary_is_unitary(a):
    u = coin_unitary(*a)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-12)


# ---------- kernels ----------

def tensor(index, w):
    psi = np.zeros(1 << w, dtype=complex)
    psi[index] = 1
    return psi.reshape((2,) * w)


def test_negative_control_mcx_kernel():
    psi = tensor(0b00, 2)
    apply_x(psi, 2, 0, [(1, False)])
    assert psi.reshape(-1)[0b01] == 1


def test_positive_control_blocks_on_zero():
    psi = tensor(0b00, 2)
    apply_x(psi, 2, 0, [(1, True)])
    assert psi.reshape(-1)[0b00] == 1


def test_swap_kernel():
    psi = tensor(0b001, 3)
    apply_swap(psi, 3, 0, 2)
    assert psi.reshape(-1)[0b100] == 1
    apply_swap(psi, 3, 0, 2, [(1, True)])
    assert psi.reshape(-1)[0b100] == 1


def test_1q_kernel_on_high_wire():
    psi = tensor(0, 3)
    apply_1q(psi, 3, 2, rx(np.pi))
    assert psi.reshape(-1)[0b100] == pytest.approx(-1j)


# ---------- state vectors ----------

def test_statevector_validation():
    with pytest.raises(ValueError):
        StateVector(np.zeros(4, dtype=complex), 2)
    with pytest.raises(ValueError):
        StateVector(np.ones(3, dtype=complex) / np.sqrt(3), 2)
    with pytest.raises(SizeError):
        StateVector.basis(MAX_DENSE_WIRES + 1)


def test_walker_state_index():
    lay = WireLayout(3, 1)
    s = StateVector.walker(lay, 5, 1)
    assert s.amplitudes[5 + 8] == 1
    with pytest.raises(ValueError):
        StateVector.walker(lay, 8, 0)


def test_apply_circuit_wire_mismatch():
    with pytest.raises(ValueError):
        apply_circuit(StateVector.basis(4), Circuit(WireLayout(1, 0)))


def test_apply_circuit_matches_sparse():
    lay = WireLayout(2, 1)
    c = Circuit(lay, (not_gate(0), mcx([0], 3), swap(3, 4, [0])))
    dense = apply_circuit(StateVector.basis(lay.n_wires, 0), c).amplitudes
    (idx, amp), = propagate_basis(c, 0).items()
    assert dense[idx] == amp == 1


# ---------- distributions and sampling ----------

def test_position_marginal_sums_coin_and_ancillas():
    lay = WireLayout(1, 0)
    amps = np.zeros(1 << lay.n_wires, dtype=complex)
    amps[0b0001] = amps[0b0011] = amps[0b0110] = 1 / np.sqrt(3)
    d = position_distribution(StateVector(amps, lay.n_wires), lay)
    np.testing.assert_allclose(d.probabilities, [1 / 3, 2 / 3])
    assert ancilla_weight(StateVector(amps, lay.n_wires), lay) == pytest.approx(1 / 3)


def test_distribution_rejects_non_normalized():
    with pytest.raises(ValueError):
        Distribution(np.array([0.5, 0.6]))


def test_sampling_point_mass():
    h = sample(Distribution(np.array([0, 0, 1.0, 0])), 1000, seed=1)
    assert h.counts.tolist() == [0, 0, 1000, 0]


def test_sampling_zero_shots():
    h = sample(Distribution(np.array([0.5, 0.5])), 0, seed=1)
    assert h.counts.tolist() == [0, 0] and h.frequencies().tolist() == [0, 0]


def test_sampling_negative_shots():
    with pytest.raises(ValueError):
        sample(Distribution(np.array([1.0])), -1, seed=0)


def test_sampling_deterministic_per_seed():
    d = Distribution(np.full(8, 1 / 8))
    assert np.array_equal(sample(d, 500, 3).counts, sample(d, 500, 3).counts)
    assert not np.array_equal(sample(d, 500, 3).counts, sample(d, 500, 4).counts)


@pytest.mark.parametrize("seed", range(5))
def test_sampling_within_five_sigma(seed):
    p = np.array([0.1, 0.2, 0.3, 0.4])
    shots = 20000
    h = sample(Distribution(p), shots, seed)
    sigma = np.sqrt(shots * p * (1 - p))
    assert np.all(np.abs(h.counts - shots * p) < 5 * sigma)


def test_histogram_checks_total():
    with pytest.raises(ValueError):
        Histogram(np.array([1, 2]), 4, 0)


def test_exports():
    d = Distribution(np.array([0.25, 0.75]))
    assert json.loads(d.to_json()) == {"0": 0.25, "1": 0.75}
    assert d.to_csv() == "position,value\n0,0.25\n1,0.75\n"
    h = Histogram(np.array([3, 1]), 4, 9)
    assert json.loads(h.to_json()) == {"0": 3, "1": 1}
    assert h.to_csv().splitlines()[1:] == ["0,3", "1,1"]


# ---------- oracle ----------

def test_oracle_identity_coins_moves_left():
    # coin 0 decrements: three steps from 0 on 8 sites lands on 5
    out = direct_walk_oracle(3, CoinTable.identity(3), 3)
    assert abs(out.amplitudes[5]) == pytest.approx(1)


def test_oracle_zero_steps_is_initial():
    out = direct_walk_oracle(2, CoinTable.random(2, 0), 0)
    assert out.amplitudes[0] == 1


def test_oracle_matches_matrix_product():
    n, coins = 3, CoinTable.random(3, 8)
    step = shift_matrix(n) @ coin_operator_matrix(n, coins)
    psi = np.zeros(16, dtype=complex)
    psi[3] = 1
    want = np.linalg.matrix_power(step, 7) @ psi
    got = direct_walk_oracle(n, coins, 7, StateVector(psi, 4)).amplitudes
    np.testing.assert_allclose(got, want, atol=1e-13)


def test_oracle_rejects_wrong_width():
    with pytest.raises(ValueError):
        direct_walk_oracle(2, CoinTable.identity(2), 1, StateVector.basis(4))


def test_coin_operator_matrix_block_layout():
    coins = CoinTable.random(1, 2)
    mat = coin_operator_matrix(1, coins)
    c1 = coin_unitary(*coins[1])
    # site 1, coin 1 sits at index 1 + 2
    assert mat[1 + 2, 1] == c1[1, 0]
    assert mat[0, 1] == 0


# ---------- circuit walk ----------

def test_run_walk_matches_oracle_reference_table():
    coins = reference_table()
    cfg = WalkConfig(3, 1, coins, steps=20)
    got = position_distribution(run_walk(cfg), cfg.layout).probabilities
    want = position_distribution(direct_walk_oracle(3, coins, 20), WireLayout(3, 0)).probabilities
    assert np.max(np.abs(got - want)) < 1e-12


def test_run_walk_initial_state():
    coins = CoinTable.identity(2)
    cfg = WalkConfig(2, 0, coins, steps=1)
    out = run_walk(cfg, position=1, coin=1)
    assert abs(out.amplitudes[2 + 4]) == pytest.approx(1)


def test_run_walk_size_guard():
    with pytest.raises(SizeError):
        run_walk(WalkConfig(5, 5, CoinTable.identity(5)))


def test_run_walk_detects_leaking_ancilla(monkeypatch):
    import packwalk.simulator as sim
    lay = WireLayout(1, 0)
    monkeypatch.setattr(sim, "build_walk_step", lambda cfg: Circuit(lay, (not_gate(lay.s(0) + 1),)))
    with pytest.raises(CircuitError):
        run_walk(WalkConfig(1, 0, CoinTable.identity(1)))
