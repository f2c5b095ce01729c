"""Symbolic error-frame engine and its agreement with the statevector."""

import math

import numpy as np
import pytest

from ionqec.engine import StateVectorExecutor, igor_correct, run_cycle
from ionqec.gadgets import build_gadget
from ionqec.params import load_scenario
from ionqec.pauli import PauliString
from ionqec.pauliframe import PauliFrameExecutor, ideal_outcome_tree
from ionqec.schedule import build_schedule


@pytest.fixture(scope="module")
def current():
    return load_scenario("current")


# ----------------------------------------------------------------------
# residual-logical success analysis
# ----------------------------------------------------------------------

def _frame_with(sched_or_n, pauli, alpha, beta):
    ex = PauliFrameExecutor(sched_or_n, alpha, beta)
    ex.pauli(pauli)
    return ex


def test_single_qubit_error_is_corrected(current):
    sched = build_schedule("A2", current)
    for letter in "XYZ":
        for q in range(7):
            ex = _frame_with(sched, PauliString.from_label(letter, (q,)), 0.6, 0.8)
            assert ex.success(0.6, 0.8) == pytest.approx(1.0, abs=1e-12)


def test_logical_x_frame_separates_the_codewords(current):
    sched = build_schedule("A2", current)
    x_l = PauliString.from_label("X" * 7, range(7))
    assert _frame_with(sched, x_l, 1.0, 0.0).success(1.0, 0.0) == \
        pytest.approx(0.0, abs=1e-12)
    r = 2 ** -0.5
    assert _frame_with(sched, x_l, r, r).success(r, r) == \
        pytest.approx(1.0, abs=1e-12)


def test_weight_two_error_decodes_to_a_logical(current):
    # X0 X1 shares a syndrome with X4; the correction leaves X0X1X4, which
    # is the logical X times a plaquette
    sched = build_schedule("A2", current)
    p = PauliString.from_label("XX", (0, 1))
    assert _frame_with(sched, p, 1.0, 0.0).success(1.0, 0.0) == \
        pytest.approx(0.0, abs=1e-12)
    r = 2 ** -0.5
    assert _frame_with(sched, p, r, r).success(r, r) == \
        pytest.approx(1.0, abs=1e-12)


def test_success_matches_dense_fidelity_for_random_amplitudes(current):
    # |<psi| P |psi>|^2 for the residual logical, against direct evaluation
    sched = build_schedule("A2", current)
    rng = np.random.default_rng(9)
    for _ in range(20):
        phi = rng.random(3) * 2 * math.pi
        alpha = math.cos(phi[0]) * complex(math.cos(phi[1]), math.sin(phi[1]))
        beta = 1j * math.sin(phi[0]) * complex(math.sin(phi[2]), math.cos(phi[2]))
        p = PauliString.from_label("X" * 7, range(7))
        got = _frame_with(sched, p, alpha, beta).success(alpha, beta)
        v = np.array([alpha, beta])
        want = abs(np.conj(v) @ np.array([[0, 1], [1, 0]]) @ v) ** 2
        assert got == pytest.approx(float(want), abs=1e-12)


# ----------------------------------------------------------------------
# ideal measurement branch structure
# ----------------------------------------------------------------------

def test_tree_for_deterministic_gadgets():
    tree = ideal_outcome_tree(build_gadget("MultiQubitMS", 0, "x"))
    assert tree[()] == pytest.approx(1.0, abs=1e-9)  # M0 reads +1


def test_tree_for_verified_ghz_gadget():
    tree = ideal_outcome_tree(build_gadget("DVS", 1, "z"))
    assert tree[()] == pytest.approx(1.0, abs=1e-9)        # verification passes
    assert tree[(1,)] == pytest.approx(0.5, abs=1e-9)      # M1 is a fair coin
    # every branch probability is 0, 1/2 or 1, and the M4 outcome is
    # determined by the earlier three
    for prefix, p0 in tree.items():
        assert min(abs(p0 - v) for v in (0.0, 0.5, 1.0)) < 1e-9
        if len(prefix) == 4:
            assert p0 in (pytest.approx(0.0, abs=1e-9), pytest.approx(1.0, abs=1e-9))


def test_tree_for_decoded_ghz_gadget():
    tree = ideal_outcome_tree(build_gadget("DVA", 0, "x"))
    assert tree[()] == pytest.approx(0.5, abs=1e-9)   # M1 fair coin
    for m1 in (1, -1):
        # M2 = -M1, then the checks read (-1, +1)
        assert tree[(m1,)] == pytest.approx(0.5 - m1 / 2.0, abs=1e-9)
        assert tree[(m1, -m1)] == pytest.approx(0.0, abs=1e-9)
        assert tree[(m1, -m1, -1)] == pytest.approx(1.0, abs=1e-9)


# ----------------------------------------------------------------------
# cross-engine agreement
# ----------------------------------------------------------------------

def _both_engines(protocol, params, seed, alpha, beta, lam=1.0):
    results = []
    for make in (StateVectorExecutor, PauliFrameExecutor):
        sched = build_schedule(protocol, params)
        arg = sched.n_qubits if make is StateVectorExecutor else sched
        ex = make(arg, alpha, beta)
        rng = np.random.default_rng(seed)
        out = run_cycle(sched, params, ex, rng, lam=lam)
        if not out.discarded:
            igor_correct(ex, out.syndrome)
        succ = None if out.discarded else ex.success(alpha, beta)
        results.append((out.syndrome, out.outcomes, out.restarts,
                        out.discarded, succ))
    return results


@pytest.mark.parametrize("protocol", ["A1", "A2", "A3", "A4", "B1", "B2"])
def test_engines_agree_on_noisy_cycles(protocol, current):
    rng = np.random.default_rng(123)
    for _ in range(12):
        phi = rng.random(3) * 2 * math.pi
        alpha = math.cos(phi[0]) * complex(math.cos(phi[1]), math.sin(phi[1]))
        beta = 1j * math.sin(phi[0]) * complex(math.sin(phi[2]), math.cos(phi[2]))
        seed = int(rng.integers(1 << 30))
        sv, pf = _both_engines(protocol, current, seed, alpha, beta)
        assert sv[:4] == pf[:4]
        if sv[4] is not None:
            assert sv[4] == pytest.approx(pf[4], abs=1e-9)


def test_engines_agree_under_amplified_noise(current):
    # lambda > 1 exercises dense fault configurations
    sv, pf = _both_engines("B2", current, 424242, 2 ** -0.5, 2 ** -0.5, lam=3.0)
    assert sv[:4] == pf[:4]
    if sv[4] is not None:
        assert sv[4] == pytest.approx(pf[4], abs=1e-9)
