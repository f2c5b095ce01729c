import numpy as np
import pytest

from ionqec.params import (
    GateSpec,
    calibrate_gamma_in,
    ca40_lamb_dicke,
    load_scenario,
    stretched_time_s,
)


@pytest.fixture(scope="module")
def current():
    return load_scenario("current")


@pytest.fixture(scope="module")
def anticipated():
    return load_scenario("anticipated")


def test_scenarios_load_with_valid_fields(current, anticipated):
    for p in (current, anticipated):
        assert p.t2_s > 0
        for g in p.gates.values():
            assert g.duration_us > 0
            if g.infidelity is not None:
                assert 0 <= g.infidelity <= 1
    assert current.t2_s == pytest.approx(0.2)
    assert anticipated.t2_s == pytest.approx(2.0)
    assert current.gates["ms5"].duration_us == 60
    assert anticipated.gates["measurement"].infidelity == pytest.approx(1e-4)
    assert current.shuttling["split_merge"].axial == pytest.approx(6.0)


def test_bitflip_and_hiding_probabilities(current, anticipated):
    assert current.p_bitflip() == pytest.approx(6e-3)
    assert anticipated.p_hiding() == pytest.approx(9e-5)


def test_lamb_dicke_matches_stored_value(current):
    eta = ca40_lamb_dicke(current.omega_z)
    assert eta == pytest.approx(current.eta, rel=1e-5)
    assert eta == pytest.approx(0.082, abs=2e-3)


def test_stored_gamma_in_matches_calibration(current, anticipated):
    """The shipped constants are the output of the calibration operation;
    the single exception is the current single-species 5-ion family, pinned
    to zero so the model reproduces the per-mapping infidelities of the
    warm-crystal protocol."""
    got = calibrate_gamma_in(anticipated)
    for fam, val in anticipated.gamma_in.items():
        assert got[fam] == pytest.approx(val, rel=1e-3), fam
    got = calibrate_gamma_in(current)
    for fam, val in current.gamma_in.items():
        if fam == "ms5":
            assert val == 0.0
        else:
            assert got[fam] == pytest.approx(val, rel=1e-3), fam


def test_calibration_anchor_roundtrip(anticipated):
    # re-predicting the anchor row at the re-cool floor returns the table value
    from ionqec.noise import PhononLedger, ms_infidelity, stretched_gate_time

    ledger = PhononLedger.cold(range(5), anticipated.recool_floor)
    t = stretched_gate_time(anticipated, ledger, 5, "ms5", ions=range(5))
    eps = ms_infidelity(anticipated, ledger, 5, t, "ms5", ions=range(5))
    assert eps == pytest.approx(1e-3, rel=1e-3)


def test_stretched_time_formula():
    assert stretched_time_s(1.0, 0.0, 5, 0.1) == pytest.approx(1.002)
    assert stretched_time_s(1.0, 6.0, 5, 0.1) == pytest.approx(1.026)
    ts = [stretched_time_s(1.0, n, 5, 0.1) for n in np.linspace(0, 30, 10)]
    assert all(b > a for a, b in zip(ts, ts[1:]))


def test_overrides(current):
    p = current.with_overrides(reset_infidelity=1e-3)
    assert p.gates["reset"].infidelity == pytest.approx(1e-3)
    assert current.gates["reset"].infidelity == pytest.approx(5e-3)
    with pytest.raises(KeyError):
        current.with_overrides(nonsense=1)


def test_invalid_params_rejected(current):
    with pytest.raises(ValueError):
        current.with_overrides(t2_s=-1.0)
    with pytest.raises(ValueError):
        current.with_overrides(ms2_infidelity=1.5)
    with pytest.raises(ValueError):
        GateSpec(1.0, 0.5) and current.with_overrides(ms2_duration_us=-3)
