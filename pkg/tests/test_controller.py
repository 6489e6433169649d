import numpy as np
import pytest
from hypothesis import given, strategies as st

from cwm.conceptors import Conceptor, distance, or_
from cwm.controller import (
    ConceptorBank,
    ControllerPolicy,
    build_bank,
    collect_conceptor,
    measure_relaxation,
    nearest_in_bank,
    predict_relaxation,
    predict_relaxation_n,
    relaxation_outputs,
    run_gated_session,
)
from cwm.esn import EsnParams, ReservoirError, init_reservoir, run, step
from cwm.tasks import hold_sequence, level_grid, make_trace

GRID = [float(v) for v in level_grid(11)]


# relaxation formula

@pytest.mark.parametrize("c1,c2,v,expected", [
    (0.4, 0.4, 0.9, 0.4),
    (0.4, 0.4, -0.3, 0.4),
    (0.2, 0.6, 0.4, 0.6),
    (0.2, 0.6, -0.4, -0.6),
    (0.6, 0.8, 0.3, 0.0),
    (0.6, -0.6, 0.2, 0.6),
    (0.6, -0.6, -0.2, -0.6),
    (0.2, 0.6, 0.0, 0.0),
])
def test_predict_relaxation_examples(c1, c2, v, expected):
    assert predict_relaxation(c1, c2, v) == expected


def test_sign_of_zero_is_positive():
    assert predict_relaxation(0.6, -0.6, 0.0) == 0.6


@pytest.mark.parametrize("cs,v,expected", [
    ([0.4, 0.4, 0.4], -0.9, 0.4),
    ([0.2, 0.6, 0.8], 0.3, 0.8),
    ([0.6, -0.6], 0.2, 0.6),
    ([0.6, 0.8, 0.7], 0.3, 0.0),
    ([0.6, -0.6, 0.6], -0.1, -0.6),
])
def test_predict_relaxation_n_examples(cs, v, expected):
    assert predict_relaxation_n(cs, v) == expected


@given(st.sampled_from(GRID), st.sampled_from(GRID), st.sampled_from(GRID))
def test_prediction_symmetric_and_matches_n_ary(c1, c2, v):
    p = predict_relaxation(c1, c2, v)
    assert p == predict_relaxation(c2, c1, v)
    assert p == predict_relaxation_n([c1, c2], v)


def test_predict_n_needs_values():
    with pytest.raises(ValueError):
        predict_relaxation_n([], 0.1)


def test_measure_relaxation():
    assert measure_relaxation(np.full(1500, 0.4)) == pytest.approx(0.4)
    y = 0.6 + 0.1 * np.where(np.arange(2000) % 2 == 0, 1.0, -1.0)
    assert measure_relaxation(y) == pytest.approx(0.6)
    with pytest.raises(ValueError):
        measure_relaxation(np.zeros(10))


# bank and lookup

def test_bank_shape_and_tags(small_bank, small_model):
    assert len(small_bank) == 11
    np.testing.assert_array_equal(small_bank.values, level_grid(11))
    for m, C in small_bank:
        assert C.tag == m and C.source_len == 100 and C.n == small_model.n_neurons


def test_bank_is_deterministic_and_leaves_model_alone(small_model, small_bank):
    x_before = small_model.x.copy()
    again = build_bank(small_model, seed=11)
    assert np.array_equal(small_model.x, x_before)
    for (_, a), (_, b) in zip(small_bank, again):
        assert np.array_equal(a.matrix, b.matrix)


def test_bank_validation():
    C = Conceptor(np.eye(2) * 0.5)
    with pytest.raises(ValueError):
        ConceptorBank([(0.4, C), (0.2, C)])
    with pytest.raises(ValueError):
        ConceptorBank([(0.2, C), (0.4, Conceptor(np.eye(3) * 0.5))])


def test_build_bank_requires_training():
    with pytest.raises(ReservoirError):
        build_bank(init_reservoir(EsnParams(n_neurons=20, seed=1)))


def test_nearest_is_itself(small_bank):
    m, C = nearest_in_bank(small_bank, small_bank.get(0.4))
    assert m == 0.4 and C is small_bank.get(0.4)


def test_nearest_for_off_grid_hold(small_model, small_bank):
    C = collect_conceptor(small_model, 0.41, rng=5)
    m, _ = nearest_in_bank(small_bank, C)
    brute = min(small_bank, key=lambda e: distance(e[1], C))
    assert m == brute[0] == 0.4


def test_nearest_zero_matrix_matches_scan(small_bank, small_model):
    Z = np.zeros((small_model.n_neurons,) * 2)
    m, _ = nearest_in_bank(small_bank, Z)
    dists = [distance(C, Z) for C in small_bank.conceptors]
    assert m == small_bank.values[int(np.argmin(dists))]


def test_nearest_breaks_ties_to_smaller_value():
    C = Conceptor(np.eye(2) * 0.5)
    bank = ConceptorBank([(-0.2, Conceptor(np.eye(2) * 0.4)), (0.2, Conceptor(np.eye(2) * 0.6))])
    assert nearest_in_bank(bank, C)[0] == -0.2
    with pytest.raises(ValueError):
        nearest_in_bank(ConceptorBank([]), C)


# sessions

def test_policy_aliases_and_validation():
    assert ControllerPolicy(mode="snap").mode == "snap_to_bank"
    assert ControllerPolicy(mode="raw").mode == "store_raw"
    with pytest.raises(ValueError):
        ControllerPolicy(mode="bogus")
    with pytest.raises(ValueError):
        ControllerPolicy(collect_len=0)


def test_mode_none_equals_plain_run(small_model):
    trace = hold_sequence([0.3, -0.5], 300, rng=2)
    a, b = small_model.copy(), small_model.copy()
    session = run_gated_session(a, trace, ControllerPolicy(mode="none"))
    traj = run(b, trace.inputs)
    assert np.array_equal(session.y, traj.outputs[:, 0])
    assert np.array_equal(a.x, b.x)
    assert set(session.phase) == {"collecting", "idle"}


def test_snap_session_locks_to_grid(small_model, small_bank):
    trace = hold_sequence([0.41, -0.63], 600, rng=3)
    s = run_gated_session(small_model.copy(), trace, ControllerPolicy(mode="snap"), small_bank)
    assert s.phase[0] == "collecting" and s.phase[99] == "collecting" and s.phase[100] == "applying"
    assert s.conceptor_id[100] == "bank:0.4"
    tags = s.conceptor_tag[~np.isnan(s.conceptor_tag)]
    assert set(np.round(tags, 12)) <= set(np.round(level_grid(11), 12))
    assert abs(np.mean(s.y[400:600]) - 0.4) < 0.03
    assert abs(np.mean(s.y[1000:1200]) + 0.6) < 0.03
    assert [e[1] for e in s.events] == ["apply", "apply"]


def test_raw_session_keeps_value(small_model):
    trace = hold_sequence([0.55], 1500, rng=4)
    s = run_gated_session(small_model.copy(), trace, ControllerPolicy(mode="raw"))
    assert s.conceptor_id[200].startswith("raw:")
    assert np.max(np.abs(s.y[200:] - 0.55)) < 0.03


def test_trigger_during_collection_restarts(small_model):
    trace = make_trace(np.full(300, 0.2), np.r_[1, np.zeros(49), 1, np.zeros(249)], "original")
    s = run_gated_session(small_model.copy(), trace, ControllerPolicy(mode="raw"))
    assert s.events[0] == (50, "restart", None)
    assert s.phase[149] == "collecting" and s.phase[150] == "applying"


def test_snap_needs_bank(small_model):
    with pytest.raises(ValueError):
        run_gated_session(small_model.copy(), hold_sequence([0.1], 10, rng=0), ControllerPolicy())


def test_session_csv(small_model):
    s = run_gated_session(small_model.copy(), hold_sequence([0.1], 120, rng=0), ControllerPolicy(mode="raw"))
    lines = s.to_csv().splitlines()
    assert lines[0] == "step,V,T,y,phase,conceptor_tag"
    assert len(lines) == 121
    assert lines[1].split(",")[-1] == "" and lines[1].split(",")[4] == "collecting"


# relaxation runs

def test_zero_conceptor_holds_zero(small_model):
    bank = build_bank(small_model, values=[0.0], seed=1)
    y = relaxation_outputs(small_model, bank.get(0.0), [0.5, -0.7], 1500, rng=0)
    assert np.all(np.abs(y[-1000:]) < 0.05)


def test_disjunction_example(small_model, small_bank):
    C = or_(small_bank.get(0.2), small_bank.get(0.6))
    y = relaxation_outputs(small_model, C, [0.4], 2000, rng=0)
    assert abs(measure_relaxation(y[:, 0]) - predict_relaxation(0.2, 0.6, 0.4)) < 0.1


def test_relaxation_outputs_matches_sequential_session(small_model, small_bank):
    C = small_bank.get(0.4)
    y = relaxation_outputs(small_model, C, [0.4, -0.2], 50, rng=9)
    assert y.shape == (50, 2)
    rng = np.random.default_rng(9)
    dist = rng.uniform(-1, 1, (50, 2))
    for col, v in enumerate([0.4, -0.2]):
        m = small_model.copy()
        step(m, np.array([v, 1.0]))
        ys = [step(m, np.array([dist[k, col], 0.0]), C)[1][0] for k in range(50)]
        np.testing.assert_allclose(y[:, col], ys, atol=1e-12)
