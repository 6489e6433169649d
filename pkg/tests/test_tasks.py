import numpy as np
import pytest
from hypothesis import given, strategies as st

from cwm.tasks import (TaskSpec, discretize, generate_trace, hold_sequence, level_grid,
                       make_trace, single_hold_trace)


def test_discretize_examples():
    assert discretize(0.41) == 0.4
    assert discretize(-1.0) == -1.0
    assert discretize(0.5) == 0.6  # midpoint goes up
    assert discretize(1.0) == 1.0


def test_level_grid_exact_values():
    assert list(level_grid(11)) == [-1.0, -0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0]


@given(st.floats(-1, 1), st.integers(2, 40))
def test_discretize_properties(v, n_levels):
    d = discretize(v, n_levels)
    assert discretize(d, n_levels) == d
    assert abs(v - d) <= 1.0 / (n_levels - 1) + 1e-12
    # brute force nearest grid point
    grid = level_grid(n_levels)
    assert abs(v - d) <= np.min(np.abs(grid - v)) + 1e-12


def test_original_semantics():
    tr = make_trace([0.7, -0.2, 0.9], [1, 0, 0])
    assert list(tr.M) == [0.7, 0.7, 0.7]


def test_c2d_discretizes_target_only():
    # 0.7 is not an 11-level grid point; 0.71 snaps to 0.8
    tr = make_trace([0.71, -0.2, 0.9], [1, 0, 0], "c2d")
    assert list(tr.M) == [0.8, 0.8, 0.8]
    assert tr.V[0] == 0.71
    tr = make_trace([0.41, -0.2, 0.9], [1, 0, 0], "c2d")
    assert list(tr.M) == [0.4, 0.4, 0.4] and tr.V[0] == 0.41


def test_d2d_discretizes_input_and_target():
    tr = make_trace([0.71, -0.2, 0.9], [1, 0, 0], "D2D")
    assert tr.V[0] == 0.8 and list(tr.M) == [0.8, 0.8, 0.8]
    assert tr.V[1] == -0.2


@pytest.mark.parametrize("variant", ["original", "c2d", "d2d"])
def test_generated_trace_invariants(variant):
    tr = generate_trace(TaskSpec(n_steps=3000, trigger_prob=0.02, variant=variant, seed=5))
    assert tr.T[0] == 1
    changes = np.flatnonzero(np.diff(tr.M) != 0) + 1
    assert set(changes) <= set(tr.trigger_steps)
    assert np.all(np.abs(tr.V) <= 1) and np.all(np.abs(tr.M) <= 1)
    for n in tr.trigger_steps:
        expected = tr.V[n] if variant == "original" else discretize(tr.V[n])
        assert tr.M[n] == expected
        if variant == "d2d":
            assert tr.V[n] in set(level_grid(11))


def test_min_gap_respected():
    tr = generate_trace(TaskSpec(n_steps=5000, trigger_prob=0.5, min_gap=7, seed=2))
    assert np.min(np.diff(tr.trigger_steps)) >= 7


def test_generate_deterministic():
    a = generate_trace(TaskSpec(n_steps=500, seed=4))
    b = generate_trace(TaskSpec(n_steps=500, seed=4))
    assert np.array_equal(a.V, b.V) and np.array_equal(a.T, b.T)


def test_single_hold():
    tr = single_hold_trace(0.4, 100, rng=0)
    assert tr.T[0] == 1 and tr.T[1:].sum() == 0
    assert tr.V[0] == 0.4 and np.all(tr.M == 0.4)
    assert np.all(single_hold_trace(0.0, 10, rng=1).M == 0)
    with pytest.raises(ValueError):
        single_hold_trace(1.5, 10)


def test_concatenated_holds_form_valid_trace():
    tr = single_hold_trace(0.4, 50, rng=0) + single_hold_trace(-0.3, 50, rng=1)
    assert list(tr.trigger_steps) == [0, 50]
    assert np.all(tr.M[:50] == 0.4) and np.all(tr.M[50:] == -0.3)
    seq = hold_sequence([0.41, -0.33], 20, rng=3, variant="c2d")
    assert seq.M[0] == 0.4 and seq.M[20] == -0.4


def test_csv_export():
    tr = make_trace([0.5, 0.25], [1, 0])
    lines = tr.to_csv().splitlines()
    assert lines[0] == "step,V,T,M"
    assert lines[1] == "0,0.5,1,0.5" and lines[2] == "1,0.25,0,0.5"


def test_spec_validation():
    with pytest.raises(ValueError):
        TaskSpec(n_steps=10, n_levels=1)
    with pytest.raises(ValueError):
        TaskSpec(n_steps=10, trigger_prob=2)
    with pytest.raises(ValueError):
        TaskSpec(n_steps=10, variant="x2y")
