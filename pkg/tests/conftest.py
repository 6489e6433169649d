import numpy as np
import pytest

from cwm.controller import build_bank
from cwm.esn import EsnParams, init_reservoir
from cwm.readout import TrainConfig, train_offline
from cwm.tasks import TaskSpec, generate_trace


def random_conceptor_matrix(rng, n, n_states=None, aperture=10.0):
    """Independent construction through an explicit eigendecomposition of R."""
    n_states = n_states or 2 * n
    X = rng.standard_normal((n, n_states)) * rng.uniform(0.05, 1.0, (n, 1))
    s, U = np.linalg.eigh(X @ X.T)
    s = np.clip(s, 0.0, None)
    return (U * (s / (s + 1.0 / aperture))) @ U.T


def trained_model(n_neurons=200, seed=3, n_train=15000, variant="original"):
    model = init_reservoir(EsnParams(n_neurons=n_neurons, seed=seed))
    trace = generate_trace(TaskSpec(n_steps=n_train, variant=variant, seed=seed + 1000))
    return train_offline(model, trace, TrainConfig(n_train_steps=n_train))


@pytest.fixture(scope="session")
def small_model():
    return trained_model()


@pytest.fixture(scope="session")
def small_bank(small_model):
    return build_bank(small_model, seed=11)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record one acceptance line; printed again in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def _report(number: int, ok: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append((number, line))
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
