"""Gated working-memory echo state network with conceptor long-term memory."""
from .conceptors import (
    Conceptor,
    and_,
    and_beta,
    aperture_adapt,
    conceptor_from_states,
    distance,
    lincomb,
    negate,
    or_,
    or_beta,
    spectrum,
)
from .controller import (
    ConceptorBank,
    ControllerPolicy,
    SessionTrace,
    build_bank,
    measure_relaxation,
    nearest_in_bank,
    predict_relaxation,
    predict_relaxation_n,
    run_gated_session,
)
from .esn import EsnModel, EsnParams, init_reservoir, run, spectral_radius, step
from .readout import TrainConfig, evaluate, train_offline, train_online
from .tasks import TaskSpec, TaskTrace, discretize, generate_trace, single_hold_trace

__version__ = "0.1.0"
