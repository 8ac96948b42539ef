"""Two-qubit entanglement witnesses with nonlinear count-based refinements.

The package prepares phase-tunable two-photon qubit states, evaluates a
linear witness together with its iterated nonlinear tightenings, simulates
the coincidence-count measurements that estimate them, and audits every
verdict against the partial-transpose criterion.
"""

from .errors import ConfigError, NumericalContractError, WitnessConstructionError
from .linalg import expect, partial_transpose_b, require_density
from .measurement import (
    CountRecord,
    EstimatedValue,
    estimate_witness,
    mc_error_bars,
    simulate_counts,
    simulate_witness_counts,
    stable_seed,
)
from .oracle import OracleVerdict, negativity, state_fidelity, tomography_linear
from .states import (
    BELL_LABELS,
    PreparedState,
    bell_state,
    dephase,
    make_anticorrelated,
    make_correlated,
    mix_white,
    prepare_via_prisms,
)
from .sweep import SweepConfig, SweepResult, default_phase_grid, run_sweep
from .witness import (
    SingularVerdict,
    WitnessSpec,
    bell_witness_spec,
    canonical_decomposition,
    required_measurements,
    w1,
    w2,
    w_infinity,
    witness_from_target,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ConfigError",
    "NumericalContractError",
    "WitnessConstructionError",
    "expect",
    "partial_transpose_b",
    "require_density",
    "CountRecord",
    "EstimatedValue",
    "estimate_witness",
    "mc_error_bars",
    "simulate_counts",
    "simulate_witness_counts",
    "stable_seed",
    "OracleVerdict",
    "negativity",
    "state_fidelity",
    "tomography_linear",
    "BELL_LABELS",
    "PreparedState",
    "bell_state",
    "dephase",
    "make_anticorrelated",
    "make_correlated",
    "mix_white",
    "prepare_via_prisms",
    "SweepConfig",
    "SweepResult",
    "default_phase_grid",
    "run_sweep",
    "SingularVerdict",
    "WitnessSpec",
    "bell_witness_spec",
    "canonical_decomposition",
    "required_measurements",
    "w1",
    "w2",
    "w_infinity",
    "witness_from_target",
]
