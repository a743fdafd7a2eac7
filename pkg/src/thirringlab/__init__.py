"""Numerical laboratory for the 1+1D Thirring model.

Closed-form massless solutions, a characteristic-lattice solver for the
massive system, L^p / H^s norm diagnostics, and reproducible experiments for
the ill-posedness phenomena below the scaling-critical regularity.
"""

from .errors import (
    ConfigError,
    DomainError,
    ResolutionError,
    SingularPointError,
    StepSizeError,
)
from .fields import (
    DataSpec,
    Region,
    SpinorSample,
    WaveCoords,
    classify,
    data_sample,
    data_sampler,
    dataspec_from_config,
    dataspec_to_config,
    from_wave,
    rescale_data,
    rescale_sampler,
    to_wave,
)
from .closed_forms import (
    EpsilonSequence,
    SequenceKind,
    cone_phases,
    epsilon_sequence,
    eval_exact,
    eval_exact_grid,
    eval_limit,
    eval_limit_grid,
    eval_limit_wave,
    phi_epsilon,
    write_field_table,
)
from .norms import (
    ConvergenceTable,
    Divergence,
    HsResult,
    LebesgueSpec,
    SobolevSpec,
    convergence_table,
    fourier_decay_sup,
    hs_norm,
    lp_distance,
    lp_norm,
)
from .solver import (
    CharacteristicMesh,
    ConeDiagnostics,
    RemainderBundle,
    a_functional,
    a_functional_curve,
    cone_charge,
    global_charge,
    load_mesh,
    phi_line_integrals,
    remainders,
    save_mesh,
    solve,
    write_snapshot_table,
)
from .experiments import (
    EXPERIMENT_IDS,
    ExperimentConfig,
    ExperimentReport,
    run_experiment,
)

__version__ = "0.1.0"
