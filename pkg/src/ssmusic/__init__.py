"""Joint sparse recovery with semi-supervised MUSIC, baselines and a Monte-Carlo harness."""

from .baselines import imusic, ra_ormp, sa_music, scosamp, somp
from .errors import (
    ConfigError,
    DegenerateStateError,
    InvalidInputError,
    NoSignalError,
    RankDeficiencyError,
)
from .harness import EnsembleSpec, generate_problem, iteration_histogram, phase_transition, run_sweep
from .linalg import (
    SubspaceBasis,
    complement_project,
    least_squares,
    numerical_rank,
    orthonormal_basis,
    project,
)
from .model import JsrProblem, fitness, labels_of, nsc_classify, support_of
from .noise import estimate_signal_subspace, ss_music_noisy
from .solver import SolveResult, SsMusicConfig, candidate_step, music, refine_training_set, ss_music

__version__ = "0.1.0"
