"""stvlab: STV elections, single-manipulator search, and Monte-Carlo experiments."""

from .core import (
    MAX_INDEX,
    Ballot,
    ElectionOutcome,
    Profile,
    RoundRecord,
    TieRule,
    eliminate_choice,
    stv_winner,
    tally,
    top_among,
)
from .solver import (
    Decision,
    LimitExceededError,
    ManipulationInstance,
    SearchLimits,
    SearchResult,
    brute_force_manipulate,
    manipulate_single,
    verify_witness,
    winnable_set,
)
from .votegen import (
    IC,
    BaseProfile,
    Distribution,
    Resample,
    Urn,
    aggregate_profile,
    builtin_bases,
    ic_sample,
    resample_candidates,
    resample_voters,
    rng_from_seed,
    sample,
    urn_sample,
)
from .experiments import (
    DEFAULT_LIMITS,
    POWERS_OF_TWO,
    FitResult,
    GridConfig,
    PointResult,
    TrialResult,
    fit_exponential,
    run_grid,
    run_point,
    run_trial,
    summarize,
    trial_instance,
)
from .fileio import (
    ProfileParseError,
    parse_profile,
    read_profile_file,
    read_results_csv,
    write_profile,
    write_profile_file,
    write_results_csv,
)

__version__ = "0.1.0"
