"""Biased constraint-aware search for gapped knapsack problems.

Library layout:

* ``instance``   problem model, generator, orderings, file I/O
* ``sampler``    sequential constrained sampling, biasing, look-ahead
* ``amplify``    amplification success math and the incumbent driver
* ``costs``      cycle/qubit model and modeled wall-clock conversion
* ``baselines``  brute force, simulated annealing, SDP + rounding
* ``bench``      configs, trajectory CSVs, sweeps, comparisons
* ``plotting``   figures from the CSV outputs
"""

from .instance import (
    GeneratorParams,
    InfeasibleGeneration,
    ItemOrdering,
    LinearConstraint,
    MfkpInstance,
    OrderingKind,
    ParseError,
    ValidationError,
    generate_instance,
    make_ordering,
    mfkp_constraints,
    minimizing_string,
    permute_solution_back,
    prefix_value,
    read_instance,
    reorder,
    write_instance,
)
from .sampler import (
    BiasSpec,
    LookaheadTables,
    SampleOutcome,
    StepKind,
    UnsatisfiableConstraint,
    bias_g,
    bias_g_values,
    bias_probability,
    branch_flags,
    distribution,
    lookahead_counts,
    lookahead_flags,
    path_probability,
    sample_multi,
    sample_multi_batch,
    sample_single,
    sample_single_batch,
)
from .amplify import (
    AAParams,
    BudgetSpec,
    ConstraintComparison,
    ExactLimitExceeded,
    NoFeasibleStart,
    QSearchResult,
    aa_success,
    cbqs_run,
    classical_success,
    exact_good_probability,
    greedy_incumbent,
    qsearch_expected_costs,
    qsearch_invocation_costs,
    simulate_qsearch,
    single_vs_both_constraints,
)
from .costs import (
    CostParams,
    CycleReport,
    copy_cycles,
    cycles_to_seconds,
    lookahead_biasing_cycles,
    lookahead_biasing_qubits,
    register_widths,
    stateprep_cycles,
)
from .baselines import (
    BruteForceResult,
    GramFactor,
    NoFeasibleSolution,
    QuadraticForm,
    SAConfig,
    SlackEncoding,
    brute_force,
    build_gw_qform,
    certified_upper_bound,
    gw_round,
    gw_solve,
    recommended_rank,
    simulated_annealing,
    slack_binarize,
    solve_sdp_lowrank,
)
from .trajectory import Trajectory, TrajectoryPoint

__version__ = "0.1.0"
