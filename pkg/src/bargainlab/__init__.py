"""Three-player majority bargaining under recognition-order disclosure:
exact equilibrium solving, proposal optimization under threshold uncertainty,
seeded simulation, and an empirical analysis pipeline."""

__version__ = "0.1.0"

from .game import (
    Allocation,
    Disclosure,
    DisclosureKind,
    GameSpec,
    InfoProtocol,
    InfoState,
    MatchLog,
    RecognitionModel,
    RoundRecord,
    TerminalKind,
    allocation_gini,
    enumerate_info_states,
    points_to_fraction,
    read_match_logs,
    validate_spec,
    write_match_logs,
)
from .solver import (
    Condition,
    EquilibriumSolution,
    PartnerClass,
    classify_partner,
    continuation_values,
    predicted_first_share,
    predicted_share_table,
    solve,
    worked_example_check,
)
from .beliefs import (
    Antithetic,
    Comonotone,
    DiscreteThresholds,
    GaussianCopulaUniform,
    IndependentUniform,
    MixtureThresholds,
    OfferOptimum,
    ThresholdBelief,
    convergence_study,
    expected_payoff,
    lambda_accept,
    n_player_expected_payoff,
    optimize_offer,
)
from .simulate import (
    BeliefOptProposer,
    EmpiricalOptProposer,
    EquilibriumProposer,
    EquilibriumVoter,
    FixedOfferProposer,
    LogitModel,
    LogitVoter,
    ThresholdVoter,
    logit_accept_prob,
    run_batch,
    run_match,
)
from .empirics import (
    CoalitionClass,
    PayoffSurface,
    VoteRecord,
    classify_coalition,
    ecdf_and_ks,
    experienced_filter,
    fit_logit,
    gini,
    mean_rejection_payoff,
    optimization_rates,
    payoff_surface,
    summary_tables,
    vote_records_from_logs,
)
from .presets import REFERENCE_LOGIT_MODELS, REFERENCE_MRP, TREATMENTS, treatment
