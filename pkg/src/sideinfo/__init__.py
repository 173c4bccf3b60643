"""Benefit of side information, data-processing audits, and exact causality measures."""

from .benefit import (
    BenefitReport,
    benefit,
    benefit_from_G,
    conditional_benefit,
    g_normalized,
    numeric_subgradient,
)
from .causality import (
    DIReport,
    DiRateResult,
    ExplicitProcess,
    MarkovJointProcess,
    VarModel,
    causally_cond_entropy,
    conservation_check,
    di_rate,
    directed_info,
    geweke_F,
    granger_noncausal,
    reverse_delayed_di,
    transfer_entropy,
    unroll,
    var_autocovariances,
)
from .errors import (
    AlphabetTooLarge,
    ConvexityViolation,
    EmptySample,
    HorizonTooLarge,
    NegativeMass,
    NotNormalized,
    NotProper,
    NotStationary,
    ParameterOutOfRange,
    SchemaError,
    SideinfoError,
    UnboundedBelow,
    UnknownLoss,
    UnknownSymbol,
    ValidationError,
    ZeroConditioningEvent,
)
from .losses import (
    ActionMatrixLoss,
    BayesResult,
    ProprietyReport,
    SavageRuleLoss,
    ScoringRuleLoss,
    audit_propriety,
    bayes_risk,
    builtin_loss,
    savage_from_G,
    simplex_grid,
    v_envelope,
)
from .modelio import (
    ModelFile,
    empirical_joint,
    parse_model,
    parse_model_text,
    read_sample_csv,
    serialize_model,
    write_model,
)
from .prob import (
    ConvexOracle,
    Dist,
    Joint,
    check_convex_oracle,
    condition_on_y,
    conditional_mutual_information,
    entropy,
    jensen_gap,
    linear_oracle,
    marginals,
    mutual_information,
    neg_entropy_oracle,
    point_mass,
    slice_given_w,
    sum_squares_oracle,
    validate_dist,
    validate_joint,
    w_marginal,
)
from .sufficiency import (
    DpaAuditReport,
    SufficiencyCert,
    SufficientSet,
    Transform,
    ViolationWitness,
    audit_dpa,
    check_sufficient,
    enumerate_sufficient,
    find_violation,
    proof_family,
    push_forward,
    padded_push_forward,
    verify_witness,
)

__version__ = "0.1.0"
