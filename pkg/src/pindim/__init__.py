"""Partition machinery, closed-form bounds, and adversary search over
piecewise-linear complexity profiles."""

__version__ = "0.1.0"

from .adversary import (
    SearchConfig,
    SearchResult,
    dp_oracle,
    enumerate_profiles,
    tightness_report,
    worst_case_search,
)
from .bounds import (
    AlternateProjection,
    BoundReport,
    DimParams,
    LedgerRow,
    alternate_projection_bound,
    assemble_all_yellow_distance_bound,
    assemble_distance_bound,
    assemble_packing_bound,
    assemble_projection_bound,
    full_dim_threshold,
    hausdorff_bound,
    hausdorff_bound_D2,
    l_tradeoff,
    minimize_over_L,
    packing_closed_form,
    projection_closed_form,
    regular_pin_distance_bound,
    teal_growth_rate,
)
from .classify import (
    BLUE,
    GREEN,
    RED,
    TEAL,
    YELLOW,
    ColoredInterval,
    is_blue,
    is_green,
    is_red,
    is_teal,
    is_yellow,
    maximal_green_at,
)
from .errors import (
    BudgetExceededError,
    ConstructionError,
    DomainError,
    EnvelopeViolation,
    InvalidProfileError,
    PindimError,
    PreconditionError,
    ProfileFormatError,
)
from .partition import (
    Partition,
    admissible_partition,
    all_yellow_partition,
    count_rgb_sequences,
    default_s_min,
    general_partition,
    good_partition,
    partition_problems,
    partition_to_json,
    regular_pin_partition,
    rgb_partition,
)
from .profile import (
    TOL,
    Envelope,
    EnvelopeCheck,
    Profile,
    envelope_check,
    load_profile,
    make_adversary,
    measured_envelope,
    profile_from_json,
    profile_to_json,
    save_profile,
)
