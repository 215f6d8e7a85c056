"""wassdisc: exact Wasserstein distances, star/uniform discrepancies, and
numerically certified inequalities between them on [0,1]^d and R^d."""

from .bounds import (
    BoundResult,
    Regime,
    b_pd,
    bound_cube,
    bound_real_space,
    bound_w1_exponential_1d,
    bound_w1_moment_1d,
    bound_w1_refined,
    kappa,
    refined_window,
    reverse_bound,
    reverse_constant,
    saturated_level_sum,
    saturated_level_sum_bound,
)
from .discrepancy import (
    CriticalGrid,
    box_mass_supremum,
    build_critical_grid,
    ks_distance_1d,
    star_discrepancy,
    uniform_discrepancy,
)
from .errors import (
    DimensionMismatchError,
    DimTooLargeError,
    DomainError,
    GridTooLargeError,
    OutOfDomainError,
    RegimeViolationError,
    SupportTooLargeError,
)
from .harness import (
    CheckRecord,
    ExperimentConfig,
    Family,
    Report,
    check_reverse,
    check_sandwich,
    check_wp_vs_dinf,
    emit_report,
    lil_demo,
    load_config,
    parse_report,
    reverse_records,
    run_suite,
    sandwich_records,
)
from .measures import (
    DiscreteMeasure,
    Domain,
    Measure,
    Norm,
    UniformCube,
    diameter,
    halton,
    iid_uniform,
    midpoint_grid,
    moment,
    read_points_csv,
    van_der_corput,
    write_points_csv,
)
from .multiscale import (
    UNBOUNDED,
    DyadicLevelProfile,
    cell_index,
    delta_level,
    multiscale_upper_cube,
    multiscale_upper_rd,
    rd_level_tail,
    shell_index,
)
from .transport import (
    TransportPlan,
    plan_to_csv,
    w1_dual_gap_check,
    wasserstein_1d,
    wasserstein_exact,
)

__version__ = "0.1.0"
