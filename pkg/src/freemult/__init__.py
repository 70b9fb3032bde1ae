"""freemult: free multiplicative convolution calculus on the positive
half-line and the unit circle, with infinitely divisible law constructors and
triangular-array limit diagnostics."""

__version__ = "0.1.0"

from .errors import BranchError, FreemultError, InputError, NumericalError
from .measures import (
    AtomicProbabilityMeasure,
    FinitePositiveMeasure,
    GridSpec,
    Reciprocal,
    RotateBy,
    ScaleBy,
    Space,
    classical_multconv,
    infinitesimality_stat,
    make_measure,
    measure_from_json,
    measure_to_json,
    finite_measure_from_json,
    finite_measure_to_json,
    moment,
    point_mass,
    pushforward,
    weak_distance,
)
from .series import DEFAULT_ORDER, TruncatedSeries
from .transforms import (
    mellin_fourier,
    psi_eval,
    psi_inv_neg,
    psi_series,
    s_eval_pos,
    s_series,
    sigma_series,
)
from .freeconv import (
    MomentVector,
    boxtimes_moments,
    free_cumulants,
    kreweras_complement,
    moments_from_free_cumulants,
    moments_of,
    nc_moment_oracle,
    noncrossing_partitions,
    row_s_product,
    row_sigma_product,
)
from .infdiv import (
    ClassicalIdParams,
    FreeIdCircParams,
    FreeIdPosParams,
    classical_phi_idlaw,
    cor34_inverse,
    cor34_map,
    gamma_shift_integrand,
    idlaw_moments_circ,
    idlaw_s_pos,
    levy_density_ratio,
    u_series,
    v_eval,
)
from .arrays import (
    ArraySpec,
    DiagnoseConfig,
    DiagnoseResult,
    RowDiagnostics,
    Verdict,
    VerdictKind,
    center_row,
    centering_constants,
    circle_kernel_bound,
    diagnose,
    g_eval,
    gamma_n_circ,
    gamma_n_pos,
    h_eval,
    haar_statistic,
    halfline_kernel_bound,
    load_array_config,
    row_diagnostics,
    sigma_n_circ,
    sigma_n_pos,
)
from .montecarlo import (
    MCConfig,
    MCMoments,
    haar_orthogonal,
    haar_unitary,
    rmt_oracle_circ,
    rmt_oracle_pos,
    rmt_row_oracle_circ,
    spectrum_multiplicities,
)
from .verify import (
    VerificationReport,
    classical_row_product,
    corollary34_check,
    verify_circ,
    verify_haar,
    verify_pos,
)
