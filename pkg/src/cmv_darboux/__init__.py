"""Darboux transformations of CMV and quasi-CMV matrices."""

from .cmv import (
    BandedMatrix,
    FunctionalMoments,
    ZigzagBasis,
    build_cmv,
    eval_on_cmv,
    leading_unitarity_defect,
    moments_from_zigzag,
    orthonormal_basis,
    orthonormal_laurent,
    schur_from_cmv,
    schur_from_zigzag,
    shift_matrix,
    unitarity_defect,
    zigzag_from_factor,
)
from .core import (
    DEFAULT_TOL,
    HermitianLaurentPolynomial,
    LaurentCoefficients,
    SchurSequence,
    Tail,
    TRUNCATED,
    ZERO_TAIL,
    default_tolerance,
    laurent_eval,
    laurent_from_conjugate_zeros,
    rho,
)
from .darboux_forward import DarbouxFactor, ForwardResult, forward, nonlinear_ab_recurrence, verify_intertwining
from .darboux_inverse import (
    Classification,
    InverseParameters,
    RecoveredSource,
    build_solution_matrix,
    classify,
    cmv_parameters_for,
    inverse,
    parameters_with_vanishing_s1,
    recover_source_schur,
)
from .errors import (
    BlockBreakdown,
    BlowUp,
    Breakdown,
    CMVDarbouxError,
    DegenerateBasis,
    InfeasibleTarget,
    InsufficientParameters,
    InvalidFactor,
    InvalidSchurParameter,
    NonSymmetricMeasure,
    NotPositiveDefinite,
    NotQuasiDefinite,
    QuasiDefinitenessFailure,
    ReversedFactorizationBreakdown,
    UnimodularParameter,
    ZeroArgument,
)
from .factorization import banded_cholesky, first_breakdown, generalized_cholesky, qr_shifted
from .higher_degree import BlockFactor, forward_d, inverse_d
from .quasi_cmv import (
    QuasiInverseParameters,
    QuasiSchurSequence,
    SignSequence,
    build_quasi_cmv,
    quasi_classify,
    quasi_forward,
    quasi_inverse,
    quasi_parameters_with_vanishing_s1,
    quasi_unitarity_defect,
)
from .schur_flows import (
    FlowState,
    darboux_step,
    discrete_step_direct,
    flow_rhs,
    integrate_darboux,
    integrate_reference,
    lax_residual,
    trajectory,
)
from .szego_bridge import (
    JacobiMatrix,
    dvz,
    dvz_via_darboux,
    jacobi_darboux_forward,
    matrix_szego_projection,
    symmetrize_schur,
    szego_rotation,
    verify_theorem_AAA,
)

__version__ = "0.1.0"
