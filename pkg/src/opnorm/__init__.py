"""Operator-valued norms on finite-dimensional spaces, with sampled verifiers."""

from .analysis import (
    CauchySequenceSpec,
    cauchy_propagation,
    check_norm_subadditivity,
    check_reverse_triangle,
    completeness_certificate,
    continuity_modulus,
)
from .banach_embed import (
    beta_embed,
    discretize_dual_ball,
    dual_ball_norm,
    from_functionals,
    isometry_defect,
)
from .ck_norms import (
    CKValuedNorm,
    FiniteCK,
    check_ck_axioms,
    cone_preserving,
    mult_norm_ck,
    negated_entry_norm,
    op_norm_sup,
)
from .gelfand import (
    build_algebra,
    character_table,
    characters,
    check_characters,
    check_contractive,
    check_homomorphism,
    check_isometric,
    check_multiplicative,
    gelfand_transform,
    multiplicative_ovnorm,
)
from .hilbert_norms import (
    LHValuedNorm,
    boundedness_estimate,
    check_lh_axioms,
    compose_norm,
    mult_norm_l2,
    shifted_norm,
    trivial_norm,
)
from .numkernel import (
    hermitian_eig,
    is_normal,
    is_psd,
    numerical_radius,
    simultaneous_diagonalize,
    spectral_norm,
    spectral_radius,
)
from .spaces import NormedSpaceModel, functional_sup_space, lp_space, polytope_space

__version__ = "0.1.0"
