"""Spectrality analysis of infinite convolutions generated by integer digit sets.

The package decides, where its rule base allows, whether the infinite
convolution of a sequence of scale/digit pairs admits an orthonormal basis
of exponentials, and backs the verdicts with exact algebra (cyclotomic
factorizations, Sturm counts, residue arithmetic) and numeric evidence
(truncated transform products, orthogonality certificates, Q-function
probes).
"""

from .intpoly import (
    IntPolynomial,
    UnitCircleRootProfile,
    cyclotomic,
    cyclotomic_factors,
    divide_exact,
    euler_phi,
    gcd_int_poly,
    unit_circle_profile,
)
from .residue import (
    DigitSet,
    InternalDivisionFailure,
    MaskZeroSet,
    NotCRS,
    character_polynomial,
    digit_polynomial,
    is_complete_residue_system,
    mask_is_zero_at,
    mask_zero_set,
    satisfies_udz,
)
from .moran import (
    ConsecutiveFamily,
    DivisibilityProfile,
    EmptyTail,
    Formula,
    HadamardTriple,
    InvalidL,
    MoranSequence,
    OutOfRange,
    PccReport,
    PeriodicTail,
    RbcReport,
    SequenceError,
    ShiftedTopFamily,
    Verdict,
    check_pcc,
    check_rbc,
    decide_spectrality,
    divisibility_profile,
    find_hadamard_L,
    largest_orthogonal_frequencies,
    materialize,
    normalized_digits,
    normalized_sequence,
    parse_formula,
    periodic,
    scale_at,
    scale_product,
    sequence_length,
    shift,
    structural_hadamard_L,
)
from .fourier import (
    OrthogonalityReport,
    QReport,
    TailBoundUnavailable,
    TruncationPlan,
    golden_ratio_samples,
    mask_eval,
    mu_hat_grid,
    mu_hat_truncated,
    orthogonality_check,
    q_partial,
    tail_bound,
)
from .spectrum import (
    ChoiceOutOfClass,
    CollisionError,
    EmptyResult,
    SpectrumTruncation,
    canonical_spectrum,
    decompose_lambda,
    gamma0,
    inhabited_classes,
    level_triples,
    pq_profile,
    project_P,
)

__version__ = "0.1.0"
