"""Commutative POVMs as Markov-kernel smearings of spectral measures."""

from .errors import (
    DegenerateBlocks,
    NotAFunctionOfA,
    NotCommutative,
    PovmError,
    ValidationError,
)
from .linalg import (
    JointEigenstructure,
    SpectralDecomp,
    commutator_norm,
    is_positive_semidefinite,
    jointly_diagonalize,
    spectral_decompose,
)
from .povm import (
    DiscretePOVM,
    OutcomeSpace,
    ValidationReport,
    effect_of,
    is_commutative,
    povm_spectrum,
    validate_povm,
)
from .sharp import (
    SharpVersion,
    build_sharp_version,
    sharp_versions_equivalent,
    verify_generating_equality,
)
from .kernel import (
    KernelTable,
    extract_kernel,
    separates_points,
    smear,
    validate_markov_kernel,
)
from .intervals import IntervalSet, RealGrid, ShrinkingFamily
from .continuity import (
    ConvolutionKernel,
    GridPOVM,
    WeightedLebesgue,
    absolute_continuity_check,
    continuity_modulus,
    dini_uniform_convergence,
    feller_test,
    kernel_value,
    norm1_test,
    strong_feller_test,
    uniform_continuity_test,
)
from .observables import (
    UnsharpPosition,
    build_unsharp_position,
    expectation,
    optimal_gaussian_kernel,
    phase_space_marginal,
)

__version__ = "0.1.0"
