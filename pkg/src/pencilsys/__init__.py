"""Singular descriptor systems F Y' = G Y + B V through matrix pencils."""

__version__ = "0.1.0"

from .continuous import (
    ConsistencyReport,
    DescriptorSystem,
    Trajectory,
    build_system,
    consistency_check,
    fundamental_matrix,
    residual_check,
    solve_continuous,
    solve_via_fundamental,
)
from .discretize import (
    DiscretizedSystem,
    SampleSequence,
    compare_with_continuous,
    discrete_simulate,
    discretize,
)
from .linalg import DEFAULT_TOL, Tolerance
from .nabla import (
    CorrespondenceReport,
    FractionalSystem,
    correspondence_diagnostic,
    nabla_apply,
    nabla_coefficients,
    rising_factorial,
    solve_fractional_system,
    telescope_recursion,
)
from .pencil import (
    ElementaryDivisorList,
    Pencil,
    PencilClass,
    SpectralStructure,
    WeierstrassDecomposition,
    classify_pencil,
    det_polynomial,
    elementary_divisors,
    spectral_structure,
    verify_decomposition,
    weierstrass_decompose,
)
