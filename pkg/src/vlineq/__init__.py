"""Definitional and closed-form lattice operations on coordinatewise R^n and C^n."""
from .errors import (
    DimensionMismatchError,
    DomainError,
    FieldMismatchError,
    FormError,
    InstanceParseError,
    InstanceValidationError,
    VlineqError,
)
from .instances import InstanceFile, generate_instance, load_instance, save_instance
from .lattice import (
    DEFAULT_GRID,
    GridConfig,
    LatticeElement,
    Pair,
    ScalarField,
    geometric_mean,
    join,
    meet,
    modulus,
    square_mean,
)
from .maps import (
    ExponentVector,
    PositiveLinearMap,
    apply,
    holder_check,
    homomorphism_equality_check,
    maligranda_check,
    minkowski_check,
    strictness_witness_search,
)
from .powers import (
    ExponentDecomposition,
    WeightVector,
    check_power_rules,
    multiply,
    nth_root,
    power,
    weighted_geometric_mean,
)
from .report import VerificationReport
from .sesquilinear import (
    CauchySchwarzReport,
    SesquilinearForm,
    cauchy_schwarz_report,
    classical_equality_witness_search,
    corollary_fsquare_report,
    cs_gap,
    evaluate,
)
from .suites import run_suite

__version__ = "0.1.0"
