"""Numerical toolkit for the resource theory of asymmetry.

Covers symmetry representations and G-twirling, covariant Kraus channels,
the relative entropy of asymmetry and skew information, the covariant Petz
recovery map, and detection of universal freezing along covariant evolutions.
"""

from .errors import AsymmetryError
from .measures import (
    MeasureValue,
    measure_registry,
    rel_entropy_asymmetry,
    relative_entropy,
    skew_information,
    von_neumann_entropy,
)
from .quantum import (
    DensityMatrix,
    KrausChannel,
    PureStateVector,
    adjoint_channel,
    apply_channel,
    compose,
    density_from_pure,
    validate_cptp,
    validate_density,
)
from .settings import get_settings, use_settings
from .symmetry import (
    FiniteRep,
    OneParameterRep,
    cyclic,
    eigenblocks,
    fock_u1,
    group_average_channel,
    is_covariant,
    is_symmetric,
    twirl,
    two_qubit_u1,
)
from .universality import FreezeReport, RecoveryMap, freezing_report, petz_recovery, theorem_check, verify_recovery

__version__ = "0.1.0"
