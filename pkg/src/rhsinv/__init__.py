"""Perturbative invariants of rational homology spheres from surgery on special links."""

from .errors import (
    DegenerateSurgeryError,
    DomainError,
    IncompleteGridError,
    NotRHSError,
    ValidationError,
)
from .jones import JonesGrid, MilnorData, SlopeClass, load_fixture, unknot_grid
from .numtheory import SurgeryCoeff, dedekind_sum
from .series import KSeries, sphere_series
from .surgery import (
    RHSInvariants,
    SurgeryPresentation,
    lens_space_invariants,
    perturbative_invariants,
)

__version__ = "0.1.0"
