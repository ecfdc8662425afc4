"""triadne: exact lattice-triangle counts, exponential sums, and the
circle-method verification harness around them.

Modules
-------
core         shared numerics, errors, deterministic summation, cutoffs
report       structured verification reports (schema "triadne/1")
lattice      configuration counts, moment counts, box tables, rep cache
gauss        quadratic Gauss sums and their inequality suites
arcs         Weyl sums, arc systems, local approximation, bilinear sums
oscillatory  Fresnel-type integrals, the singular integral, sphere FT
singular     local densities, local factors, the singular series
operators    triangle averages, multipliers, the main-term operator
cli          command-line orchestration
"""

from .core import ArgumentError, BudgetError
from .report import SCHEMA, CheckRecord, VerificationReport

__version__ = "1.0.0"

__all__ = [
    "ArgumentError",
    "BudgetError",
    "SCHEMA",
    "CheckRecord",
    "VerificationReport",
    "__version__",
]
