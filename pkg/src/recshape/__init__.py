"""Value sets of real linear recurrence sequences.

The closure of {a_n} for a real linear recurrence is a countable set plus
finitely many closed intervals; conversely every finite union of closed
intervals arises this way.  This package computes the first and constructs
the second.
"""

from .closure import (
    Classification,
    ClosureConfig,
    ClosureReport,
    IntervalSet,
    closure_of,
    empirical_closure,
    hausdorff,
    merge_intervals,
    trig_range,
)
from .errors import FitError, RecshapeError, RecurrenceOverflowError, RootFindingError, TrigRangeError
from .polynomial import Polynomial, RootSet, find_roots
from .recurrence import (
    LinearRecurrence,
    add,
    char_poly,
    constant,
    cos_n,
    evaluate,
    fibonacci,
    fit_minimal,
    geometric,
    interlace,
    multiply,
    periodic_from_values,
    reduce,
    scale,
    section,
    verify_satisfies,
)
from .spectral import (
    Decomposition,
    GrowthClass,
    SpectralData,
    TrigPolySpec,
    classify_dominant,
    decompose,
    rational_angle,
    solve_coefficients,
)
from .synthesis import SynthesisPlan, build, plan, roundtrip, synthesize, x_sequence

__version__ = "0.1.0"
