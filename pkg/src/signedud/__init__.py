"""Sequences of points and signs whose averages realize signed measures.

Finite discrete spaces use a greedy deficit scheduler; compact intervals use
van der Corput transport through the variation function, with signs from the
sign density, continuous polygonal approximants and a discrepancy-scheduled
diagonal merge.  Discrepancies and functionals are computed exactly.
"""

from .convex import (
    ConvexTarget,
    barycentric_coordinates,
    cesaro_approximate,
    cesaro_error_trace,
    cesaro_limit_stream,
    simplex_combination,
)
from .discrepancy import (
    EmpiricalFunctionals,
    empirical_cdf,
    empirical_functionals,
    functional_traces,
    interval_discrepancy_signed,
    kolmogorov_statistic,
    riemann_stieltjes,
    star_discrepancy_signed,
)
from .errors import (
    DegenerateMeasureError,
    OracleInconsistencyError,
    QuadratureError,
    SignedUDError,
    SourceExhaustedError,
    ValidationError,
)
from .finite import (
    AtomSequence,
    c_constant,
    generate_finite,
    generate_signed_finite,
    iter_finite,
    mean_error_bounds,
    mean_vs_integral,
    subset_discrepancy,
    subset_discrepancy_trace,
)
from .measures import (
    BVOracle,
    FiniteSignedMeasure,
    JordanDecomposition,
    PLJFunction,
    PolygonalApproximation,
    SignDensity,
    jordan,
    measure_of_interval,
    normalize,
    partition,
    polygonal_approximation,
    sign_density,
    total_variation,
)
from .merge import BlockPlan, MergedSequence, averaged_functional, make_plan, merged_element, summability_row
from .sequences import (
    ArrangementSchedule,
    DiagonalSequence,
    SignedPrefix,
    SignedSequence,
    arrangement_schedule,
    diagonal_signed_sequence,
    generalized_inverse,
    iid_sampler,
    schedule_bound,
    signed_sequence_polygonal,
    ud_continuous_increasing,
    van_der_corput,
)
from .verify import verify_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
