"""deltarec: hazard-rate inference for discrete distributions from delta-records."""

from .records import (
    CountTable,
    DataError,
    DeltaRecordSample,
    IntSequence,
    StoppedView,
    count_table,
    extract_delta_records,
    reduce_k,
    stopped_view,
)
from .hazard import (
    ConditionalQuantities,
    Geometric,
    HazardVector,
    NegativeBinomial,
    ParameterError,
    Poisson,
    conditional_quantities,
    hazard_of_family,
    log_likelihood,
    log_likelihood_sample,
    parse_family,
)
from .estimators import (
    HazardEstimate,
    geometric_mle,
    npmle_incomplete,
    npmle_isotonic,
    npmle_plain,
)
from .law import (
    EstimatorLaw,
    GeomStarParams,
    RationalQ,
    cdf,
    dilog,
    geomstar_pmf,
    moments,
    n_stat_law,
    pmf,
)

__version__ = "0.1.0"

__all__ = [
    "CountTable", "DataError", "DeltaRecordSample", "IntSequence", "StoppedView",
    "count_table", "extract_delta_records", "reduce_k", "stopped_view",
    "ConditionalQuantities", "Geometric", "HazardVector", "NegativeBinomial",
    "ParameterError", "Poisson", "conditional_quantities", "hazard_of_family",
    "log_likelihood", "log_likelihood_sample", "parse_family",
    "HazardEstimate", "geometric_mle", "npmle_incomplete", "npmle_isotonic",
    "npmle_plain",
    "EstimatorLaw", "GeomStarParams", "RationalQ", "cdf", "dilog",
    "geomstar_pmf", "moments", "n_stat_law", "pmf",
    "__version__",
]
