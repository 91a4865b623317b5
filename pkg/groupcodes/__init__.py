"""Optimum commutative group codes: lattice enumeration plus an initial-vector LP."""
from groupcodes.core.config import APP_VERSION as __version__
from groupcodes.search import (
    CountEstimates,
    OddDimCode,
    SearchParams,
    count_estimates,
    run_search,
    search_optimum,
    search_optimum_odd,
)

__all__ = [
    "__version__",
    "CountEstimates",
    "OddDimCode",
    "SearchParams",
    "count_estimates",
    "run_search",
    "search_optimum",
    "search_optimum_odd",
]
