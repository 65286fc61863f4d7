"""henonlab: a numerical laboratory for complex Henon automorphisms of C^2.

Periodic censuses, escape-rate Green functions, saddle classification by
eigenvalue thresholds, equilibrium-measure sampling through generic line
intersections, and measure-distance diagnostics for the equidistribution
of saddle periodic points.
"""

__version__ = "0.1.0"

from .census import (CensusResult, Classification, PeriodicRecord, census,
                     exact_period_filter, newton_orbit_refine, oracle_small_n)
from .config import ExperimentConfig, parse_config
from .escape import GreenValue, KStatus, escape_time, filtration_radius, green, in_K
from .lyapunov import LyapunovEstimate, finite_time_exponents, inverse_exponents
from .maps import (ElementaryFactor, HenonMap, evaluate, evaluate_inverse,
                   iterate_orbit, jacobian, jacobian_inverse, map_from_dict,
                   map_to_dict, parse_map_json, point, quadratic_map)
from .measures import (EmpiricalMeasure, convergence_report, from_census,
                       moment_distance, moments, noise_floor,
                       pathological_graph_mass_ratio, sliced_w1, uniform_measure)
from .pipeline import run_equidistribution_experiment
from .sampler import (AffineLine, is_generic, line_section_poly, make_line,
                      random_line, sample_mu)
from .spectral import (SpectralData, TangencyStats, classify, classify_records,
                       differential_along_orbit, stable_unstable_directions,
                       tangency_statistic)

__all__ = [
    "__version__",
    "AffineLine", "CensusResult", "Classification", "ElementaryFactor",
    "EmpiricalMeasure", "ExperimentConfig", "GreenValue", "HenonMap",
    "KStatus", "LyapunovEstimate", "PeriodicRecord", "SpectralData",
    "TangencyStats",
    "census", "classify", "classify_records", "convergence_report",
    "differential_along_orbit", "escape_time", "evaluate", "evaluate_inverse",
    "exact_period_filter", "filtration_radius", "finite_time_exponents",
    "from_census", "green", "in_K", "inverse_exponents", "is_generic",
    "iterate_orbit", "jacobian", "jacobian_inverse", "line_section_poly",
    "make_line", "map_from_dict", "map_to_dict", "moment_distance", "moments",
    "newton_orbit_refine", "noise_floor", "oracle_small_n", "parse_config",
    "parse_map_json", "pathological_graph_mass_ratio", "point",
    "quadratic_map", "random_line", "run_equidistribution_experiment",
    "sample_mu", "sliced_w1", "stable_unstable_directions",
    "tangency_statistic", "uniform_measure",
]
