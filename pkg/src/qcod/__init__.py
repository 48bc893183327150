"""Minimax signal detection in Gaussian noise under QCO constraints."""
from .detection import (
    CalibratedTest,
    CoordinateProjection,
    Decision,
    StatKind,
    mc_calibrate,
    optimal_projection,
    radius_bound,
    run_test,
    split_sample,
    statistic,
    statistic_zprime,
    theoretical_test,
    theoretical_threshold,
)
from .lower_bound import (
    ExtremalPrior,
    chi_square_chain,
    chi_square_divergence,
    extremal_vector,
    risk_lower_bound,
    sample_prior,
)
from .power import (
    PowerCurve,
    dominance_check,
    mc_power,
    minimal_power_vector,
    power_curve,
)
from .qco_sets import Ellipsoid, Hyperrectangle, contains, d0, derotate, make_sobolev
from .widths import (
    RateReport,
    UntestableError,
    WidthProfile,
    brute_force_width,
    compare_rates,
    estimation_index,
    projection_deficiency,
    rate_report,
    testing_index,
    width_profile,
)

__version__ = "0.1.0"
