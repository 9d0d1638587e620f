"""Equal-predictive-accuracy tests (GW, Diebold-Mariano/Newey-West, subsample t)
and Monte Carlo tools for studying their size."""

__version__ = "0.1.0"

from .accuracy import TestResult, dm_nw_test, gw_test, newey_west_lrv, subsample_t_test
from .asymptotics import (gamma_d, long_run_variance_analytic, simulate_expanding_limit,
                          table2_row, vm)
from .dgp import (ExpandingNull, InnovationSpec, LocationModel, NestedFixedRegressor, NonNested,
                  compute_c_squared_nested, draw_innovations, lognormal_neg_moments, simulate)
from .errors import (AlignmentError, DegenerateStatisticError, DomainError,
                     InsufficientDataError, PredaccError, RankDeficiencyError)
from .harness import ExperimentConfig, reproduce_table1, run_experiment
from .series import (LossDiffSeries, Series, empirical_quantile, loss_diff_squared_error,
                     sample_autocovariance)
