"""Joint antenna selection for a two-user downlink MIMO-NOMA system.

Library layout:
  link_model  scenario parameters, per-triple rates, Jain fairness
  selection   exhaustive, max-min-max, max-max-max, and random policies
  specfun     exponential integral, chi, binomial/multinomial machinery
  analysis    strong-gain distributions, closed-form average rates, quadrature
  montecarlo  reproducible sweep campaigns over scenario parameters
  plotting    figure rendering for the report path
  cli         simulate / analyze / validate commands
"""

from .link_model import (ChannelRealization, RateReport, SystemParams, User,
                         derive_params, jain_index, noma_rates, oma_rates)
from .selection import (Algorithm, OmaSelection, SelectionResult, a3_select,
                        aia_select, exhaustive_search, gains_at, oma_select,
                        random_select, row_maxima)
from .specfun import (ExpansionTerm, ExpansionTooLargeError, chi,
                      enumerate_terms, expint_ei, lambda_coeff)
from .analysis import (LowSnrApproximationWarning, OrderStatDistributions,
                       QuadratureError, avg_sum_rate_a3, avg_sum_rate_aia,
                       cdf_gamma_i_w, cdf_gamma_s_a3, cdf_gamma_s_aia,
                       cdf_row_max_g, cdf_row_max_h, integrate_density,
                       low_snr_guard, pdf_gamma_s_a3, pdf_gamma_s_aia,
                       pdf_row_max_g, pdf_row_max_h, quadrature_avg_rate)
from .montecarlo import (PointStats, Scheme, SweepAxis, SweepResult, SweepSpec,
                         params_at, run_sweep, sample_realization, trial_stream)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
