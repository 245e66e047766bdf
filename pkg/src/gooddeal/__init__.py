"""No-arbitrage and good-deal valuation bounds for convex-constrained markets on finite sample spaces."""

from .diagnostics import (b_delta_generators, build_truncation, coherent_gdv, extension_consistency,
                          first_kind_arbitrage, gdv_exists, indifference_obstruction, is_gdv, is_relevant,
                          nfl_check, relevant_coherent_gdv, separate)
from .markets import (ConicalMarket, ExtendedMarket, Friction, IlliquidCurve, MarketModel, Polytope,
                      ScaledBox, conical_hull, extended_market)
from .reports import DiagnosticReport
from .riskmeasures import (AcceptanceSet, EmptyZeroSet, ImproperValuation, RiskMeasure, acceptance_set_measure,
                           axioms_check, entropic, indifference_measure, indifference_price, penalty_of,
                           penalty_rho0, penalty_table, restrict_conical, rho_hat0, rho_hat0_measure, shortfall,
                           shortfall_measure, superhedging_rho0, worst_case)
from .spaces import SampleSpace, YoungFunction, classify_density, expectation, luxemburg_norm

__version__ = "0.1.0"
