"""Two-weight Sobolev spaces on (0, inf): equilibrium windows, associate norms,
and empirical verification of their two-sided equivalences."""

from .config import RunConfig
from .constructions import (CorpusSpec, OscillatorPlan, c1_interpolant,
                            dual_gradient_bump, extremal_F, hat_corpus,
                            oscillator, smooth_to_g, witness_unbounded)
from .duality import (HardyConstants, SandwichReport, estimate_J, hardy_constants,
                      holder_constant, pairing, reflexivity_family,
                      verify_embedding, verify_reflexivity,
                      verify_strong_of_weak_zero, window_products)
from .equilibrium import (EquilibriumSolution, EtaGrid, WindowMasses,
                          build_eta_grid, check_identity, solve_window)
from .errors import (BlockBudgetExceededError, ConfigError, DerivativeRequiredError,
                     DivergentIntegralError, GridRangeError, QuadratureFaultError,
                     UndeterminedIntegralError, WindowUnsolvableError, WSobolevError)
from .functionals import (BlockReport, NormReport, block_norm, remark_unit_norm,
                          sobolev_norm, strong_norm, truncate, weak_norm,
                          weighted_lp_norm)
from .functions import (HalfLineFunction, bump, from_callable, hat, indicator,
                        lincomb, restrict, zero_function)
from .quad import DEFAULT_QUAD, QuadratureSpec, adaptive_integral
from .weights import (ExponentPair, S6Report, S6Side, Weight, WeightPair,
                      check_S6, custom_weight, integrate_power, make_pair,
                      power_weight, unit_weight)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
