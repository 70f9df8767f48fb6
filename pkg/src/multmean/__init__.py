"""Mean values of bounded multiplicative functions, with an exact sieve oracle."""

from .estimators import MeanValueEstimator, SummatoryOracle, check_positions, check_spec
from .exceptions import (
    AccelerationInapplicable,
    BoundViolation,
    DomainError,
    MultMeanError,
    NumericFailure,
    ResourceError,
    SpecError,
)
from .functions import MultiplicativeSpec, catalog, evaluate, lookup, parse_spec, rescale_bound
from .mean_value import (
    MeanValueResult,
    classify_convergence,
    local_factor,
    mean_value,
    mean_value_accelerated,
    mean_value_product,
    mean_value_strongly,
    mertens_partial_product_check,
)
from .primes import Factorization, PrimeList, SpfTable, factorize, sieve_primes, spf_table
from .series import AlphaPolyRule, RationalSeries, local_factor_to_X, series_eval, series_neg_log
from .special import euler_gamma, prime_zeta, prime_zeta_direct, prime_zeta_tail, riemann_zeta
from .summatory import SummatoryReport, compare, squarefree_census, summatory

__version__ = "0.1.0"
