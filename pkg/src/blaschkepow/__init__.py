"""Taylor coefficients of powers of a Blaschke factor: exact oracles,
saddle-point and Airy asymptotics, norm scaling and annular constructions."""

from .core import (
    BlaschkeParam,
    BudgetExceeded,
    ConfigurationError,
    CoeffQuery,
    DomainError,
    NumericalRefusal,
    Region,
    RegionLabel,
    Thresholds,
    alpha0,
    classify_region,
    default_thresholds,
    reduce_phase,
)

__version__ = "0.1.0"
