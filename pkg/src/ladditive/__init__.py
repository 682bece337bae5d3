"""Exact arithmetic subderivatives and Leibniz-additive functions."""

from .bounds import (
    BoundVerdict,
    classic_bounds,
    classify_equality,
    extended_lower,
    extended_upper,
    extended_westrick,
    westrick_bound,
)
from .functions import (
    CAdditiveSpec,
    CMultiplicativeSpec,
    DefaultRule,
    LAdditiveSpec,
    PrimeMap,
    PrimeSet,
    builtin,
    eval_c_additive,
    eval_c_multiplicative,
    eval_l_additive,
    eval_prime_power,
)
from .numeric import factorize, is_prime, nu, prime_multiset
from .reconstruction import (
    FunctionTable,
    check_conditions,
    check_l_additive,
    decompose,
    reconstruct_h,
    support_partition,
    tabulate,
)
from .subderivative import arithmetic_derivative, log_subderivative, partial_derivative, subderivative
from .sweep import SweepConfig, definition_oracle_D, run_sweep

__version__ = "0.1.0"
