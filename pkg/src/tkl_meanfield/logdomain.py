"""Scalar log-domain helpers for Boltzmann weights at low temperature.

The solver runs at temperatures down to 1e-4 in coupling units where naive
exponentials overflow; every thermal quantity in the package is assembled
from these shifted forms.
"""

import math

LN2 = math.log(2.0)
LN3 = math.log(3.0)


def logaddexp(a: float, b: float) -> float:
    """log(exp(a) + exp(b)) without overflow."""
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def logsumexp3(a: float, b: float, c: float) -> float:
    return logaddexp(logaddexp(a, b), c)


def log_two_cosh(u: float) -> float:
    """log(2 cosh u), finite for any double u."""
    u = abs(u)
    return u + math.log1p(math.exp(-2.0 * u))


def log_abs_expm1(u: float) -> float:
    """log|exp(u) - 1|; -inf at u = 0."""
    if u == 0.0:
        return -math.inf
    if u < 0.0:
        return math.log(-math.expm1(u))
    if u > 690.0:
        return u + math.log1p(-math.exp(-u))
    return math.log(math.expm1(u))
