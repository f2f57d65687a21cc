"""Back-of-envelope finite-size corrections for all epsilons near 1e-3 and
n = m = N/2, with the two critical-size estimates built on them.

The printed approximations use the constants 12 and 9; substituting eps = 2**-10
and n = m = N/2 into the exact corrections gives 22 and about 5.5 instead. Both
are exposed by :func:`rapid_estimate`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .finite_key import delta_n, delta_v

RAPID_EPS = 2.0 ** -10
DELTA_N_FORMULA = "Delta(n) ~ 40/N + 7*sqrt(12/N)"
DELTA_V_FORMULA = "Delta V ~ sqrt((9 + 2*ln(N))/N)"


@dataclass(frozen=True)
class RapidEstimate:
    N: int
    delta_n_approx: float
    delta_v_approx: float
    delta_n_exact: float
    delta_v_exact: float


def rapid_delta_n(N: float) -> float:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return 40.0 / N + 7.0 * math.sqrt(12.0 / N)


def rapid_delta_v(N: float) -> float:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return math.sqrt((9.0 + 2.0 * math.log(N)) / N)


def rapid_estimate(N: int) -> RapidEstimate:
    """Printed approximations next to the exact corrections at eps = 2**-10, n = m = N/2."""
    n = max(N // 2, 1)
    m = max(N - n, 1)
    return RapidEstimate(
        N=N,
        delta_n_approx=rapid_delta_n(N),
        delta_v_approx=rapid_delta_v(N),
        delta_n_exact=delta_n(n, RAPID_EPS, RAPID_EPS),
        delta_v_exact=delta_v(m, RAPID_EPS, 2),
    )


def _smallest(pred) -> int:
    """Smallest positive integer satisfying a monotone predicate."""
    if pred(1):
        return 1
    lo, hi = 1, 2
    while not pred(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def case_study_1(r_inf: float) -> int:
    """Smallest N with r_inf - rapid_delta_n(N) > 0, ignoring parameter fluctuations."""
    if not 0.0 < r_inf <= 1.0:
        raise ValueError(f"r_inf must lie in (0, 1], got {r_inf}")
    return _smallest(lambda N: r_inf - rapid_delta_n(N) > 0.0)


def case_study_2(target_dv: float) -> int:
    """Smallest N at which the estimated error rate is known to within ``target_dv``."""
    if target_dv <= 0.0:
        raise ValueError(f"target_dv must be positive, got {target_dv}")
    return _smallest(lambda N: rapid_delta_v(N) <= target_dv)
