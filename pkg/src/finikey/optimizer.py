"""Choose the raw-key/estimation split and the epsilon allocation that maximise
the key, and locate the smallest run size that yields any key at all."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import _kernels
from .entropy import Protocol, ProtocolSpec, asymptotic_rate
from .finite_key import DEFAULT_F, EpsilonBudget, KeyRateResult, key_length_at

N_CAP = 10**10
COARSE_POINTS = 32
DENSE_POINTS = 512
SHARE_TOL = 1e-3
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_PROTOCOL_CODE = {Protocol.BB84: 0, Protocol.SIX_STATE: 1}


@dataclass(frozen=True)
class OptimizationResult:
    best_n: int
    best_budget: EpsilonBudget
    result: KeyRateResult
    evaluations: int
    N: int = 0
    unimodal: bool = True


class _Objective:
    """Best achievable bracket value at a given n, memoised across probes."""

    def __init__(self, N, q_obs, eps_total, spec, f):
        self.N, self.q_obs, self.eps_total, self.spec, self.f = N, q_obs, eps_total, spec, f
        self.code = _PROTOCOL_CODE[spec.protocol]
        self.cache: dict[int, tuple] = {}
        self.evaluations = 0

    def __call__(self, n: int) -> float:
        hit = self.cache.get(n)
        if hit is None:
            hit = _kernels.optimize_shares(n, self.N - n, self.q_obs, self.code, self.spec.q_max,
                                           self.spec.d, self.spec.n_pe, self.eps_total, self.f, SHARE_TOL)
            self.evaluations += hit[5]
            self.cache[n] = hit
        return hit[0]

    def shares(self, n: int) -> tuple:
        self(n)
        return self.cache[n][1:5]


def _grid(lo: int, hi: int, points: int) -> list[int]:
    if hi - lo + 1 <= points:
        return list(range(lo, hi + 1))
    return sorted({lo + round((hi - lo) * k / (points - 1)) for k in range(points)})


def _is_unimodal(values: list[float]) -> bool:
    """True when the sequence rises (weakly) then falls (weakly)."""
    k = max(range(len(values)), key=values.__getitem__)
    rising = all(values[i] <= values[i + 1] for i in range(k))
    falling = all(values[i] >= values[i + 1] for i in range(k, len(values) - 1))
    return rising and falling


def _golden_max(fn, lo: int, hi: int) -> int:
    """Integer golden-section search for the maximiser of a unimodal ``fn`` on [lo, hi]."""
    while hi - lo > 4:
        width = hi - lo
        c = hi - int(round(width * _INV_PHI))
        d = lo + int(round(width * _INV_PHI))
        if c >= d:
            c, d = lo + width // 3, hi - width // 3
        if fn(c) < fn(d):
            lo = c
        else:
            hi = d
    return max(range(lo, hi + 1), key=lambda n: (fn(n), -n))


def _bracket_search(fn, grid: list[int]) -> int:
    values = [fn(n) for n in grid]
    k = max(range(len(grid)), key=lambda i: (values[i], -i))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    return _golden_max(fn, lo, hi)


def baseline(N: int, q_obs: float, eps_total: float, spec: ProtocolSpec, f: float = DEFAULT_F) -> KeyRateResult:
    """The rule-of-thumb choice: n = N/2 and every epsilon equal."""
    budget = EpsilonBudget.equal_split(eps_total, spec.n_pe)
    return key_length_at(N, N // 2, q_obs, spec, budget, f)


def optimize_split(N: int, q_obs: float, eps_total: float, spec: ProtocolSpec | None = None,
                   f: float = DEFAULT_F) -> OptimizationResult:
    """Maximise the key length over n and over the epsilon allocation at fixed total.

    Returns an ``ell = 0`` result rather than raising when no choice gives a key.
    """
    spec = spec or ProtocolSpec()
    N = int(N)
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if not 0.0 < eps_total < 1.0:
        raise ValueError(f"eps_total must lie in (0, 1), got {eps_total}")
    if not 0.0 <= q_obs <= spec.q_max:
        raise ValueError(f"q_obs must lie in [0, {spec.q_max}], got {q_obs}")
    if f < 1.0:
        raise ValueError(f"f must be >= 1, got {f}")

    objective = _Objective(N, q_obs, eps_total, spec, f)
    coarse = _grid(1, N - 1, COARSE_POINTS)
    unimodal = _is_unimodal([objective(n) for n in coarse])
    if unimodal:
        best_n = _bracket_search(objective, coarse)
    else:
        best_n = _bracket_search(objective, _grid(1, N - 1, DENSE_POINTS))

    budget = EpsilonBudget.from_shares(eps_total, objective.shares(best_n), spec.n_pe)
    result = key_length_at(N, best_n, q_obs, spec, budget, f)
    base = baseline(N, q_obs, eps_total, spec, f)
    if base.ell > result.ell:
        best_n, budget, result = N // 2, EpsilonBudget.equal_split(eps_total, spec.n_pe), base
    return OptimizationResult(best_n, budget, result, objective.evaluations, N, unimodal)


def critical_n(q_obs: float, eps_total: float, spec: ProtocolSpec | None = None, f: float = DEFAULT_F,
               cap: int = N_CAP) -> int | None:
    """Smallest N whose optimised key is non-empty, or None if it exceeds ``cap``.

    Raises ValueError when the asymptotic rate at ``q_obs`` is not positive.
    """
    spec = spec or ProtocolSpec()
    if asymptotic_rate(spec, q_obs) <= 0.0:
        raise ValueError(f"asymptotic rate at q={q_obs} is not positive; no run size yields a key")

    def has_key(N: int) -> bool:
        return optimize_split(N, q_obs, eps_total, spec, f).result.ell > 0

    lo, hi = 1, 2
    while not has_key(hi):
        if hi >= cap:
            return None
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if has_key(mid):
            hi = mid
        else:
            lo = mid
    return hi


def scan(spec: ProtocolSpec | None, q_obs: float, eps_total: float, f: float, N_grid,
         workers: int | None = None) -> list[tuple[int, OptimizationResult]]:
    """Optimise at every grid point; results come back in grid order."""
    spec = spec or ProtocolSpec()
    grid = [int(N) for N in N_grid]
    if not grid:
        raise ValueError("N_grid must be nonempty")

    def run(N):
        return optimize_split(N, q_obs, eps_total, spec, f)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, grid))
    else:
        results = [run(N) for N in grid]
    return list(zip(grid, results))


def log_grid(n_min: float, n_max: float, points: int) -> list[int]:
    """Log-spaced integer run sizes from ``n_min`` to ``n_max`` inclusive."""
    if points < 1:
        raise ValueError("points must be >= 1")
    if points == 1:
        return [int(round(n_min))]
    a, b = math.log10(n_min), math.log10(n_max)
    return [int(round(10 ** (a + (b - a) * k / (points - 1)))) for k in range(points)]
