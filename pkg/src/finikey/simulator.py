"""Monte Carlo checks of the parameter-estimation bound and of single runs.

Randomness comes from Philox streams keyed by ``(seed, block)``, where a block is
a fixed run of ``BLOCK_TRIALS`` consecutive trials, so results depend only on
the seed and never on how blocks are scheduled.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .entropy import ProtocolSpec
from .finite_key import DEFAULT_F, EpsilonBudget, KeyRateResult, delta_v, key_length_at, total_epsilon
from .optimizer import optimize_split

BLOCK_TRIALS = 4096
DEFAULT_WORK_BUDGET = 10**10
MAX_RUN_SIGNALS = 10**8


class WorkBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class TrialSpec:
    q_true: float
    m: int
    trials: int
    eps_pe: float = 1e-3
    d: int = 2
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.q_true <= 1.0:
            raise ValueError(f"q_true must lie in [0, 1], got {self.q_true}")
        if self.m < 1 or self.trials < 1:
            raise ValueError("m and trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SimRunReport:
    trials: int
    violation_count: int
    violation_fraction: float
    delta_v_used: float
    mean_abs_deviation: float
    max_abs_deviation: float

    def to_dict(self) -> dict:
        return asdict(self)


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _run_block(spec: TrialSpec, block: int, dv: float) -> tuple[int, float, float]:
    size = min(BLOCK_TRIALS, spec.trials - block * BLOCK_TRIALS)
    # errors among m i.i.d. Bernoulli(q) outcomes, one binomial variate per trial
    errors = block_rng(spec.seed, block).binomial(spec.m, spec.q_true, size=size)
    dev = np.abs(errors / spec.m - spec.q_true)
    return int(np.count_nonzero(dev > dv)), float(dev.sum()), float(dev.max())


def validate_delta_v(spec: TrialSpec, work_budget: int = DEFAULT_WORK_BUDGET,
                     workers: int | None = None) -> SimRunReport:
    """Empirical frequency with which the estimated rate misses by more than delta_v."""
    if spec.trials * spec.m > work_budget:
        raise WorkBudgetExceeded(f"trials*m = {spec.trials * spec.m} exceeds work budget {work_budget}")
    dv = delta_v(spec.m, spec.eps_pe, spec.d)
    blocks = range(-(-spec.trials // BLOCK_TRIALS))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _run_block(spec, b, dv), blocks))
    else:
        parts = [_run_block(spec, b, dv) for b in blocks]
    count = sum(p[0] for p in parts)
    return SimRunReport(
        trials=spec.trials,
        violation_count=count,
        violation_fraction=count / spec.trials,
        delta_v_used=dv,
        mean_abs_deviation=sum(p[1] for p in parts) / spec.trials,
        max_abs_deviation=max(p[2] for p in parts),
    )


def estimation_indices(rng: np.random.Generator, N: int, m: int) -> np.ndarray:
    """Uniformly random size-``m`` subset of ``range(N)``, without replacement."""
    return rng.choice(N, size=m, replace=False)


def simulate_run(N: int, q_true: float, spec: ProtocolSpec, budget: EpsilonBudget,
                 f: float = DEFAULT_F, seed: int = 0, n: int | None = None) -> KeyRateResult:
    """Sample one run and compute its key length from the sampled error rate.

    ``n`` defaults to the optimised raw-key length at ``q_true``.
    """
    N = int(N)
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if N > MAX_RUN_SIGNALS:
        raise WorkBudgetExceeded(f"N = {N} exceeds {MAX_RUN_SIGNALS} simulated signals")
    if n is None:
        n = optimize_split(N, q_true, total_epsilon(budget), spec, f).best_n
    m = N - n
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    errors = rng.random(N) < q_true
    q_hat = float(np.count_nonzero(errors[estimation_indices(rng, N, m)])) / m
    return key_length_at(N, n, min(q_hat, spec.q_max), spec, budget, f)
