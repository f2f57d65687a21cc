"""The finite-key bound: statistical and privacy-amplification corrections and
the secret-key length they imply.

Logarithms in :func:`delta_n`, :func:`leak_ec` and :func:`pa_failure` are base 2;
:func:`delta_v` uses natural logarithms.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

from .entropy import ProtocolSpec, binary_entropy, h_ae

DEFAULT_F = 1.2
DEFAULT_EPS = 1e-3


class ImpreciseEstimateWarning(UserWarning):
    """The fluctuation bound is known to be loose for more than two outcomes."""


def _check_open_unit(x: float, name: str) -> None:
    if not (0.0 < x < 1.0):
        raise ValueError(f"{name} must lie strictly in (0, 1), got {x}")


@dataclass(frozen=True)
class EpsilonBudget:
    """Failure probabilities of the four steps that can go wrong.

    eps_pa: privacy amplification; eps_bar: smoothing; eps_pe: per estimated
    parameter; eps_ec: undetected residual errors after error correction.
    """

    eps_pa: float = DEFAULT_EPS
    eps_bar: float = DEFAULT_EPS
    eps_pe: float = DEFAULT_EPS
    eps_ec: float = DEFAULT_EPS
    n_pe: int = 1

    def __post_init__(self):
        for name in ("eps_pa", "eps_bar", "eps_pe", "eps_ec"):
            _check_open_unit(getattr(self, name), name)
        if int(self.n_pe) != self.n_pe or self.n_pe < 1:
            raise ValueError(f"n_pe must be an integer >= 1, got {self.n_pe}")
        if self.total >= 1.0:
            raise ValueError(f"total epsilon {self.total} must be < 1")

    @property
    def total(self) -> float:
        return total_epsilon(self)

    @classmethod
    def equal_split(cls, eps_total: float, n_pe: int = 1) -> "EpsilonBudget":
        """Every component equal, so that the composed total is ``eps_total``."""
        e = eps_total / (3 + n_pe)
        return cls(e, e, e, e, n_pe)

    @classmethod
    def from_shares(cls, eps_total: float, shares, n_pe: int = 1) -> "EpsilonBudget":
        """Split ``eps_total`` by fractional ``shares`` (pa, bar, pe-block, ec)."""
        s_pa, s_bar, s_pe, s_ec = shares
        norm = s_pa + s_bar + s_pe + s_ec
        return cls(
            eps_total * s_pa / norm,
            eps_total * s_bar / norm,
            eps_total * s_pe / norm / n_pe,
            eps_total * s_ec / norm,
            n_pe,
        )


def total_epsilon(budget: EpsilonBudget) -> float:
    """Composed failure probability; failure probabilities add."""
    return budget.eps_pa + budget.eps_bar + budget.n_pe * budget.eps_pe + budget.eps_ec


@dataclass(frozen=True)
class ChannelObservation:
    q_obs: float
    m: int
    d: int = 2

    def __post_init__(self):
        if not (0.0 <= self.q_obs <= 1.0):
            raise ValueError(f"q_obs must lie in [0, 1], got {self.q_obs}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")


@dataclass(frozen=True)
class RunConfig:
    N: int
    n: int
    f: float = DEFAULT_F
    spec: ProtocolSpec = ProtocolSpec()
    budget: EpsilonBudget = EpsilonBudget()

    def __post_init__(self):
        if self.n < 1 or self.N - self.n < 1:
            raise ValueError(f"need 1 <= n <= N-1, got N={self.N}, n={self.n}")
        if self.f < 1.0:
            raise ValueError(f"f must be >= 1, got {self.f}")

    @property
    def m(self) -> int:
        return self.N - self.n


@dataclass(frozen=True)
class KeyRateResult:
    ell: int
    r_N: float
    q_pess: float
    delta_v: float
    delta_n: float
    leak_per_bit: float
    h_ae_pess: float
    q_clamped: bool = False
    imprecise_dv: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def delta_n(n: int, eps_pa: float, eps_bar: float) -> float:
    """Per-bit privacy-amplification overhead of a raw key of length ``n``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_open_unit(eps_pa, "eps_pa")
    _check_open_unit(eps_bar, "eps_bar")
    return 2.0 / n * math.log2(1.0 / eps_pa) + 7.0 * math.sqrt(math.log2(2.0 / eps_bar) / n)


def delta_v(m: int, eps_pe: float, d: int = 2) -> float:
    """Half-width of the confidence interval on a parameter averaged over ``m`` samples.

    ``eps_pe`` is the probability that the true deviation is larger. Warns with
    :class:`ImpreciseEstimateWarning` when ``d > 2``.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not (0.0 < eps_pe <= 1.0):
        raise ValueError(f"eps_pe must lie in (0, 1], got {eps_pe}")
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if d > 2:
        warnings.warn(f"delta_v is imprecise for d={d} > 2", ImpreciseEstimateWarning, stacklevel=2)
    return math.sqrt((math.log(1.0 / eps_pe) + d * math.log(m + 1.0)) / (2.0 * m))


def leak_ec(n: int, q: float, f: float, eps_ec: float) -> float:
    """Modelled error-correction leakage in bits for ``n`` raw bits at QBER ``q``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not (0.0 <= q <= 0.5):
        raise ValueError(f"q must lie in [0, 1/2], got {q}")
    if f < 1.0:
        raise ValueError(f"f must be >= 1, got {f}")
    _check_open_unit(eps_ec, "eps_ec")
    return f * n * binary_entropy(q) + math.log2(2.0 / eps_ec)


def pa_failure(ell: int, hmin: float) -> float:
    """Privacy-amplification failure probability when hashing to ``ell`` bits."""
    return 2.0 ** (-(hmin - ell) / 2.0)


def key_length(config: RunConfig, obs: ChannelObservation, measured_leak: float | None = None) -> KeyRateResult:
    """Secret-key length of one run.

    The parameter is taken at its pessimistic end ``q_obs + delta_v`` (clamped to
    ``q_max``). ``measured_leak`` replaces the modelled leakage when the actual
    error-correction transcript length is known.
    """
    spec, budget = config.spec, config.budget
    if obs.m != config.m:
        raise ValueError(f"observation m={obs.m} does not match N - n = {config.m}")
    if obs.q_obs > spec.q_max:
        raise ValueError(f"q_obs={obs.q_obs} exceeds q_max={spec.q_max}")
    n = config.n
    dv = delta_v(obs.m, budget.eps_pe, obs.d)
    q_pess = obs.q_obs + dv
    clamped = q_pess > spec.q_max
    if clamped:
        q_pess = spec.q_max
    hae = h_ae(spec, q_pess)
    dn = delta_n(n, budget.eps_pa, budget.eps_bar)
    if measured_leak is None:
        leak = leak_ec(n, min(q_pess, 0.5), config.f, budget.eps_ec)
    else:
        if measured_leak < 0:
            raise ValueError(f"measured_leak must be >= 0, got {measured_leak}")
        leak = float(measured_leak)
    bound = n * (hae - dn) - leak
    ell = max(0, min(n, math.floor(bound)))
    return KeyRateResult(
        ell=ell,
        r_N=ell / config.N,
        q_pess=q_pess,
        delta_v=dv,
        delta_n=dn,
        leak_per_bit=leak / n,
        h_ae_pess=hae,
        q_clamped=clamped,
        imprecise_dv=obs.d > 2,
    )


def key_length_at(N: int, n: int, q_obs: float, spec: ProtocolSpec, budget: EpsilonBudget,
                  f: float = DEFAULT_F, measured_leak: float | None = None) -> KeyRateResult:
    """Shorthand for :func:`key_length` with the observation built from ``N - n``."""
    cfg = RunConfig(N=N, n=n, f=f, spec=spec, budget=budget)
    return key_length(cfg, ChannelObservation(q_obs, N - n, spec.d), measured_leak)
