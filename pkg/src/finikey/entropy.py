"""Entropy primitives and collective-attack conditional-entropy bounds.

All logarithms are base 2; lengths are in bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Protocol(str, Enum):
    BB84 = "bb84"
    SIX_STATE = "six-state"

    @classmethod
    def parse(cls, name: str | "Protocol") -> "Protocol":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {"bb84": cls.BB84, "six-state": cls.SIX_STATE, "sixstate": cls.SIX_STATE, "6state": cls.SIX_STATE}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown protocol {name!r}; expected bb84 or six-state") from None


# Largest QBER at which H(A|E) is meaningful for each protocol. Both bounds reach
# zero at Q = 1/2; the six-state expression turns back up beyond it.
DEFAULT_Q_MAX = {Protocol.BB84: 0.5, Protocol.SIX_STATE: 0.5}


@dataclass(frozen=True)
class ProtocolSpec:
    """Protocol whose H(A|E) bound applies, plus its estimation metadata.

    ``d`` is the number of POVM outcomes used to estimate the error rate and
    ``n_pe`` the number of estimated parameters.
    """

    protocol: Protocol = Protocol.BB84
    d: int = 2
    n_pe: int = 1
    q_max: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol.parse(self.protocol))
        if self.q_max is None:
            object.__setattr__(self, "q_max", DEFAULT_Q_MAX[self.protocol])
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d}")
        if int(self.n_pe) != self.n_pe or self.n_pe < 1:
            raise ValueError(f"n_pe must be an integer >= 1, got {self.n_pe}")
        if not 0.0 < self.q_max <= 0.5:
            raise ValueError(f"q_max must lie in (0, 1/2], got {self.q_max}")

    @classmethod
    def bb84(cls, **kwargs) -> "ProtocolSpec":
        return cls(Protocol.BB84, **kwargs)

    @classmethod
    def six_state(cls, **kwargs) -> "ProtocolSpec":
        return cls(Protocol.SIX_STATE, **kwargs)


def _check_probability(x: float, name: str = "x") -> None:
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def binary_entropy(x: float) -> float:
    """Shannon entropy of a Bernoulli(x) variable, with 0 log 0 = 0."""
    _check_probability(x)
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def _h_ae_bb84(q: float) -> float:
    return 1.0 - binary_entropy(q)


def _h_ae_six_state(q: float) -> float:
    if q == 0.0:
        return 1.0
    arg = (1.0 - 1.5 * q) / (1.0 - q)
    # arg can leave [0, 1] by an ulp near the endpoints
    arg = min(1.0, max(0.0, arg))
    return (1.0 - q) * (1.0 - binary_entropy(arg))


_H_AE = {Protocol.BB84: _h_ae_bb84, Protocol.SIX_STATE: _h_ae_six_state}


def h_ae(spec: ProtocolSpec, q: float) -> float:
    """Eve-minimised H(A|E) per signal under collective attacks at QBER ``q``.

    Raises ValueError when ``q`` exceeds ``spec.q_max``.
    """
    _check_probability(q, "q")
    if q > spec.q_max:
        raise ValueError(f"q={q} exceeds q_max={spec.q_max} for {spec.protocol.value}")
    return max(0.0, _H_AE[spec.protocol](q))


def asymptotic_rate(spec: ProtocolSpec, q: float) -> float:
    """Infinite-key secret fraction H(A|E) - h2(Q); negative below threshold."""
    return h_ae(spec, q) - binary_entropy(q)
