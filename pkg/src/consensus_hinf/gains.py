"""Closed-form L2 gains of the two consensus protocols and protocol selection.

For a connected graph the disturbance-to-consensus-error gain of either
protocol depends only on the algebraic connectivity lambda2 and the tunable
pair (alpha, beta).  Each protocol has a critical beta separating a resonant
branch from a flat branch where the gain equals 1/(alpha*lambda2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError

# Verdict tie band: an eigensolver never returns exactly 1, so the selection
# must be stable under that noise.
TIE_BAND = 1e-9


class Protocol(str, Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


class Branch(str, Enum):
    BELOW_THRESHOLD = "below_threshold"
    AT_OR_ABOVE_THRESHOLD = "at_or_above_threshold"


class Verdict(str, Enum):
    ABSOLUTE_BETTER = "absolute_better"
    RELATIVE_BETTER = "relative_better"
    TIE = "tie"


@dataclass(frozen=True)
class Gains:
    """Tunable coupling gains; both must be strictly positive."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class GainReport:
    """Analytic gain value with the branch that produced it.

    ``value >= 1/(alpha*lambda2)`` always, with equality exactly on the
    at-or-above-threshold branch, where the worst-case frequency is zero.
    """

    protocol: Protocol
    value: float
    branch: Branch
    threshold: float
    worst_freq: float

    def to_json(self) -> dict:
        return {
            "protocol": self.protocol.value,
            "value": self.value,
            "branch": self.branch.value,
            "threshold": self.threshold,
            "worst_freq": self.worst_freq,
        }


@dataclass(frozen=True)
class Selection:
    verdict: Verdict
    lambda2: float

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "lambda2": self.lambda2}


def g1(t: float, gains: Gains) -> float:
    """1/(alpha*t)^2, strictly decreasing on (0, inf)."""
    if t <= 0.0:
        raise DomainError(f"g1 needs t > 0, got {t}")
    return 1.0 / (gains.alpha * t) ** 2


def g2(t: float, gains: Gains) -> float:
    """1/((alpha*t)^2 - (sqrt(D)-1)^2) with D = (alpha*t+1)^2 - beta^2.

    Raises outside the region where D >= 0 and the denominator is positive;
    callers on the below-threshold branch are always inside it.
    """
    if t <= 0.0:
        raise DomainError(f"g2 needs t > 0, got {t}")
    delta = (gains.alpha * t + 1.0) ** 2 - gains.beta**2
    if delta < 0.0:
        raise DomainError(f"g2 discriminant negative at t={t}: {delta}")
    denom = (gains.alpha * t) ** 2 - (math.sqrt(delta) - 1.0) ** 2
    if denom <= 0.0:
        raise DomainError(f"g2 denominator not positive at t={t}: {denom}")
    return 1.0 / denom


def g3(t: float, gains: Gains) -> float:
    """1/((alpha*t)^2 - (sqrt(T)-1)^2) with T = (alpha*t+1)^2 - (beta*t)^2."""
    if t <= 0.0:
        raise DomainError(f"g3 needs t > 0, got {t}")
    theta = (gains.alpha * t + 1.0) ** 2 - (gains.beta * t) ** 2
    if theta < 0.0:
        raise DomainError(f"g3 discriminant negative at t={t}: {theta}")
    denom = (gains.alpha * t) ** 2 - (math.sqrt(theta) - 1.0) ** 2
    if denom <= 0.0:
        raise DomainError(f"g3 denominator not positive at t={t}: {denom}")
    return 1.0 / denom


def critical_beta_absolute(lambda2: float, alpha: float) -> float:
    """sqrt((alpha*lambda2)^2 + 2*alpha*lambda2)."""
    _check_positive(lambda2, alpha)
    return math.sqrt((alpha * lambda2) ** 2 + 2.0 * alpha * lambda2)


def critical_beta_relative(lambda2: float, alpha: float) -> float:
    """sqrt(alpha^2 + 2*alpha/lambda2); equals the absolute threshold / lambda2."""
    _check_positive(lambda2, alpha)
    return math.sqrt(alpha**2 + 2.0 * alpha / lambda2)


def _check_positive(lambda2: float, alpha: float) -> None:
    if not lambda2 > 0.0:
        raise ValueError(f"lambda2 must be positive, got {lambda2}")
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")


def gain_absolute(lambda2: float, gains: Gains) -> GainReport:
    """Closed-form gain of the absolute-velocity protocol."""
    _check_positive(lambda2, gains.alpha)
    threshold = critical_beta_absolute(lambda2, gains.alpha)
    if gains.beta >= threshold:
        return GainReport(
            protocol=Protocol.ABSOLUTE,
            value=1.0 / (gains.alpha * lambda2),
            branch=Branch.AT_OR_ABOVE_THRESHOLD,
            threshold=threshold,
            worst_freq=0.0,
        )
    delta2 = (gains.alpha * lambda2 + 1.0) ** 2 - gains.beta**2
    return GainReport(
        protocol=Protocol.ABSOLUTE,
        value=math.sqrt(g2(lambda2, gains)),
        branch=Branch.BELOW_THRESHOLD,
        threshold=threshold,
        worst_freq=math.sqrt(math.sqrt(delta2) - 1.0),
    )


def gain_relative(lambda2: float, gains: Gains) -> GainReport:
    """Closed-form gain of the relative-velocity protocol."""
    _check_positive(lambda2, gains.alpha)
    threshold = critical_beta_relative(lambda2, gains.alpha)
    if gains.beta >= threshold:
        return GainReport(
            protocol=Protocol.RELATIVE,
            value=1.0 / (gains.alpha * lambda2),
            branch=Branch.AT_OR_ABOVE_THRESHOLD,
            threshold=threshold,
            worst_freq=0.0,
        )
    theta2 = (gains.alpha * lambda2 + 1.0) ** 2 - (gains.beta * lambda2) ** 2
    return GainReport(
        protocol=Protocol.RELATIVE,
        value=math.sqrt(g3(lambda2, gains)),
        branch=Branch.BELOW_THRESHOLD,
        threshold=threshold,
        worst_freq=math.sqrt(math.sqrt(theta2) - 1.0),
    )


def gain(protocol: Protocol, lambda2: float, gains: Gains) -> GainReport:
    if Protocol(protocol) is Protocol.ABSOLUTE:
        return gain_absolute(lambda2, gains)
    return gain_relative(lambda2, gains)


def select_protocol(lambda2: float) -> Selection:
    """Protocol choice from graph structure alone.

    The absolute-velocity protocol wins below lambda2 = 1, the
    relative-velocity one above; within the tie band both perform equally.
    """
    if not lambda2 > 0.0:
        raise ValueError(f"lambda2 must be positive, got {lambda2}")
    if lambda2 < 1.0 - TIE_BAND:
        verdict = Verdict.ABSOLUTE_BETTER
    elif lambda2 > 1.0 + TIE_BAND:
        verdict = Verdict.RELATIVE_BETTER
    else:
        verdict = Verdict.TIE
    return Selection(verdict=verdict, lambda2=lambda2)


def asymptotic_gains(lambda2: float, gains: Gains) -> dict[str, float]:
    """Single-gain limits of both protocol gains.

    Pushing one gain alone saturates: alpha -> inf leaves 1/beta
    (absolute) or 1/(beta*lambda2) (relative); beta -> inf leaves
    1/(alpha*lambda2) for both.
    """
    _check_positive(lambda2, gains.alpha)
    return {
        "absolute_alpha_to_inf": 1.0 / gains.beta,
        "absolute_beta_to_inf": 1.0 / (gains.alpha * lambda2),
        "relative_alpha_to_inf": 1.0 / (gains.beta * lambda2),
        "relative_beta_to_inf": 1.0 / (gains.alpha * lambda2),
    }
