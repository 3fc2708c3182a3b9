"""Learning-rate schedules.

Iterations are 1-indexed: the first consumed sample uses the rate at n = 1,
so a polynomial schedule emits its leading constant ``gamma1`` on the first
step.  All schedules emit positive, non-increasing sequences.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ConstantRate:
    """gamma_n = gamma for every n."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("constant rate must be positive")

    def rate(self, n: int) -> float:
        return self.gamma

    def label(self) -> str:
        return f"const{self.gamma:g}"


@dataclass(frozen=True)
class PolynomialRate:
    """gamma_n = gamma1 * n**(-exponent), exponent in (0.5, 1]."""

    gamma1: float
    exponent: float

    def __post_init__(self):
        if not self.gamma1 > 0:
            raise ValueError("gamma1 must be positive")
        if not 0.5 < self.exponent <= 1.0:
            raise ValueError("polynomial exponent must lie in (0.5, 1]")

    def rate(self, n: int) -> float:
        return self.gamma1 * n ** (-self.exponent)

    def label(self) -> str:
        return f"poly{self.gamma1:g}x{self.exponent:g}"


@dataclass(frozen=True)
class XuRate:
    """gamma_n = eta0 * (1 + eta0 * n)**(-3/4)."""

    eta0: float

    def __post_init__(self):
        if not self.eta0 > 0:
            raise ValueError("eta0 must be positive")

    def rate(self, n: int) -> float:
        return self.eta0 * (1.0 + self.eta0 * n) ** -0.75

    def label(self) -> str:
        return f"xu{self.eta0:g}"


LearningRate = ConstantRate | PolynomialRate | XuRate


def rate_at(schedule: LearningRate, n: int) -> float:
    """Rate gamma_n for 1-indexed iteration n.  Rejects n < 1."""
    if n < 1:
        raise ValueError("iterations are 1-indexed; n must be >= 1")
    return schedule.rate(n)


def rate_from_spec(spec: str) -> LearningRate:
    """Parse a schedule string: "const:G", "poly:G1:EXP" or "xu:ETA0"."""
    parts = spec.split(":")
    kind = parts[0].lower()
    try:
        if kind in ("const", "constant") and len(parts) == 2:
            return ConstantRate(float(parts[1]))
        if kind in ("poly", "polynomial") and len(parts) == 3:
            return PolynomialRate(float(parts[1]), float(parts[2]))
        if kind == "xu" and len(parts) == 2:
            return XuRate(float(parts[1]))
    except ValueError as exc:
        if "must" in str(exc):
            raise
        raise ValueError(f"malformed rate spec: {spec!r}") from exc
    raise ValueError(
        f"unknown rate spec {spec!r}; expected const:G, poly:G1:EXP or xu:ETA0"
    )
