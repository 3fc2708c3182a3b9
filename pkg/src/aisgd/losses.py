"""Loss families of the linear-predictor form: loss(theta, (x, y)) = f(x.theta, y).

Each family exposes the scalar value f(u, y), its first derivative in u, its
(non-negative) second derivative, and, where one exists, a global bound on
|f'(u, y)|.  The full gradient in theta is then f'(x.theta, y) * x, which is
what makes a one-dimensional reduction of the implicit update possible.

An optional L2 coefficient ``lam`` rides along on the loss object; the
penalty lam * ||theta||^2 / 2 itself is applied by the solvers, never here.

Everything is scalar ``math`` arithmetic on purpose: these functions sit in
the inner loop of the fixed-point solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def _sigmoid(t: float) -> float:
    # stable in both tails
    if t >= 0.0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def _exp(u: float) -> float:
    try:
        return math.exp(u)
    except OverflowError:
        return math.inf


def _check_uy(u: float, y: float) -> None:
    if not (math.isfinite(u) and math.isfinite(y)):
        raise ValueError("loss inputs must be finite")


def _check_pm1(y: float) -> None:
    if y != 1.0 and y != -1.0:
        raise ValueError("labels must be +1 or -1 for this loss family")


class GlmLoss:
    """Base class: convex scalar loss with derivatives and an L2 coefficient."""

    lam: float
    name: str

    def value(self, u: float, y: float) -> float:
        raise NotImplementedError

    def deriv(self, u: float, y: float) -> float:
        raise NotImplementedError

    def second_deriv(self, u: float, y: float) -> float:
        raise NotImplementedError

    def deriv_bound(self, y: float) -> float | None:
        """Global bound B with |f'(u, y)| <= B, or None if unbounded."""
        return None


@dataclass(frozen=True)
class SquaredLoss(GlmLoss):
    """f(u, y) = (y - u)^2, no 1/2 factor."""

    lam: float = 0.0
    name = "squared"

    def value(self, u, y):
        _check_uy(u, y)
        r = y - u
        return r * r

    def deriv(self, u, y):
        _check_uy(u, y)
        return -2.0 * (y - u)

    def second_deriv(self, u, y):
        _check_uy(u, y)
        return 2.0

    def deriv_bound(self, y):
        return None


@dataclass(frozen=True)
class LogisticLoss(GlmLoss):
    """f(u, y) = log(1 + exp(-y*u)) with labels y in {-1, +1}."""

    lam: float = 0.0
    name = "logistic"

    def value(self, u, y):
        _check_uy(u, y)
        _check_pm1(y)
        m = -y * u
        if m > 0.0:
            return m + math.log1p(math.exp(-m))
        return math.log1p(math.exp(m))

    def deriv(self, u, y):
        _check_uy(u, y)
        _check_pm1(y)
        return -y * _sigmoid(-y * u)

    def second_deriv(self, u, y):
        _check_uy(u, y)
        _check_pm1(y)
        s = _sigmoid(y * u)
        return s * (1.0 - s)

    def deriv_bound(self, y):
        return 1.0


@dataclass(frozen=True)
class PoissonLoss(GlmLoss):
    """f(u, y) = exp(u) - y*u with counts y >= 0."""

    lam: float = 0.0
    name = "poisson"

    @staticmethod
    def _check_y(y: float) -> None:
        if y < 0 or y != math.floor(y):
            raise ValueError("Poisson outcomes must be non-negative integers")

    def value(self, u, y):
        _check_uy(u, y)
        self._check_y(y)
        return _exp(u) - y * u

    def deriv(self, u, y):
        _check_uy(u, y)
        self._check_y(y)
        return _exp(u) - y

    def second_deriv(self, u, y):
        _check_uy(u, y)
        self._check_y(y)
        return _exp(u)

    def deriv_bound(self, y):
        return None


@dataclass(frozen=True)
class SmoothedHingeLoss(GlmLoss):
    """Hinge on the margin m = y*u, quadratically smoothed on [1-delta, 1].

    Zero for m >= 1, linear with slope -1 for m <= 1-delta, and the quadratic
    (1-m)^2 / (2*delta) in between, so the derivative is continuous and the
    curvature is 1/delta on the smoothing window.
    """

    delta: float = 0.5
    lam: float = 0.0
    name = "hinge"

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("smoothing width delta must be positive")

    def value(self, u, y):
        _check_uy(u, y)
        _check_pm1(y)
        m = y * u
        if m >= 1.0:
            return 0.0
        if m <= 1.0 - self.delta:
            return 1.0 - m - self.delta / 2.0
        d = 1.0 - m
        return d * d / (2.0 * self.delta)

    def deriv(self, u, y):
        _check_uy(u, y)
        _check_pm1(y)
        m = y * u
        if m >= 1.0:
            return 0.0
        if m <= 1.0 - self.delta:
            return -y
        return -y * (1.0 - m) / self.delta

    def second_deriv(self, u, y):
        _check_uy(u, y)
        _check_pm1(y)
        m = y * u
        if 1.0 - self.delta < m < 1.0:
            return 1.0 / self.delta
        return 0.0

    def deriv_bound(self, y):
        return 1.0


def loss_from_name(name: str, lam: float = 0.0) -> GlmLoss:
    """Build a loss from its config/CLI name: squared|logistic|poisson|hinge:D."""
    if lam < 0:
        raise ValueError("L2 coefficient lam must be >= 0")
    key = name.strip().lower()
    if key == "squared":
        return SquaredLoss(lam=lam)
    if key == "logistic":
        return LogisticLoss(lam=lam)
    if key == "poisson":
        return PoissonLoss(lam=lam)
    if key == "hinge":
        return SmoothedHingeLoss(lam=lam)
    if key.startswith("hinge:"):
        return SmoothedHingeLoss(delta=float(key.split(":", 1)[1]), lam=lam)
    raise ValueError(
        f"unknown loss {name!r}; expected squared, logistic, poisson or hinge:<delta>"
    )
