"""Independent oracles shared by the test modules.

The Newton oracle minimizes the per-sample proximal objective directly in
p-dimensional parameter space, never touching the one-dimensional reduction
or its bracket, so it is a genuinely independent route to the implicit
iterate.
"""

from __future__ import annotations

import numpy as np

from aisgd import Sample


def prox_objective(loss, x, y, theta_prev, gamma, theta, lam=0.0) -> float:
    """(1/(2*gamma)) ||theta - theta_prev||^2 + loss(x.theta, y) + lam ||theta||^2 / 2."""
    d = theta - theta_prev
    val = float(d @ d) / (2.0 * gamma) + loss.value(float(x @ theta), y)
    if lam:
        val += 0.5 * lam * float(theta @ theta)
    return val


def prox_newton(loss, x, y, theta_prev, gamma, lam=0.0, tol=1e-12, max_iter=200):
    """Damped Newton on the proximal objective, with Sherman-Morrison solves."""
    theta = theta_prev.astype(np.float64).copy()
    c = float(x @ x)
    a = 1.0 / gamma + lam
    for _ in range(max_iter):
        u = float(x @ theta)
        grad = (theta - theta_prev) / gamma + loss.deriv(u, y) * x + lam * theta
        if np.linalg.norm(grad) <= tol:
            break
        h2 = loss.second_deriv(u, y)
        # H = a I + h2 x x^T
        direction = grad / a - (h2 * float(x @ grad) / (a * (a + h2 * c))) * x
        base = prox_objective(loss, x, y, theta_prev, gamma, theta, lam)
        decrease = float(grad @ direction)
        step = 1.0
        while step > 1e-14:
            cand = theta - step * direction
            if (
                prox_objective(loss, x, y, theta_prev, gamma, cand, lam)
                <= base - 1e-4 * step * decrease
            ):
                break
            step *= 0.5
        theta = theta - step * direction
    return theta


def random_case(rng, family, p):
    """A moderate-scale random (x, y, theta_prev) for the given loss family."""
    x = rng.standard_normal(p) * rng.uniform(0.3, 1.5)
    theta = rng.standard_normal(p) / np.sqrt(p)
    if family == "squared":
        y = float(rng.standard_normal() * 2.0)
    elif family in ("logistic", "hinge"):
        y = 1.0 if rng.uniform() < 0.5 else -1.0
    elif family == "poisson":
        y = float(rng.integers(0, 8))
    else:
        raise ValueError(family)
    return x, y, theta


def make_sample(x, y) -> Sample:
    return Sample(np.asarray(x, dtype=np.float64), y)
