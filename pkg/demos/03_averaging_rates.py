"""Convergence rates with and without iterate averaging.

With the decaying schedule gamma_n = gamma_1 * n^(-2/3), the unaveraged
implicit iterates lose excess risk like n^(-2/3), while averaging them
reaches the optimal 1/n rate.  Evaluation points are log-spaced so a
least-squares fit of log(metric) on log(n) over the trailing half of the
trace reads the exponent off directly.

Runs in roughly 10 seconds.
"""

import math

import numpy as np

from aisgd import (
    PolynomialRate,
    SquaredLoss,
    SyntheticSpec,
    excess_risk,
    fit_loglog_slope,
    make_normal_design,
    run_stream,
)

N, P, SEED = 100_000, 20, 20
spec = SyntheticSpec(n_samples=N, dim=P, seed=SEED)
train = make_normal_design(spec)
r2 = float(np.sum(spec.eigenvalues))

rng = np.random.default_rng(123)
theta0 = rng.standard_normal(P)
theta0 /= np.linalg.norm(theta0)

schedule = PolynomialRate(1.0 / r2, 2 / 3)
positions = set(int(v) for v in np.unique(np.round(np.logspace(2, math.log10(N), 100))))

print(f"schedule gamma_n = {1.0 / r2:.4f} * n^(-2/3), {N} samples\n")
for algo in ("isgd", "aisgd"):
    result = run_stream(
        algo,
        SquaredLoss(),
        schedule,
        train,
        eval_every=1,
        evaluator=lambda th: excess_risk(th, spec),
        theta0=theta0,
        eval_at=positions,
        run_id=algo,
    )
    slope = fit_loglog_slope(result.trace, window_fraction=0.5)
    print(
        f"{algo:>6}: final excess risk {result.final_metric:.3e}, "
        f"trailing log-log slope {slope:+.3f}"
    )

print(
    "\nExpected exponents: about -2/3 without averaging, about -1 with it"
    "\n(single-path estimates wander a few hundredths around those values)."
    "\nSame iterate sequence underneath; the only difference is what is reported."
)
