"""Update rules and the stream-driving loop.

Supported algorithms:

* ``sgd``      - explicit stochastic gradient step.
* ``isgd``     - implicit step: the new iterate appears inside its own
                 gradient, solved per sample via a one-dimensional
                 fixed point (see :func:`solve_fixed_point`).
* ``asgd``     - explicit step + running average of the iterates.
* ``aisgd``    - implicit step + running average.
* ``adagrad``  - explicit step with diagonal adaptive scaling.

For linear-predictor losses the gradient at any theta is f'(x.theta, y) * x,
so the implicit iterate is theta_prev + u* x for a scalar u*, and u* solves

    u = gamma * g((u0 + u*c) / (1 + gamma*lam)),      g(v) = -f'(v, y),

with u0 = x.theta_prev and c = ||x||^2.  Because g is non-increasing for a
convex loss, the root is unique and lies between 0 and
gamma * g(u0 / (1 + gamma*lam)), which gives a guaranteed bisection bracket.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .losses import GlmLoss
from .rates import LearningRate, rate_at
from .vectors import Sample, add_scaled, dot, sq_norm

ALGORITHMS = ("sgd", "isgd", "asgd", "aisgd", "adagrad")
AVERAGED = frozenset({"asgd", "aisgd"})
IMPLICIT = frozenset({"isgd", "aisgd"})

# An iterate counts as diverged when non-finite or larger than this in norm.
DIVERGENCE_NORM = 1e12

ADAGRAD_EPS = 1e-8


class BracketError(RuntimeError):
    """The guaranteed search bracket failed; the loss is not convex in u."""


class ConvergenceError(RuntimeError):
    """The scalar root finder hit its iteration cap before its tolerance."""


@dataclass(frozen=True)
class OptimizerState:
    """Current iterate, its running average, and per-algorithm extras."""

    theta: np.ndarray
    theta_bar: np.ndarray
    n: int = 0
    adagrad_g: np.ndarray | None = None
    algorithm: str = "sgd"


def init_state(theta0: np.ndarray, algorithm: str = "sgd") -> OptimizerState:
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; valid: {', '.join(ALGORITHMS)}")
    theta0 = np.asarray(theta0, dtype=np.float64).copy()
    g = np.zeros_like(theta0) if algorithm == "adagrad" else None
    return OptimizerState(
        theta=theta0, theta_bar=theta0.copy(), n=0, adagrad_g=g, algorithm=algorithm
    )


def reported_estimate(state: OptimizerState) -> np.ndarray:
    """The vector the algorithm reports: the average for asgd/aisgd."""
    return state.theta_bar if state.algorithm in AVERAGED else state.theta


@dataclass(frozen=True)
class FixedPointResult:
    """Solution of the one-dimensional implicit-update equation.

    ``u_star`` is the scalar step along x, ``s_n`` the gradient scaling
    u_star / (gamma * g(u0)), ``u0`` the incoming predictor x.theta_prev,
    ``c`` the squared feature norm, and ``residual`` the absolute error
    |u_star - gamma * g(...)| at the returned point.
    """

    u_star: float
    s_n: float
    u0: float
    c: float
    iterations: int
    residual: float


def solve_fixed_point(
    loss: GlmLoss,
    sample: Sample,
    theta_prev: np.ndarray,
    gamma_n: float,
    tol: float = 1e-15,
    max_iter: int = 200,
) -> FixedPointResult:
    """Solve u = gamma * g((u0 + u*c)/(1 + gamma*lam)) by bracketed bisection.

    ``tol`` is relative to the bracket width |gamma * g|: iteration stops once
    the bracket is narrower than tol * |gamma * g| or floating point cannot
    split it further.  A zero anchor gradient (or a zero feature vector)
    short-circuits to the exact answer with zero iterations.
    """
    if not gamma_n > 0:
        raise ValueError("gamma_n must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    x, y = sample.x, sample.y
    u0 = dot(x, theta_prev)
    c = sq_norm(x)
    shrink = 1.0 + gamma_n * loss.lam

    g_anchor = -loss.deriv(u0 / shrink, y)
    b = gamma_n * g_anchor  # bracket endpoint, 0 excluded or not by sign

    if c == 0.0:
        # g is constant in u; the equation is u = b exactly.
        u_star, iterations, residual = b, 0, 0.0
    elif b == 0.0:
        u_star, iterations, residual = 0.0, 0, 0.0
    else:
        lo, hi = (0.0, b) if b > 0 else (b, 0.0)

        def resid(u: float) -> float:
            return -gamma_n * loss.deriv((u0 + u * c) / shrink, y) - u

        # Monotone non-increasing g guarantees resid(lo) >= 0 >= resid(hi).
        far = resid(b)
        if (b > 0 and far > 0.0) or (b < 0 and far < 0.0):
            raise BracketError(
                "fixed-point bracket violated; loss second derivative is not >= 0"
            )
        width_tol = tol * abs(b)
        iterations = 0
        while hi - lo > width_tol:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break  # bracket no longer splittable in float64
            if resid(mid) >= 0.0:
                lo = mid
            else:
                hi = mid
            iterations += 1
            if iterations >= max_iter:
                if hi - lo > width_tol:
                    raise ConvergenceError(
                        f"no convergence after {max_iter} iterations; "
                        f"residual {abs(resid(0.5 * (lo + hi))):.3e}"
                    )
                break
        u_star = 0.5 * (lo + hi)
        residual = abs(resid(u_star))

    g_raw = g_anchor if shrink == 1.0 else -loss.deriv(u0, y)
    s_n = u_star / (gamma_n * g_raw) if g_raw != 0.0 else 1.0
    return FixedPointResult(
        u_star=u_star, s_n=s_n, u0=u0, c=c, iterations=iterations, residual=residual
    )


def implicit_step(
    state: OptimizerState,
    sample: Sample,
    gamma_n: float,
    loss: GlmLoss,
    tol: float = 1e-15,
) -> OptimizerState:
    """One implicit update: theta_n = theta_prev - gamma * grad at theta_n."""
    res = solve_fixed_point(loss, sample, state.theta, gamma_n, tol=tol)
    theta = state.theta.copy()
    add_scaled(theta, res.u_star, sample.x)
    shrink = 1.0 + gamma_n * loss.lam
    if shrink != 1.0:
        theta /= shrink
    return replace(state, theta=theta, n=state.n + 1)


def explicit_step(
    state: OptimizerState, sample: Sample, gamma_n: float, loss: GlmLoss
) -> OptimizerState:
    """One classic update: theta_n = theta_prev - gamma * grad at theta_prev."""
    if gamma_n < 0:
        raise ValueError("gamma_n must be non-negative")
    d = loss.deriv(dot(sample.x, state.theta), sample.y)
    if loss.lam != 0.0:
        theta = state.theta * (1.0 - gamma_n * loss.lam)
    else:
        theta = state.theta.copy()
    add_scaled(theta, -gamma_n * d, sample.x)
    return replace(state, theta=theta, n=state.n + 1)


def update_average(state: OptimizerState) -> OptimizerState:
    """Fold the current iterate into the running mean of theta_1..theta_n."""
    if state.n < 1:
        raise ValueError("update_average requires at least one completed step")
    bar = state.theta_bar + (state.theta - state.theta_bar) / state.n
    return replace(state, theta_bar=bar)


def adagrad_step(
    state: OptimizerState, sample: Sample, eta: float, loss: GlmLoss
) -> OptimizerState:
    """Diagonal adaptive update: G += g^2; theta -= eta * g / (sqrt(G) + eps)."""
    if state.adagrad_g is None:
        raise ValueError("state has no adagrad accumulator; init with algorithm='adagrad'")
    if eta < 0:
        raise ValueError("eta must be non-negative")
    x = sample.x
    d = loss.deriv(dot(x, state.theta), sample.y)
    grad = np.zeros_like(state.theta)
    add_scaled(grad, d, x)
    if loss.lam != 0.0:
        grad += loss.lam * state.theta
    acc = state.adagrad_g + grad * grad
    theta = state.theta - eta * grad / (np.sqrt(acc) + ADAGRAD_EPS)
    return replace(state, theta=theta, adagrad_g=acc, n=state.n + 1)


@dataclass(frozen=True)
class TracePoint:
    """One evaluation row of a run: the data behind every results plot."""

    run_id: str
    n: int
    metric: float
    diverged: bool
    wall_ms: float


@dataclass
class RunResult:
    """Trace plus final state of one streaming run."""

    run_id: str
    algorithm: str
    trace: list[TracePoint] = field(default_factory=list)
    state: OptimizerState | None = None

    @property
    def diverged(self) -> bool:
        return any(pt.diverged for pt in self.trace)

    @property
    def final_metric(self) -> float:
        return self.trace[-1].metric


def is_diverged(theta: np.ndarray) -> bool:
    if not np.all(np.isfinite(theta)):
        return True
    return float(np.dot(theta, theta)) > DIVERGENCE_NORM * DIVERGENCE_NORM


def run_stream(
    algorithm: str,
    loss: GlmLoss,
    schedule: LearningRate,
    data,
    eval_every: int,
    evaluator,
    *,
    theta0: np.ndarray | None = None,
    tol: float = 1e-15,
    eval_at: set[int] | None = None,
    run_id: str | None = None,
) -> RunResult:
    """Drive one algorithm over a sample stream, evaluating periodically.

    The evaluator is called on the reported estimate (the running average for
    asgd/aisgd, the raw iterate otherwise) every ``eval_every`` samples, or at
    the explicit positions ``eval_at`` when given; with ``eval_at=None`` the
    final sample is always evaluated.  A diverged iterate (non-finite or with
    norm above 1e12) freezes further updates but the stream keeps consuming
    samples and emitting rows flagged ``diverged=True``.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; valid: {', '.join(ALGORITHMS)}")
    if eval_at is None and eval_every < 1:
        raise ValueError("eval_every must be >= 1")
    label = run_id if run_id is not None else algorithm
    averaged = algorithm in AVERAGED
    implicit = algorithm in IMPLICIT

    trace: list[TracePoint] = []
    state: OptimizerState | None = None
    frozen = False
    start = time.perf_counter()

    for sample in data:
        if state is None:
            if theta0 is None:
                theta0 = np.zeros(sample.dim)
            state = init_state(theta0, algorithm)
        n = state.n + 1
        gamma = rate_at(schedule, n)
        if not frozen and is_diverged(state.theta):
            frozen = True
        if frozen:
            state = replace(state, n=n)
        elif implicit:
            state = implicit_step(state, sample, gamma, loss, tol=tol)
        elif algorithm == "adagrad":
            state = adagrad_step(state, sample, gamma, loss)
        else:
            state = explicit_step(state, sample, gamma, loss)
        state = update_average(state)

        if eval_at is not None:
            due = n in eval_at
        else:
            due = n % eval_every == 0
        if due:
            flagged = frozen or is_diverged(state.theta)
            metric = float(evaluator(reported_estimate(state)))
            wall_ms = (time.perf_counter() - start) * 1e3
            trace.append(TracePoint(label, n, metric, flagged, wall_ms))

    if state is None:
        raise ValueError("sample stream yielded no data")
    if eval_at is None and (not trace or trace[-1].n != state.n):
        flagged = frozen or is_diverged(state.theta)
        metric = float(evaluator(reported_estimate(state)))
        wall_ms = (time.perf_counter() - start) * 1e3
        trace.append(TracePoint(label, state.n, metric, flagged, wall_ms))

    return RunResult(run_id=label, algorithm=algorithm, trace=trace, state=state)
