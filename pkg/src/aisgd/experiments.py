"""Config-driven benchmark runner, sensitivity sweeps, and trace emission.

A benchmark config is flat ``key = value`` text (lists comma-separated,
``#`` comments allowed).  Required keys: ``task``, ``algorithms``, ``loss``,
``schedule.kind`` plus its parameters, ``n`` and ``p`` (or ``data.path``),
``seed``, ``out``.  Optional: ``lambda``, ``noise_sd``, ``theta_star_norm``,
``init_norm``, ``passes``, ``eval_every``, ``test_fraction``, ``test.path``.

Every (algorithm, schedule) pair becomes one run and one CSV trace with
columns ``run_id,n,metric,diverged,wall_ms``; floats carry 17 significant
digits so reruns with the same seed are byte-identical apart from wall_ms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace as dc_replace
from pathlib import Path

import numpy as np

from .datagen import (
    Dataset,
    SyntheticSpec,
    excess_risk,
    make_normal_design,
    mean_loss,
    read_libsvm,
    shuffle_dataset,
    split_dataset,
)
from .losses import GlmLoss, loss_from_name
from .rates import ConstantRate, LearningRate, PolynomialRate, XuRate
from .solvers import ALGORITHMS, RunResult, TracePoint, run_stream
from .vectors import Sample, SparseVector, dot, sq_norm

XU_AUTO = "xu:auto"

# Child-stream tags for seed-derived direction vectors.
_STREAM_THETA_STAR = 10
_STREAM_THETA0 = 11
_STREAM_CALIBRATE = 12

SWEEP_AXES = ("lambda", "gamma_constant", "gamma1", "eta0")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    """Everything one benchmark invocation needs."""

    task: str
    algorithms: list[str]
    loss: GlmLoss
    schedules: list  # LearningRate entries, or the XU_AUTO sentinel
    seed: int
    out_dir: Path | None = None
    n_samples: int | None = None
    dim: int | None = None
    data_path: Path | None = None
    test_path: Path | None = None
    test_fraction: float | None = None
    passes: int = 1
    eval_every: int = 1000
    noise_sd: float = 1.0
    theta_star_norm: float = 0.0
    init_norm: float = 0.0

    def validate(self) -> None:
        if self.task not in ("linear", "logistic"):
            raise ConfigError("task must be 'linear' or 'logistic'")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(
                    f"unknown algorithm {a!r}; valid: {', '.join(ALGORITHMS)}"
                )
        if not self.schedules:
            raise ConfigError("at least one learning-rate schedule is required")
        if self.data_path is None and (self.n_samples is None or self.dim is None):
            raise ConfigError("either data.path or both n and p are required")
        if self.passes < 1:
            raise ConfigError("passes must be >= 1")
        if self.eval_every < 1:
            raise ConfigError("eval_every must be >= 1")
        if self.test_fraction is not None and not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must lie in (0, 1)")


def parse_config_text(text: str) -> dict[str, str]:
    """Flat key = value lines into a raw string mapping."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = s.split("=", 1)
        raw[key.strip()] = value.strip()
    return raw


def _split_list(value: str) -> list[str]:
    return [tok.strip() for tok in value.split(",") if tok.strip()]


def _schedules_from_raw(raw: dict[str, str]) -> list:
    kind = raw.get("schedule.kind")
    if kind is None:
        raise ConfigError("schedule.kind is required")
    kind = kind.lower()
    try:
        if kind in ("constant", "const"):
            gammas = _split_list(raw.get("schedule.gamma", ""))
            if not gammas:
                raise ConfigError("constant schedules need schedule.gamma")
            return [ConstantRate(float(g)) for g in gammas]
        if kind in ("polynomial", "poly"):
            g1s = _split_list(raw.get("schedule.gamma1", ""))
            exp = raw.get("schedule.exponent")
            if not g1s or exp is None:
                raise ConfigError(
                    "polynomial schedules need schedule.gamma1 and schedule.exponent"
                )
            return [PolynomialRate(float(g), float(exp)) for g in g1s]
        if kind == "xu":
            etas = _split_list(raw.get("schedule.eta0", ""))
            if not etas:
                raise ConfigError("xu schedules need schedule.eta0 (a value or 'auto')")
            return [XU_AUTO if e == "auto" else XuRate(float(e)) for e in etas]
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad schedule parameter: {exc}") from None
    raise ConfigError(f"unknown schedule.kind {kind!r}")


def build_config(raw: dict[str, str]) -> ExperimentConfig:
    """Raw key/value strings into a validated ExperimentConfig."""
    for key in ("task", "algorithms", "loss", "seed", "out"):
        if key not in raw:
            raise ConfigError(f"missing required config key {key!r}")
    try:
        lam = float(raw.get("lambda", "0"))
        loss = loss_from_name(raw["loss"], lam=lam)
        config = ExperimentConfig(
            task=raw["task"].lower(),
            algorithms=[a.lower() for a in _split_list(raw["algorithms"])],
            loss=loss,
            schedules=_schedules_from_raw(raw),
            seed=int(raw["seed"]),
            out_dir=Path(raw["out"]),
            n_samples=int(raw["n"]) if "n" in raw else None,
            dim=int(raw["p"]) if "p" in raw else None,
            data_path=Path(raw["data.path"]) if "data.path" in raw else None,
            test_path=Path(raw["test.path"]) if "test.path" in raw else None,
            test_fraction=float(raw["test_fraction"]) if "test_fraction" in raw else None,
            passes=int(raw.get("passes", "1")),
            eval_every=int(raw.get("eval_every", "1000")),
            noise_sd=float(raw.get("noise_sd", "1.0")),
            theta_star_norm=float(raw.get("theta_star_norm", "0")),
            init_norm=float(raw.get("init_norm", "0")),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad config value: {exc}") from None
    config.validate()
    return config


def load_config(path, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Read a config file, apply flag overrides, validate."""
    text = Path(path).read_text(encoding="utf-8")
    raw = parse_config_text(text)
    if overrides:
        raw.update(overrides)
    return build_config(raw)


def _unit_vector(seed: int, tag: int, p: int) -> np.ndarray:
    rng = np.random.default_rng([seed, tag])
    v = rng.standard_normal(p)
    return v / np.linalg.norm(v)


def classification_error(theta: np.ndarray, test: Dataset) -> float:
    """Fraction of samples with sign(x.theta) != y; sign(0) counts as +1."""
    wrong = 0
    for s in test:
        pred = 1.0 if dot(s.x, theta) >= 0.0 else -1.0
        if pred != s.y:
            wrong += 1
    return wrong / len(test)


def _rebind_dim(data: Dataset, p: int) -> Dataset:
    if data.dim == p:
        return data
    samples = [
        Sample(SparseVector(s.x.indices, s.x.values, p), s.y)
        if isinstance(s.x, SparseVector)
        else s
        for s in data
    ]
    return Dataset(samples, dim=p, storage=data.storage, spec=data.spec)


def _materialize(config: ExperimentConfig):
    """Train/test datasets plus the synthetic spec when one exists."""
    if config.data_path is not None:
        train = read_libsvm(config.data_path)
        test = None
        if config.test_path is not None:
            test = read_libsvm(config.test_path, dim=train.dim)
            train = _rebind_dim(train, test.dim)
        elif config.test_fraction is not None:
            train, test = split_dataset(train, config.test_fraction)
        return None, train, test

    p = config.dim
    theta_star = (
        config.theta_star_norm * _unit_vector(config.seed, _STREAM_THETA_STAR, p)
        if config.theta_star_norm
        else None
    )
    spec = SyntheticSpec(
        n_samples=config.n_samples,
        dim=p,
        theta_star=theta_star,
        noise_sd=config.noise_sd,
        seed=config.seed,
        task=config.task,
    )
    full = make_normal_design(spec)
    if config.test_fraction is not None:
        train, test = split_dataset(full, config.test_fraction)
    else:
        train, test = full, None
    return spec, train, test


def _make_evaluator(config: ExperimentConfig, spec, train: Dataset, test: Dataset | None):
    if spec is not None and config.task == "linear":
        return "excess_risk", lambda th: excess_risk(th, spec)
    evalset = test if test is not None else train
    name = "test" if test is not None else "train"
    if config.loss.name in ("logistic", "hinge"):
        if evalset.storage == "dense":
            x = np.stack([s.x for s in evalset])
            yv = np.array([s.y for s in evalset])

            def fast_error(th):
                pred = np.where(x @ th >= 0.0, 1.0, -1.0)
                return float(np.mean(pred != yv))

            return f"{name}_error", fast_error
        return f"{name}_error", lambda th: classification_error(th, evalset)
    return f"{name}_loss", lambda th: mean_loss(th, evalset, config.loss)


def calibrate_eta0(train: Dataset, loss: GlmLoss, algorithm: str, seed: int) -> float:
    """Pick eta0 for the xu schedule from a small deterministic pilot run.

    Candidates 2**k / R2hat for k = -6..4, where R2hat is the mean squared
    feature norm of a held-out-seed subset; each candidate trains for
    min(1000, N/10) iterations and the lowest mean training loss on the
    subset wins.
    """
    n_cal = min(1000, max(1, len(train) // 10))
    subset = Dataset(
        shuffle_dataset(train, seed + _STREAM_CALIBRATE).samples[:n_cal],
        dim=train.dim,
        storage=train.storage,
    )
    r2_hat = float(np.mean([sq_norm(s.x) for s in subset]))
    if r2_hat <= 0:
        raise ConfigError("cannot calibrate eta0: all-zero features")
    best_eta, best_loss = None, math.inf
    for k in range(-6, 5):
        eta0 = 2.0**k / r2_hat
        result = run_stream(
            algorithm,
            loss,
            XuRate(eta0),
            subset,
            eval_every=len(subset),
            evaluator=lambda th: mean_loss(th, subset, loss),
        )
        final = result.final_metric
        if math.isfinite(final) and final < best_loss:
            best_eta, best_loss = eta0, final
    if best_eta is None:
        raise ConfigError("eta0 calibration failed: every pilot run diverged")
    return best_eta


def _resolve_schedules(config: ExperimentConfig, train: Dataset) -> list[LearningRate]:
    resolved = []
    for sched in config.schedules:
        if sched == XU_AUTO:
            eta0 = calibrate_eta0(train, config.loss, config.algorithms[0], config.seed)
            resolved.append(XuRate(eta0))
        else:
            resolved.append(sched)
    return resolved


def _eval_positions(n_train: int, eval_every: int, passes: int) -> set[int]:
    # ceil(n_train / eval_every) rows per pass: every multiple of eval_every
    # within the pass, plus the pass end.
    positions: set[int] = set()
    for k in range(passes):
        base = k * n_train
        positions.update(base + j for j in range(eval_every, n_train + 1, eval_every))
        positions.add(base + n_train)
    return positions


def write_trace_csv(path, trace: list[TracePoint]) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write("run_id,n,metric,diverged,wall_ms\n")
        for pt in trace:
            fh.write(
                f"{pt.run_id},{pt.n},{pt.metric:.17g},"
                f"{'true' if pt.diverged else 'false'},{pt.wall_ms:.3f}\n"
            )


def run_benchmark(config: ExperimentConfig, *, write_csv: bool = True) -> list[RunResult]:
    """One run per (algorithm, schedule), each with its own CSV trace.

    Diverged runs finish with flagged rows; they never abort the batch.
    """
    config.validate()
    if write_csv and config.out_dir is None:
        raise ConfigError("an output directory is required to write CSV traces")
    spec, train, test = _materialize(config)
    if config.eval_every > len(train):
        raise ConfigError("eval_every exceeds the training-set size")
    metric_name, evaluator = _make_evaluator(config, spec, train, test)
    schedules = _resolve_schedules(config, train)
    positions = _eval_positions(len(train), config.eval_every, config.passes)
    theta0 = (
        config.init_norm * _unit_vector(config.seed, _STREAM_THETA0, train.dim)
        if config.init_norm
        else np.zeros(train.dim)
    )
    if write_csv:
        config.out_dir.mkdir(parents=True, exist_ok=True)

    results = []
    for algo in config.algorithms:
        for sched in schedules:
            run_id = f"{algo}-{sched.label()}"
            stream = (s for _ in range(config.passes) for s in train)
            result = run_stream(
                algo,
                config.loss,
                sched,
                stream,
                eval_every=config.eval_every,
                evaluator=evaluator,
                theta0=theta0,
                eval_at=positions,
                run_id=run_id,
            )
            if write_csv:
                write_trace_csv(config.out_dir / f"{run_id}.csv", result.trace)
            results.append(result)
    return results


def _override_for_axis(config: ExperimentConfig, axis: str, value: float) -> ExperimentConfig:
    if axis == "lambda":
        return dc_replace(config, loss=dc_replace(config.loss, lam=value))
    if axis == "gamma_constant":
        return dc_replace(config, schedules=[ConstantRate(value)])
    if axis == "gamma1":
        base = config.schedules[0]
        exponent = base.exponent if isinstance(base, PolynomialRate) else 2.0 / 3.0
        return dc_replace(config, schedules=[PolynomialRate(value, exponent)])
    if axis == "eta0":
        return dc_replace(config, schedules=[XuRate(value)])
    raise ConfigError(f"unknown sweep axis {axis!r}; valid: {', '.join(SWEEP_AXES)}")


@dataclass
class SweepResult:
    """Final metric per (axis value, algorithm), with divergence flags."""

    axis: str
    values: list[float]
    algorithms: list[str]
    finals: np.ndarray
    diverged: np.ndarray
    csv_path: Path | None = None

    def spread(self, algorithm: str) -> float:
        """max - min of the final metric across the sweep for one algorithm."""
        col = self.finals[:, self.algorithms.index(algorithm)]
        return float(np.max(col) - np.min(col))


def sensitivity_sweep(
    config: ExperimentConfig, axis: str, values, *, write_csv: bool = True
) -> SweepResult:
    """Rerun the benchmark at each value of one hyperparameter axis."""
    config.validate()
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; valid: {', '.join(SWEEP_AXES)}")
    values = [float(v) for v in values]
    if not values:
        raise ConfigError("sweep needs at least one value")
    if len(config.schedules) != 1:
        raise ConfigError("sweeps require exactly one base schedule")

    finals = np.empty((len(values), len(config.algorithms)))
    diverged = np.zeros_like(finals, dtype=bool)
    for i, value in enumerate(values):
        sub = _override_for_axis(config, axis, value)
        if write_csv:
            sub = dc_replace(sub, out_dir=config.out_dir / f"{axis}_{value:g}")
        results = run_benchmark(sub, write_csv=write_csv)
        by_algo = {r.algorithm: r for r in results}
        for j, algo in enumerate(config.algorithms):
            finals[i, j] = by_algo[algo].final_metric
            diverged[i, j] = by_algo[algo].diverged

    csv_path = None
    if write_csv:
        config.out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = config.out_dir / f"sweep_{axis}.csv"
        with csv_path.open("w", encoding="utf-8") as fh:
            fh.write("value," + ",".join(config.algorithms) + "\n")
            for i, value in enumerate(values):
                row = ",".join(f"{finals[i, j]:.17g}" for j in range(len(config.algorithms)))
                fh.write(f"{value:.17g},{row}\n")
    return SweepResult(
        axis=axis,
        values=values,
        algorithms=list(config.algorithms),
        finals=finals,
        diverged=diverged,
        csv_path=csv_path,
    )


def fit_loglog_slope(trace, window_fraction: float = 0.5) -> float:
    """OLS slope of log(metric) vs log(n) over the trailing window.

    Needs at least 10 finite points in the window; finite non-positive
    metrics are an error since their log is undefined.
    """
    if isinstance(trace, RunResult):
        trace = trace.trace
    pts = list(trace)
    if not 0.0 < window_fraction < 1.0:
        raise ValueError("window_fraction must lie in (0, 1)")
    k = max(1, math.ceil(len(pts) * window_fraction))
    xs, ys = [], []
    for pt in pts[-k:]:
        if not math.isfinite(pt.metric):
            continue
        if pt.metric <= 0:
            raise ValueError("non-positive metric in slope window")
        xs.append(math.log(pt.n))
        ys.append(math.log(pt.metric))
    if len(xs) < 10:
        raise ValueError("need at least 10 finite trace points in the window")
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)
