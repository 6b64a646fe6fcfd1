"""Experiment configuration, scenario presets and Monte Carlo orchestration.

Config files are JSON::

    {
      "name": "sparse-multiband-compressive",
      "process": {"kind": "sparse_multiband", "W": 2e9,
                  "bands": [[257.8125e6, 30e6], [601.5625e6, 30e6]]},
      "pattern": {"type": "ruler", "order": 7},
      "L": 128, "q": 7, "N": 1000,
      "solver": "NNLS", "trials": 5, "seed": 0,
      "reference": "welch", "K": 64
    }

``pattern.type`` is one of ``random`` (with optional ``seed``; redrawn until
full rank when the system is overdetermined), ``ruler`` (``order``) or
``explicit`` (``offsets``). ``reference`` is ``welch`` (Nyquist-rate Welch
estimate of the same realization) or ``true`` (exact subband powers).

Seeding: trial ``k`` draws its realization from the substream ``(seed, k)``,
so adding trials never perturbs earlier ones.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Sequence

import numpy as np

from ._rng import substream
from .core import (
    PsdEstimate,
    SamplingPattern,
    TradeoffReport,
    build_measurement_system,
    subband_indices,
    tradeoff,
)
from .errors import McpsdError, PatternError
from .estimator import assemble_u, solve
from .patterns import PatternDiagnostics, diagnose, full_rank_random_pattern, golomb_ruler, random_pattern
from .reference import ErrorMetrics, metrics, welch_subbands
from .sampler import DEFAULT_HALF_LENGTH, coset_sample, fractional_delay
from .synth import ProcessSpec, generate, true_psd


class ConfigError(McpsdError, ValueError):
    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    process: ProcessSpec
    pattern: dict
    L: int
    q: int
    N: int
    solver: str = "LS"
    trials: int = 1
    seed: int = 0
    reference: str = "welch"
    K: int = DEFAULT_HALF_LENGTH
    name: str = "custom"

    def validate(self) -> "ExperimentConfig":
        if not isinstance(self.L, int) or self.L <= 0 or self.L % 2:
            raise ConfigError("L", f"must be a positive even integer, got {self.L!r}")
        if not isinstance(self.q, int) or not 2 <= self.q <= self.L:
            raise ConfigError("q", f"must satisfy 2 <= q <= L = {self.L}, got {self.q!r}")
        if not isinstance(self.N, int) or self.N < 1:
            raise ConfigError("N", f"must be a positive integer, got {self.N!r}")
        if self.solver.upper() not in ("LS", "NNLS"):
            raise ConfigError("solver", f"must be LS or NNLS, got {self.solver!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials", f"must be a positive integer, got {self.trials!r}")
        if self.reference not in ("welch", "true"):
            raise ConfigError("reference", f"must be 'welch' or 'true', got {self.reference!r}")
        if not isinstance(self.K, int) or self.K < 0:
            raise ConfigError("K", f"must be a non-negative integer, got {self.K!r}")
        kind = self.pattern.get("type")
        if kind == "ruler":
            order = self.pattern.get("order")
            try:
                ruler = golomb_ruler(order)
            except ValueError as exc:
                raise ConfigError("pattern.order", str(exc)) from None
            if ruler.order != self.q:
                raise ConfigError("pattern.order", f"ruler order {order} != q = {self.q}")
            if max(ruler.marks) >= self.L:
                raise ConfigError("pattern.order", f"ruler marks exceed L = {self.L}")
        elif kind == "explicit":
            offsets = self.pattern.get("offsets")
            if not isinstance(offsets, (list, tuple)) or len(offsets) != self.q:
                raise ConfigError("pattern.offsets", f"must list exactly q = {self.q} offsets")
            try:
                SamplingPattern(self.L, offsets)
            except PatternError as exc:
                raise ConfigError("pattern.offsets", str(exc)) from None
        elif kind != "random":
            raise ConfigError("pattern.type", f"must be random, ruler or explicit, got {kind!r}")
        return self

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "process": self.process.to_dict(),
            "pattern": dict(self.pattern),
            "L": self.L,
            "q": self.q,
            "N": self.N,
            "solver": self.solver,
            "trials": self.trials,
            "seed": self.seed,
            "reference": self.reference,
            "K": self.K,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        for key in ("process", "pattern", "L", "q", "N"):
            if key not in d:
                raise ConfigError(key, "missing")
        try:
            process = ProcessSpec.from_dict(d.pop("process"))
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError("process", str(exc)) from None
        known = {f for f in cls.__dataclass_fields__} - {"process"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown field")
        return cls(process=process, **d).validate()

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("config", f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes).validate()


# -- presets -----------------------------------------------------------------

MA_LINES = ProcessSpec.ma_with_lines(
    fir=[1, 2, 0, -2, -1],
    lines=[(2.0, 8 * np.pi / 17), (2.0, 11 * np.pi / 20)],
)
SPARSE_MULTIBAND = ProcessSpec.sparse_multiband(
    W=2e9, bands=[(257.8125e6, 30e6), (601.5625e6, 30e6)]
)
NOTCHED = ProcessSpec.notched(W=2e9, stop_bands=[(265.625e6, 80e6), (671.875e6, 80e6)])


def _preset(name, process, pattern, L, q, N, solver="LS", trials=100, reference="welch"):
    return ExperimentConfig(
        process=process, pattern=pattern, L=L, q=q, N=N, solver=solver,
        trials=trials, seed=0, reference=reference, name=name,
    )


PRESETS: dict[str, ExperimentConfig] = {
    p.name: p.validate()
    for p in [
        _preset("ma-lines", MA_LINES, {"type": "random", "seed": 0}, 64, 50, 10000,
                reference="true"),
        _preset("sparse-multiband-noncompressive", SPARSE_MULTIBAND,
                {"type": "random", "seed": 1}, 128, 20, 1000),
        _preset("sparse-multiband-compressive", SPARSE_MULTIBAND,
                {"type": "ruler", "order": 7}, 128, 7, 1000, solver="NNLS"),
        _preset("sparse-multiband-compressive-10k", SPARSE_MULTIBAND,
                {"type": "ruler", "order": 7}, 128, 7, 10000, solver="NNLS"),
        _preset("cognitive-radio", NOTCHED, {"type": "random", "seed": 0}, 64, 25, 4096),
        _preset("cognitive-radio-fine", NOTCHED, {"type": "random", "seed": 0}, 128, 50, 2048),
    ]
}


def preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# -- running -----------------------------------------------------------------


def resolve_pattern(config: ExperimentConfig) -> SamplingPattern:
    """Sampling pattern shared by all trials of an experiment."""
    spec = config.pattern
    if spec["type"] == "ruler":
        return golomb_ruler(spec["order"]).as_pattern(config.L)
    if spec["type"] == "explicit":
        return SamplingPattern(config.L, spec["offsets"])
    seed = spec.get("seed", config.seed)
    if config.q * (config.q - 1) + 1 >= config.L:
        return full_rank_random_pattern(config.L, config.q, seed)[0]
    return random_pattern(config.L, config.q, substream(seed, 0))


@dataclass(frozen=True)
class TrialResult:
    trial: int
    estimate: np.ndarray
    reference: np.ndarray
    metrics: ErrorMetrics

    @property
    def mse(self) -> float:
        return float(np.mean((self.estimate - self.reference) ** 2))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    pattern: SamplingPattern
    trials: list[TrialResult]
    diagnostics: PatternDiagnostics
    tradeoff: TradeoffReport
    seconds: float = 0.0
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def W(self) -> float:
        return self.config.process.W

    @property
    def mean_estimate(self) -> PsdEstimate:
        return PsdEstimate(np.mean([t.estimate for t in self.trials], axis=0), self.W, self.config.L)

    @property
    def mean_reference(self) -> PsdEstimate:
        return PsdEstimate(np.mean([t.reference for t in self.trials], axis=0), self.W, self.config.L)

    @property
    def nse(self) -> np.ndarray:
        return np.array([t.metrics.nse for t in self.trials])

    @property
    def mse(self) -> np.ndarray:
        return np.array([t.mse for t in self.trials])

    def summary(self) -> dict:
        return {
            "name": self.config.name,
            "L": self.config.L,
            "q": self.config.q,
            "N": self.config.N,
            "solver": self.config.solver.upper(),
            "offsets": list(self.pattern.offsets),
            "trials": len(self.trials),
            "nse_mean": float(self.nse.mean()),
            "nse_std": float(self.nse.std()),
            "mse_mean": float(self.mse.mean()),
            "rank": self.diagnostics.rank,
            "condition_number": (
                self.diagnostics.condition_number if self.diagnostics.full_rank else None
            ),
            "regime": self.tradeoff.regime,
            "avg_rate_hz": self.tradeoff.avg_rate_hz,
            "resolution_hz": self.tradeoff.resolution_hz,
        }


def run_trial(config: ExperimentConfig, pattern: SamplingPattern, system, trial: int) -> TrialResult:
    """generate -> coset sample -> fractional delay -> correlate -> solve -> score.

    Each channel acquires ``N + 2K`` samples so that exactly ``N`` delayed
    samples survive edge trimming.
    """
    L, K, N = config.L, config.K, config.N
    x = generate(config.process, (N + 2 * K) * L, substream(config.seed, trial))
    delayed = fractional_delay(coset_sample(x, pattern, N + 2 * K), K)
    u = assemble_u(delayed, system.ordering)
    report = solve(system, u, config.solver, W=config.process.W)
    if config.reference == "true":
        ref = true_psd(config.process, L)
    else:
        ref = welch_subbands(x.samples[K * L : (K + N) * L], L, W=config.process.W)
    return TrialResult(trial, report.estimate.values, ref.values, metrics(report.estimate, ref))


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    config.validate()
    t0 = time.perf_counter()
    pattern = resolve_pattern(config)
    system = build_measurement_system(pattern)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        trials = list(pool.map(lambda k: run_trial(config, pattern, system, k), range(config.trials)))
    return ExperimentResult(
        config=config,
        pattern=pattern,
        trials=trials,
        diagnostics=diagnose(pattern),
        tradeoff=tradeoff(config.L, config.process.W, q=config.q),
        seconds=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class ConsistencyPoint:
    N: int
    mean_squared_error: float
    std_squared_error: float
    mean_nse: float


def consistency_curve(
    config: ExperimentConfig, n_list: Sequence[int], jobs: int = 1
) -> list[ConsistencyPoint]:
    """Mean squared error of the estimate versus samples per channel."""
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError("N", "list must be strictly increasing")
    out = []
    for N in n_list:
        res = run_experiment(config.with_(N=int(N)), jobs=jobs)
        out.append(ConsistencyPoint(int(N), float(res.mse.mean()), float(res.mse.std()),
                                    float(res.nse.mean())))
    return out


# -- CSV emission --------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return repr(float(x))


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def estimates_csv(result: ExperimentResult) -> str:
    est, ref = result.mean_estimate, result.mean_reference
    bounds = est.bounds()
    rows = (
        (l, m, bounds[l, 0], bounds[l, 1], est.values[l], ref.values[l])
        for l, m in enumerate(subband_indices(est.L))
    )
    return _csv(["bandIndex", "m", "fLowHz", "fHighHz", "estimate", "reference"], rows)


def metrics_csv(result: ExperimentResult) -> str:
    rows = ((t.trial, t.metrics.nse, t.metrics.max_abs_error) for t in result.trials)
    return _csv(["trial", "nse", "maxAbsError"], rows)


def consistency_csv(points: Sequence[ConsistencyPoint]) -> str:
    rows = ((p.N, p.mean_squared_error, p.std_squared_error, p.mean_nse) for p in points)
    return _csv(["N", "meanSquaredError", "stdSquaredError", "meanNse"], rows)


def tradeoff_rows(L_range: Sequence[int], W: float, s: Optional[int] = None) -> list[tuple]:
    """One row per ``L``: minimum channel counts, resolution and rates.

    The compressive columns are blank where no compressive gain exists, i.e.
    unless ``2s <= q(q-1)+1 < L`` holds at the compressive minimum.
    """
    rows = []
    for L in L_range:
        rep = tradeoff(int(L), W, s if s is not None and s <= L else None)
        q_nc = rep.min_q_noncompressive
        q_c = rep.min_q_compressive
        if q_c is not None and q_c * (q_c - 1) + 1 >= L:
            q_c = None
        rows.append((
            int(L),
            q_nc,
            q_c,
            rep.resolution_hz,
            q_nc * W / L,
            q_c * W / L if q_c is not None else None,
        ))
    return rows


def emit_tradeoff_table(L_range: Sequence[int], W: float, s: Optional[int] = None) -> str:
    return _csv(
        ["L", "minQ_NC", "minQ_C", "resolutionHz", "rateHz_NC", "rateHz_C"],
        tradeoff_rows(L_range, W, s),
    )
