"""Per-graph pipeline and the Monte Carlo recovery-rate benchmark."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import BenchError, MethodError, ParameterError, QSDError
from .estimators import (
    Method,
    Prediction,
    classify,
    mixed_score,
    qsd_score,
    simple_vote_score,
    spectral_baseline,
)
from .model import LabeledGraph, SbmParams, generate_plsbm, giant_component

logger = logging.getLogger(__name__)

CSV_FIELDS = ("trial", "method", "recovery_rate", "error_rate", "giant_component_size", "seconds")
ALL_METHODS = (Method.QSD, Method.SIMPLE_VOTE, Method.MIXED, Method.SPECTRAL)
BENCH_TOL = 1e-10
# Sparse giant components can have eigengaps near 1e-3; the library default
# (100 sqrt(n) + 1000) is too tight for them.
BENCH_MAX_ITER = 200_000
FAILURE_LIMIT = 0.2


def _run_component(h: LabeledGraph, methods, params, tol, max_iter, timings=None, errors=None):
    """Requested predictions on a connected graph ``h`` (local ids).

    With an ``errors`` dict, a failing method is recorded there and skipped;
    otherwise the failure is raised as :class:`MethodError`.
    """
    out = {}
    state = {}

    def qsd():
        if "qsd" not in state:
            state["qsd"] = qsd_score(h, tol, max_iter, "dominant")
        return state["qsd"]

    steps = {
        Method.QSD: lambda: classify(qsd()),
        Method.SIMPLE_VOTE: lambda: classify(simple_vote_score(h)),
        Method.MIXED: lambda: classify(mixed_score(h, params, tol, max_iter, "dominant", qsd())),
        Method.SPECTRAL: lambda: spectral_baseline(h, tol, max_iter),
    }
    for m in methods:
        t0 = time.perf_counter()
        try:
            out[m] = steps[m]()
        except QSDError as exc:
            if errors is None:
                raise MethodError(m.value, exc) from exc
            errors[m] = MethodError(m.value, exc)
        if timings is not None:
            timings[m] = time.perf_counter() - t0
    return out


def _globalize(pred: Prediction, comp, g: LabeledGraph) -> Prediction:
    nodes = comp.to_global(pred.nodes)
    err = None
    truth = g.sigma[nodes]
    if np.all(truth != 0):
        err = float(np.mean(pred.labels != truth)) if nodes.size else 0.0
    return Prediction(pred.method, nodes, pred.labels, err)


def _check_methods(methods, params):
    methods = tuple(dict.fromkeys(Method.parse(m) for m in methods))
    if Method.MIXED in methods and params is None:
        raise ParameterError("the mixed method needs SBM parameters (a, b, delta, n)")
    # mixed reuses the QSD scores, so compute QSD first whenever mixed is requested
    return tuple(sorted(methods, key=ALL_METHODS.index))


def run_single(g: LabeledGraph, methods=ALL_METHODS, params: SbmParams | None = None,
               tol: float = BENCH_TOL, max_iter: int = BENCH_MAX_ITER) -> dict:
    """Predictions for ``methods`` on the giant component of ``g`` (global node ids).

    Only unrevealed giant-component nodes are classified; ``error_rate`` is set
    when they all carry ground truth.
    """
    methods = _check_methods(methods, params)
    comp = giant_component(g)
    preds = _run_component(comp.graph, methods, params, tol, max_iter)
    return {m: _globalize(p, comp, g) for m, p in preds.items() if m in methods}


# ------------------------------------------------------------------- benchmark


@dataclass
class BenchConfig:
    params: SbmParams
    trials: int = 20
    base_seed: int = 0
    methods: tuple = (Method.QSD, Method.SIMPLE_VOTE, Method.SPECTRAL)
    output: Path | None = None
    tol: float = BENCH_TOL
    max_iter: int = BENCH_MAX_ITER
    workers: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        self.methods = _check_methods(self.methods, self.params)
        if self.output is not None:
            self.output = Path(self.output)

    def seed(self, trial: int) -> int:
        return self.base_seed + trial

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "trials": self.trials,
            "base_seed": self.base_seed,
            "methods": [m.value for m in self.methods],
            "output": None if self.output is None else str(self.output),
            "tol": self.tol,
            "max_iter": self.max_iter,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, d: dict) -> BenchConfig:
        d = dict(d)
        p = d.pop("params")
        params = p if isinstance(p, SbmParams) else SbmParams(**p)
        unknown = set(d) - {"trials", "base_seed", "methods", "output", "tol", "max_iter", "workers"}
        if unknown:
            raise ParameterError(f"unknown config field(s): {sorted(unknown)}")
        return cls(params=params, **d)

    @classmethod
    def from_json(cls, path) -> BenchConfig:
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class BenchResult:
    config: BenchConfig
    rows: list = field(default_factory=list)
    trial_seconds: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def rates(self, method) -> np.ndarray:
        method = Method.parse(method)
        return np.array([r["recovery_rate"] for r in self.rows
                         if r["method"] == method.value and r["recovery_rate"] is not None])

    def summary(self) -> dict:
        out = {}
        for m in self.config.methods:
            x = self.rates(m)
            out[m.value] = {
                "mean": float(x.mean()) if x.size else None,
                "std": float(x.std()) if x.size else None,
                "min": float(x.min()) if x.size else None,
                "max": float(x.max()) if x.size else None,
                "trials": int(x.size),
            }
        return out

    @property
    def failed_trials(self) -> int:
        return len({f["trial"] for f in self.failures})

    def to_csv(self, timestamp: bool = True) -> str:
        buf = io.StringIO()
        if timestamp:
            buf.write(f"# qsdcluster bench {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in self.rows:
            w.writerow([r["trial"], r["method"], _fmt(r["recovery_rate"]), _fmt(r["error_rate"]),
                        r["giant_component_size"], f"{r['seconds']:.6f}"])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "summary": self.summary(),
            "failed_trials": self.failed_trials,
            "failures": self.failures,
            "trial_seconds": self.trial_seconds,
        }


def _fmt(x):
    return "nan" if x is None else repr(float(x))


def _trial(cfg: BenchConfig, trial: int):
    t0 = time.perf_counter()
    g = generate_plsbm(cfg.params, cfg.seed(trial))
    comp = giant_component(g)
    h = comp.graph
    rows, failures = [], []
    timings, errors = {}, {}
    preds = _run_component(h, cfg.methods, cfg.params, cfg.tol, cfg.max_iter, timings, errors)
    for m in cfg.methods:
        row = dict(trial=trial, method=m.value, recovery_rate=None, error_rate=None,
                   giant_component_size=comp.size, seconds=timings[m])
        if m in preds:
            pred = preds[m]
            err = float(np.mean(pred.labels != h.sigma[pred.nodes])) if pred.nodes.size else 0.0
            row.update(recovery_rate=1.0 - err, error_rate=err)
        else:
            logger.warning("trial %d: %s", trial, errors[m])
            failures.append({"trial": trial, "method": m.value, "error": str(errors[m])})
        rows.append(row)
    return rows, failures, time.perf_counter() - t0


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("QSD_WORKERS", "1"))
    return max(1, int(workers))


def run_bench(cfg: BenchConfig) -> BenchResult:
    """Generate one PL-SBM per trial (seed ``base_seed + trial``) and score every method.

    Failing (trial, method) pairs are recorded and skipped; if at least 20% of
    the trials had a failure a :class:`BenchError` carrying the result is raised.
    """
    p = cfg.params
    if p.p > 1.0 or p.q > 1.0:
        raise ParameterError(f"edge probability exceeds 1 (p={p.p:.4g}, q={p.q:.4g})")
    workers = resolve_workers(cfg.workers)
    trials = range(cfg.trials)
    if workers == 1:
        outcomes = [_trial(cfg, t) for t in trials]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda t: _trial(cfg, t), trials))
    res = BenchResult(cfg)
    for rows, failures, secs in outcomes:
        res.rows.extend(rows)
        res.failures.extend(failures)
        res.trial_seconds.append(secs)
    if res.failed_trials >= FAILURE_LIMIT * cfg.trials:
        err = BenchError(f"{res.failed_trials} of {cfg.trials} trials failed")
        err.result = res
        raise err
    return res


def write_outputs(res: BenchResult, csv_path, timestamp: bool = True) -> tuple[Path, Path]:
    csv_path = Path(csv_path)
    csv_path.write_text(res.to_csv(timestamp))
    json_path = csv_path.with_suffix(".json")
    json_path.write_text(json.dumps(res.to_json(), indent=2) + "\n")
    return csv_path, json_path
