"""Noise-sweep benchmark: train point and ball models across label-noise
levels and report best/mean clean-test accuracy plus wall-clock cost.

Protocol per dataset: load, min-max normalize, stratified split, then for
each noise level flip that fraction of *training* labels and evaluate on the
untouched test fold. Every model sees the same noisy training fold and the
same per-run optimizer seeds, so comparisons are paired. Timing attributes
shared preparation honestly: membership fitting counts toward the fuzzy
models, ball generation toward the ball models.
"""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass, asdict

import numpy as np

from . import synth
from .data_io import Dataset, NoiseSpec, inject_label_noise, load_csv, normalize_minmax, split
from .granular_ball import (BallGenConfig, attach_membership_from_samples,
                            attach_membership_from_function, generate_balls, RADIUS_MODES)
from .membership import fit_class_geometry, membership_value, membership_values
from . import pso
from .svm_core import (BallTrainingSet, accuracy, apply_variant, gbfsvm_dual_objective,
                       make_pso_config, recover_b, recover_w)
from .tfn import (TfnBallTrainingSet, make_tfn_pso_config, tfn_dual_objective,
                  tfn_recover_b, tfn_recover_w)

MODELS = ("svm", "fsvm", "gbsvm", "gbfsvm", "tfn")
MODEL_ALIASES = {"gbfsvm-tfn": "tfn"}
DEFAULT_NOISE_LEVELS = (0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30)
PURITY_GRID = (0.70, 0.80, 0.90, 0.95)
MEMBERSHIP_MODES = ("samples", "center")


class BenchConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce a sweep byte for byte (except timing)."""

    datasets: tuple = ("synth:fourclass", "synth:breastcancer")
    models: tuple = ("svm", "fsvm", "gbsvm", "gbfsvm")
    noise_levels: tuple = DEFAULT_NOISE_LEVELS
    C: float = 10.0
    purity_threshold: float | None = None  # None: pick from PURITY_GRID on a validation fold
    lam: float = 0.9
    runs_per_cell: int = 4
    seed: int = 0
    test_fraction: float = 0.3
    epsilon: float = 1e-6
    radius_mode: str = "mean_distance"
    membership_mode: str = "samples"
    label_column: str | int = -1
    pso_pop: int | None = None
    pso_iters: int = 1050
    pso_inertia: float = 0.5
    pso_c1: float = 1.6
    pso_c2: float = 1.6
    pso_penalty: float | None = None

    def __post_init__(self):
        if not self.datasets:
            raise BenchConfigError("at least one dataset is required")
        if not self.models:
            raise BenchConfigError("at least one model is required")
        object.__setattr__(self, "models",
                           tuple(MODEL_ALIASES.get(m, m) for m in self.models))
        for m in self.models:
            if m not in MODELS:
                raise BenchConfigError(f"unknown model {m!r}; known: {MODELS}")
        for nl in self.noise_levels:
            if not 0.0 <= nl <= 0.5:
                raise BenchConfigError(f"noise level {nl} outside [0, 0.5]")
        if self.C <= 0:
            raise BenchConfigError(f"C must be positive, got {self.C}")
        if self.purity_threshold is not None and not 0.5 < self.purity_threshold <= 1.0:
            raise BenchConfigError(f"purity threshold {self.purity_threshold} outside (0.5, 1]")
        if not 0.0 < self.lam <= 1.0:
            raise BenchConfigError(f"lam {self.lam} outside (0, 1]")
        if self.runs_per_cell < 1:
            raise BenchConfigError("runs_per_cell must be at least 1")
        if self.radius_mode not in RADIUS_MODES:
            raise BenchConfigError(f"radius_mode must be one of {RADIUS_MODES}")
        if self.membership_mode not in MEMBERSHIP_MODES:
            raise BenchConfigError(f"membership_mode must be one of {MEMBERSHIP_MODES}")

    def pso_overrides(self) -> dict:
        out = {"max_iter": self.pso_iters, "inertia": self.pso_inertia,
               "c1": self.pso_c1, "c2": self.pso_c2}
        if self.pso_pop is not None:
            out["pop"] = self.pso_pop
        if self.pso_penalty is not None:
            out["penalty_coefficient"] = self.pso_penalty
        return out


@dataclass(frozen=True)
class CellResult:
    """One (dataset, noise level, model) cell of the sweep."""

    dataset: str
    model: str
    noise: float
    accuracies: tuple = ()
    best_accuracy: float = float("nan")
    mean_accuracy: float = float("nan")
    feasible_runs: int = 0
    wall_time: float = 0.0
    units: int = 0  # training points for point models, balls for ball models
    purity: float | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    cells: tuple
    selected_purity: tuple = ()  # ((dataset, noise, purity), ...)

    def cell(self, dataset: str, model: str, noise: float) -> CellResult:
        for c in self.cells:
            if c.dataset == dataset and c.model == model and abs(c.noise - noise) < 1e-12:
                return c
        raise KeyError((dataset, model, noise))

    def to_json(self) -> str:
        payload = {
            "config": asdict(self.config),
            "selected_purity": [[name, noise, p] for name, noise, p in self.selected_purity],
            "cells": [asdict(c) for c in self.cells],
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        obj = json.loads(text)
        cfgd = obj["config"]
        for key in ("datasets", "models", "noise_levels"):
            cfgd[key] = tuple(cfgd[key])
        cfg = ExperimentConfig(**cfgd)
        cells = tuple(
            CellResult(**{**c, "accuracies": tuple(c["accuracies"])}) for c in obj["cells"]
        )
        selected = tuple((name, float(noise), float(p))
                         for name, noise, p in obj["selected_purity"])
        return cls(cfg, cells, selected)


def load_dataset(spec: str, label_column: str | int = -1) -> Dataset:
    """Dispatch ``synth:`` specs to the generators, anything else to CSV."""
    if synth.is_synthetic_spec(spec):
        return synth.resolve(spec)
    return load_csv(spec, label_column)


def _ball_config(cfg: ExperimentConfig, purity: float) -> BallGenConfig:
    return BallGenConfig(purity_threshold=purity, radius_mode=cfg.radius_mode)


def _attach(balls, train_d: Dataset, geometry, mode: str):
    if mode == "samples":
        return attach_membership_from_samples(balls, train_d)
    return attach_membership_from_function(
        balls, lambda c, y: membership_value(c, y, geometry))


def _train_once(model: str, ts_points: BallTrainingSet, ts_balls: BallTrainingSet | None,
                cfg: ExperimentConfig, seed: int):
    """Train one model variant with one optimizer seed; returns (w, b, feasible).

    Unlike the strict single-train endpoint, the sweep keeps the best position
    even when the equality residual misses tolerance: poorly converged
    baselines show up as poor accuracy instead of a hole in the table.
    """
    overrides = cfg.pso_overrides()
    if model == "tfn":
        tts = TfnBallTrainingSet.from_ball_training_set(ts_balls, cfg.lam)
        pc = make_tfn_pso_config(tts, cfg.C, seed=seed, **overrides)
        res = pso.optimize(lambda X: tfn_dual_objective(X, tts),
                           lambda X: np.asarray(X) @ tts.kappa, pc)
        w = tfn_recover_w(res.position, tts)
        b, _ = tfn_recover_b(res.position, tts, w, cfg.C)
        return w, b, res.feasible
    ts = apply_variant(ts_balls if model in ("gbsvm", "gbfsvm") else ts_points, model)
    pc = make_pso_config(ts, cfg.C, seed=seed, **overrides)
    y = ts.labels.astype(float)
    res = pso.optimize(lambda X: gbfsvm_dual_objective(X, ts),
                       lambda X: np.asarray(X) @ y, pc)
    w = recover_w(res.position, ts)
    b, _ = recover_b(res.position, ts, w, cfg.C)
    return w, b, res.feasible


PURITY_SELECTION_SLACK = 0.02  # prefer the coarsest cover within this of the best


MIN_PRODUCTION_BALLS = 5


def _select_purity(train_d: Dataset, cfg: ExperimentConfig) -> float:
    """Pick a purity threshold on a held-out fold of the given training data.

    Called once per noise level with the noisy training fold, since the right
    granularity depends on how corrupted the labels are. A threshold is a
    candidate only if the cover it would actually produce on this training
    fold stays granular: a handful of balls cannot express a margin (the
    threshold collapsed), while a count above a fixed fraction of the fold
    defeats ball-level training and dominates its cost. Candidates are scored
    by training on a sub-fold and validating on the held-out part; among
    thresholds within a small slack of the best score, the smallest wins,
    since coarser covers are cheaper and absorb more label noise. If no
    threshold qualifies, the coarsest is used.
    """
    if cfg.purity_threshold is not None:
        return cfg.purity_threshold
    sub, val = split(train_d, 0.25, seed=cfg.seed + 9973)
    geometry = fit_class_geometry(sub, cfg.epsilon)
    sub = sub.with_memberships(membership_values(sub.features, sub.labels, geometry))
    full_geometry = fit_class_geometry(train_d, cfg.epsilon)
    full = train_d.with_memberships(
        membership_values(train_d.features, train_d.labels, full_geometry))
    max_balls = max(40, train_d.n // 5)
    scores = {}
    for p in PURITY_GRID:
        produced = generate_balls(full, _ball_config(cfg, p))
        if not MIN_PRODUCTION_BALLS <= len(produced) <= max_balls:
            continue
        try:
            # Sanity-train the cover this threshold would actually produce: a
            # collapsed granularity shows up as a cut that misclassifies most
            # of its own (noisy) training fold, whatever a sub-fold rehearsal
            # might say. Uses training labels only, so nothing leaks.
            pts = BallTrainingSet.from_balls(
                _attach(produced, full, full_geometry, cfg.membership_mode))
            w, b, _ = _train_once("gbfsvm", pts, pts, cfg, cfg.seed)
            if accuracy(w, b, full) < 0.5:
                continue
            # Rank survivors by a held-out rehearsal, mirroring the production
            # protocol (best over the same optimizer seeds): a single unlucky
            # seed must not sink a good threshold.
            balls = _attach(generate_balls(sub, _ball_config(cfg, p)), sub, geometry,
                            cfg.membership_mode)
            ts = BallTrainingSet.from_balls(balls)
            scores[p] = max(
                accuracy(w, b, val)
                for w, b, _ in (_train_once("gbfsvm", ts, ts, cfg, cfg.seed + k)
                                for k in range(cfg.runs_per_cell)))
        except Exception:
            continue
    if not scores:
        return PURITY_GRID[0]
    best = max(scores.values())
    for p in PURITY_GRID:
        if p in scores and scores[p] >= best - PURITY_SELECTION_SLACK:
            return p
    return PURITY_GRID[0]


def _noise_seed(cfg: ExperimentConfig, noise: float) -> int:
    return cfg.seed + int(round(noise * 100))


def _spec_name(spec: str) -> str:
    """The dataset name a spec would yield, computable without loading it."""
    if synth.is_synthetic_spec(spec):
        parts = spec.split(":")
        if len(parts) > 2 and parts[2] not in ("", "0"):
            return f"{parts[1]}#{parts[2]}"
        return parts[1]
    import os

    return os.path.splitext(os.path.basename(spec))[0]


def run_experiment(cfg: ExperimentConfig, progress=None) -> ExperimentReport:
    """Run the full sweep sequentially and deterministically.

    A dataset that fails to load or split yields one error cell per
    (noise level, model) and never disturbs the other datasets' cells.
    """

    def say(msg: str):
        if progress is not None:
            progress(msg)

    cells = []
    purities = []
    needs_balls = any(m in ("gbsvm", "gbfsvm", "tfn") for m in cfg.models)
    for spec in cfg.datasets:
        try:
            data = normalize_minmax(load_dataset(spec, cfg.label_column))
            train_d, test_d = split(data, cfg.test_fraction, seed=cfg.seed)
        except Exception as exc:
            err = f"{type(exc).__name__}: {exc}"
            name = _spec_name(spec)
            say(f"{name}: {err}")
            for noise in cfg.noise_levels:
                for model in cfg.models:
                    cells.append(CellResult(dataset=name, model=model, noise=noise, error=err))
            continue
        for noise in cfg.noise_levels:
            noisy = train_d
            if noise > 0:
                noisy = inject_label_noise(train_d, NoiseSpec(noise, _noise_seed(cfg, noise)))
            if needs_balls:
                purity = _select_purity(noisy, cfg)
            else:
                purity = cfg.purity_threshold or PURITY_GRID[0]
            purities.append((data.name, noise, purity))
            say(f"{data.name} noise={noise:.2f}: purity threshold {purity:.2f}")

            t0 = time.perf_counter()
            geometry = fit_class_geometry(noisy, cfg.epsilon)
            noisy = noisy.with_memberships(
                membership_values(noisy.features, noisy.labels, geometry))
            t_membership = time.perf_counter() - t0

            t0 = time.perf_counter()
            balls = generate_balls(noisy, _ball_config(cfg, purity))
            balls = _attach(balls, noisy, geometry, cfg.membership_mode)
            ts_balls = BallTrainingSet.from_balls(balls)
            t_balls = time.perf_counter() - t0

            ts_points = BallTrainingSet.from_points(noisy)
            prep = {
                "svm": 0.0,
                "fsvm": t_membership,
                "gbsvm": t_balls,
                "gbfsvm": t_membership + t_balls,
                "tfn": t_membership + t_balls,
            }
            for model in cfg.models:
                t0 = time.perf_counter()
                accs = []
                feasible_runs = 0
                error = None
                try:
                    for k in range(cfg.runs_per_cell):
                        w, b, feasible = _train_once(model, ts_points, ts_balls, cfg,
                                                     cfg.seed + k)
                        accs.append(accuracy(w, b, test_d))
                        feasible_runs += int(feasible)
                except Exception as exc:  # record, keep sweeping
                    error = f"{type(exc).__name__}: {exc}"
                elapsed = prep[model] + (time.perf_counter() - t0)
                units = ts_balls.m if model in ("gbsvm", "gbfsvm", "tfn") else ts_points.m
                if error is None:
                    cells.append(CellResult(
                        dataset=data.name, model=model, noise=noise,
                        accuracies=tuple(accs),
                        best_accuracy=max(accs), mean_accuracy=float(np.mean(accs)),
                        feasible_runs=feasible_runs,
                        wall_time=elapsed, units=units, purity=purity))
                else:
                    cells.append(CellResult(
                        dataset=data.name, model=model, noise=noise,
                        feasible_runs=feasible_runs,
                        wall_time=elapsed, units=units, purity=purity, error=error))
                say(f"{data.name} noise={noise:.2f} {model}: "
                    + (error if error else f"best={max(accs):.4f}"))
    return ExperimentReport(cfg, tuple(cells), tuple(purities))


# ---------------------------------------------------------------------------
# rendering


def _fmt_acc(value: float) -> str:
    return "n/a" if value != value else f"{value:.4f}"


def _noise_label(noise: float) -> str:
    return f"{int(round(noise * 100))}%"


def _dataset_names(report: ExperimentReport) -> list:
    seen = []
    for c in report.cells:
        if c.dataset not in seen:
            seen.append(c.dataset)
    return seen


def render_accuracy_markdown(report: ExperimentReport, which: str = "best") -> str:
    """Accuracy table: one row per (noise, model), one column per dataset."""
    if which not in ("best", "mean"):
        raise ValueError("which must be 'best' or 'mean'")
    names = _dataset_names(report)
    cfg = report.config
    out = io.StringIO()
    title = "Best" if which == "best" else "Mean"
    out.write(f"### {title} accuracy ({cfg.runs_per_cell} runs)\n\n")
    out.write("| noise | model | " + " | ".join(names) + " |\n")
    out.write("|---|---|" + "---|" * len(names) + "\n")
    for noise in cfg.noise_levels:
        for model in cfg.models:
            row = [_noise_label(noise), model]
            for name in names:
                c = report.cell(name, model, noise)
                row.append(_fmt_acc(c.best_accuracy if which == "best" else c.mean_accuracy))
            out.write("| " + " | ".join(row) + " |\n")
    return out.getvalue()


def render_runtime_markdown(report: ExperimentReport) -> str:
    """Wall-clock seconds summed over the noise sweep, per dataset and model."""
    names = _dataset_names(report)
    cfg = report.config
    out = io.StringIO()
    out.write("### Wall-clock time (s, whole sweep)\n\n")
    out.write("| dataset | " + " | ".join(cfg.models) + " |\n")
    out.write("|---|" + "---|" * len(cfg.models) + "\n")
    for name in names:
        row = [name]
        for model in cfg.models:
            total = sum(c.wall_time for c in report.cells
                        if c.dataset == name and c.model == model)
            row.append(f"{total:.2f}")
        out.write("| " + " | ".join(row) + " |\n")
    return out.getvalue()


def render_markdown(report: ExperimentReport, include_runtime: bool = True) -> str:
    parts = [render_accuracy_markdown(report, "best"),
             render_accuracy_markdown(report, "mean")]
    if include_runtime:
        parts.append(render_runtime_markdown(report))
    return "\n".join(parts)


def render_csv(report: ExperimentReport, include_runtime: bool = True) -> str:
    """Same tables as the markdown renderer, as comment-titled CSV blocks."""
    names = _dataset_names(report)
    cfg = report.config
    out = io.StringIO()
    for which in ("best", "mean"):
        out.write(f"# {which}_accuracy\n")
        out.write("noise,model," + ",".join(names) + "\n")
        for noise in cfg.noise_levels:
            for model in cfg.models:
                row = [_noise_label(noise), model]
                for name in names:
                    c = report.cell(name, model, noise)
                    row.append(_fmt_acc(c.best_accuracy if which == "best" else c.mean_accuracy))
                out.write(",".join(row) + "\n")
        out.write("\n")
    if include_runtime:
        out.write("# wall_time_seconds\n")
        out.write("dataset," + ",".join(cfg.models) + "\n")
        for name in names:
            row = [name]
            for model in cfg.models:
                total = sum(c.wall_time for c in report.cells
                            if c.dataset == name and c.model == model)
                row.append(f"{total:.2f}")
            out.write(",".join(row) + "\n")
    return out.getvalue()
