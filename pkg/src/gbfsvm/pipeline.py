"""Single-shot operations behind the service endpoints: generate one ball
cover, or train one model on one dataset. The noise-sweep lives in bench.
"""

from __future__ import annotations

import time

import numpy as np

from .bench import MODEL_ALIASES, load_dataset
from .data_io import Dataset, NoiseSpec, inject_label_noise, normalize_minmax, split
from .granular_ball import (BallGenConfig, attach_membership_from_samples,
                            attach_membership_from_function, generate_balls)
from .membership import fit_class_geometry, membership_value, membership_values
from .svm_core import (BallTrainingSet, ModelConfig, SolverFailure, accuracy,
                       make_pso_config, train)
from .tfn import TfnBallTrainingSet, make_tfn_pso_config, train_tfn

BALL_MODELS = ("gbsvm", "gbfsvm", "tfn")


def _fuzzify(d: Dataset, epsilon: float):
    geometry = fit_class_geometry(d, epsilon)
    return d.with_memberships(membership_values(d.features, d.labels, geometry)), geometry


def _attach(balls, d: Dataset, geometry, mode: str):
    if mode == "samples":
        return attach_membership_from_samples(balls, d)
    if mode == "center":
        return attach_membership_from_function(
            balls, lambda c, y: membership_value(c, y, geometry))
    raise ValueError(f"membership mode must be 'samples' or 'center', got {mode!r}")


def make_balls(spec: str, label_column: str | int = -1, purity: float = 0.9,
               radius_mode: str = "mean_distance", epsilon: float = 1e-6,
               membership_mode: str = "samples", normalize: bool = True,
               noise: float = 0.0, seed: int = 0) -> dict:
    """Cover one whole dataset with purity-constrained balls.

    Optional label noise (flipped before covering) makes the effect of the
    purity threshold visible without running a full benchmark.
    """
    data = load_dataset(spec, label_column)
    if normalize:
        data = normalize_minmax(data)
    if noise > 0:
        data = inject_label_noise(data, NoiseSpec(noise, seed))
    t0 = time.perf_counter()
    data, geometry = _fuzzify(data, epsilon)
    balls = generate_balls(data, BallGenConfig(purity_threshold=purity, radius_mode=radius_mode))
    balls = _attach(balls, data, geometry, membership_mode)
    elapsed = time.perf_counter() - t0
    return {
        "dataset": data.name,
        "n": data.n,
        "d": data.d,
        "purity_threshold": purity,
        "radius_mode": radius_mode,
        "noise": noise,
        "n_balls": len(balls),
        "wall_time": elapsed,
        "balls": balls.to_records(),
    }


def train_model(spec: str, model: str = "gbfsvm", C: float = 10.0, purity: float = 0.9,
                lam: float = 0.9, noise: float = 0.0, test_fraction: float = 0.3,
                runs: int = 1, seed: int = 0, radius_mode: str = "mean_distance",
                epsilon: float = 1e-6, membership_mode: str = "samples",
                normalize: bool = True, label_column: str | int = -1,
                pso_pop: int | None = None, pso_iters: int = 1050,
                pso_inertia: float = 0.5, pso_c1: float = 1.6, pso_c2: float = 1.6,
                pso_penalty: float | None = None) -> dict:
    """Train one model, multi-start over optimizer seeds seed..seed+runs-1.

    The kept run is the feasible one with the highest dual objective (never
    test accuracy, which is reported but not selected on). Label noise hits
    the training fold only.
    """
    model = MODEL_ALIASES.get(model, model)
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test fraction must lie in (0, 1), got {test_fraction}")
    data = load_dataset(spec, label_column)
    if normalize:
        data = normalize_minmax(data)
    train_d, test_d = split(data, test_fraction, seed=seed)
    if noise > 0:
        train_d = inject_label_noise(train_d, NoiseSpec(noise, seed + int(round(noise * 100))))

    t0 = time.perf_counter()
    train_d, geometry = _fuzzify(train_d, epsilon)
    ball_purity = None
    if model in BALL_MODELS:
        balls = generate_balls(train_d,
                               BallGenConfig(purity_threshold=purity, radius_mode=radius_mode))
        balls = _attach(balls, train_d, geometry, membership_mode)
        ts = BallTrainingSet.from_balls(balls)
        ball_purity = purity
    else:
        ts = BallTrainingSet.from_points(train_d)

    overrides = dict(max_iter=pso_iters, inertia=pso_inertia, c1=pso_c1, c2=pso_c2)
    if pso_pop is not None:
        overrides["pop"] = pso_pop
    if pso_penalty is not None:
        overrides["penalty_coefficient"] = pso_penalty

    run_records = []
    best = None  # (objective, record index, w, b, solution-ish fields)
    worst_gap = 0.0
    for k in range(runs):
        run_seed = seed + k
        try:
            if model == "tfn":
                tts = TfnBallTrainingSet.from_ball_training_set(ts, lam)
                sol = train_tfn(tts, C, make_tfn_pso_config(tts, C, seed=run_seed, **overrides))
            else:
                sol = train(ts, ModelConfig(C=C, variant=model),
                            make_pso_config(ts, C, seed=run_seed, **overrides))
        except SolverFailure as exc:
            worst_gap = max(worst_gap, exc.gap)
            run_records.append({"seed": run_seed, "objective": None,
                                "test_accuracy": None, "error": str(exc)})
            continue
        test_acc = accuracy(sol.w, sol.b, test_d)
        run_records.append({"seed": run_seed, "objective": sol.objective,
                            "test_accuracy": test_acc, "error": None})
        if best is None or sol.objective > best[0]:
            best = (sol.objective, run_seed, sol)
    elapsed = time.perf_counter() - t0

    if best is None:
        raise SolverFailure(worst_gap, 1e-3)
    _, best_seed, sol = best
    return {
        "dataset": data.name,
        "model": model,
        "C": C,
        "purity_threshold": ball_purity,
        "lam": lam if model == "tfn" else None,
        "noise": noise,
        "n_train": train_d.n,
        "n_test": test_d.n,
        "units": ts.m,
        "w": [float(v) for v in sol.w],
        "b": float(sol.b),
        "objective": float(sol.objective),
        "feasibility_gap": float(sol.feasibility_gap),
        "b_from_fallback": bool(sol.b_from_fallback),
        "train_accuracy": accuracy(sol.w, sol.b, train_d),
        "test_accuracy": accuracy(sol.w, sol.b, test_d),
        "selected_seed": best_seed,
        "runs": run_records,
        "wall_time": elapsed,
    }
