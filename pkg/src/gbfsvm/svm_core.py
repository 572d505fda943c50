"""Dual objective, model recovery and prediction for the granular-ball fuzzy
SVM and its degenerate baselines (granular-ball SVM, fuzzy SVM, plain SVM).

A training set is m balls with centers c_i, radii r_i, labels y_i and
memberships delta_i. With A = sum alpha_i y_i c_i and B = sum alpha_i r_i the
dual fitness is

    f(alpha) = -1/2 ||A||^2 + 1/2 B^2 + | ||A|| - B | * B + sum alpha_i

maximized subject to sum alpha_i y_i = 0 and 0 <= alpha_i <= delta_i * C.
Radii identically zero collapses this to the classical point SVM dual, and
memberships identically one removes the fuzzy weighting, which is exactly how
the baselines are obtained.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import pso
from .data_io import Dataset, _frozen

VARIANTS = ("svm", "fsvm", "gbsvm", "gbfsvm")

B_INTERIOR_TOL_FACTOR = 1e-6  # interior multipliers: tol = factor * C


class SolverFailure(RuntimeError):
    """The optimizer produced no candidate meeting the equality tolerance."""

    def __init__(self, gap: float, tolerance: float):
        super().__init__(f"no feasible multiplier vector: best |sum alpha_i y_i| = {gap:.3e} "
                         f"exceeds tolerance {tolerance:.1e}")
        self.gap = gap
        self.tolerance = tolerance


class DegenerateSolution(RuntimeError):
    """The multiplier vector carries no separating direction (||A|| = 0)."""


@dataclass(frozen=True)
class BallTrainingSet:
    """Centers, radii, labels and memberships of m training balls.

    Point-based training is the special case radii == 0 (each point a
    singleton ball); unweighted training is memberships == 1.
    """

    centers: np.ndarray
    radii: np.ndarray
    labels: np.ndarray
    memberships: np.ndarray

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float)
        radii = np.asarray(self.radii, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        memberships = np.asarray(self.memberships, dtype=float)
        m = len(centers)
        if centers.ndim != 2 or m == 0:
            raise ValueError("centers must be a nonempty m x d matrix")
        if radii.shape != (m,) or labels.shape != (m,) or memberships.shape != (m,):
            raise ValueError("radii, labels and memberships must all have length m")
        if np.any(radii < 0):
            raise ValueError("radii must be nonnegative")
        if not np.all(np.isin(labels, (-1, 1))):
            raise ValueError("labels must be +1 or -1")
        if not np.all((memberships > 0) & (memberships <= 1)):
            raise ValueError("memberships must lie in (0, 1]")
        object.__setattr__(self, "centers", _frozen(centers))
        object.__setattr__(self, "radii", _frozen(radii))
        object.__setattr__(self, "labels", _frozen(labels))
        object.__setattr__(self, "memberships", _frozen(memberships))

    @property
    def m(self) -> int:
        return len(self.centers)

    @property
    def d(self) -> int:
        return self.centers.shape[1]

    @classmethod
    def from_points(cls, d: Dataset, memberships: np.ndarray | None = None) -> "BallTrainingSet":
        """Each sample becomes a singleton ball of radius zero."""
        mem = memberships if memberships is not None else (
            d.memberships if d.memberships is not None else np.ones(d.n)
        )
        return cls(d.features, np.zeros(d.n), d.labels, mem)

    @classmethod
    def from_balls(cls, fbs) -> "BallTrainingSet":
        return cls(fbs.centers(), fbs.radii(), fbs.labels(), fbs.memberships())


@dataclass(frozen=True)
class ModelConfig:
    C: float = 10.0
    variant: str = "gbfsvm"

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError(f"C must be positive, got {self.C}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")


def apply_variant(ts: BallTrainingSet, variant: str) -> BallTrainingSet:
    """Degenerate the training set: zero radii for point models (svm, fsvm),
    unit memberships for unweighted models (svm, gbsvm)."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    radii = np.zeros(ts.m) if variant in ("svm", "fsvm") else ts.radii
    memberships = np.ones(ts.m) if variant in ("svm", "gbsvm") else ts.memberships
    return BallTrainingSet(ts.centers, radii, ts.labels, memberships)


@dataclass(frozen=True)
class DualSolution:
    """Solved multipliers plus the recovered separating plane."""

    alpha: np.ndarray
    w: np.ndarray
    b: float
    objective: float
    feasibility_gap: float
    variant: str = "gbfsvm"
    seed: int = 0
    b_from_fallback: bool = False

    def to_json(self) -> str:
        return json.dumps(
            {
                "alpha": [float(a) for a in self.alpha],
                "w": [float(v) for v in self.w],
                "b": float(self.b),
                "objective": float(self.objective),
                "feasibility_gap": float(self.feasibility_gap),
                "variant": self.variant,
                "seed": int(self.seed),
                "b_from_fallback": bool(self.b_from_fallback),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "DualSolution":
        obj = json.loads(text)
        return cls(
            np.array(obj["alpha"], dtype=float),
            np.array(obj["w"], dtype=float),
            float(obj["b"]),
            float(obj["objective"]),
            float(obj["feasibility_gap"]),
            obj.get("variant", "gbfsvm"),
            int(obj.get("seed", 0)),
            bool(obj.get("b_from_fallback", False)),
        )


def compute_A_B(alpha: np.ndarray, ts: BallTrainingSet):
    """A = sum alpha_i y_i c_i, B = sum alpha_i r_i.

    alpha may be a single (m,) vector or a (k, m) batch; A and B broadcast
    accordingly.
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape[-1] != ts.m:
        raise ValueError(f"alpha length {alpha.shape[-1]} does not match m = {ts.m}")
    A = (alpha * ts.labels) @ ts.centers
    B = alpha @ ts.radii
    return A, B


def gbfsvm_dual_objective(alpha: np.ndarray, ts: BallTrainingSet):
    """Dual fitness -1/2 ||A||^2 + 1/2 B^2 + | ||A|| - B | B + sum alpha_i.

    Batched like compute_A_B. With radii == 0 this equals the classical SVM
    dual sum alpha_i - 1/2 ||sum alpha_i y_i x_i||^2 exactly.
    """
    A, B = compute_A_B(alpha, ts)
    nA = np.linalg.norm(A, axis=-1)
    return -0.5 * nA * nA + 0.5 * B * B + np.abs(nA - B) * B + np.asarray(alpha).sum(axis=-1)


def recover_w(alpha: np.ndarray, ts: BallTrainingSet) -> np.ndarray:
    """w = (||A|| - B) A / ||A||, so ||w|| = | ||A|| - B |.

    Raises DegenerateSolution when ||A|| = 0: such multipliers carry no
    separating direction. ||A|| = B yields the zero vector (boundary case,
    left to the caller to judge).
    """
    A, B = compute_A_B(np.asarray(alpha, dtype=float), ts)
    nA = float(np.linalg.norm(A))
    if nA == 0.0:
        raise DegenerateSolution("||A|| = 0: multipliers carry no separating direction")
    return (nA - B) / nA * A


def _margins(w: np.ndarray, b, ts: BallTrainingSet):
    """y_i (w . c_i + b) - ||w|| r_i, broadcasting over a vector of b values."""
    norm_w = np.linalg.norm(w)
    proj = ts.centers @ w
    b = np.asarray(b, dtype=float)
    return ts.labels[:, None] * (proj[:, None] + b) - norm_w * ts.radii[:, None]


def recover_b(alpha: np.ndarray, ts: BallTrainingSet, w: np.ndarray, C: float) -> tuple[float, bool]:
    """Plane offset from interior multipliers; hinge-grid fallback otherwise.

    For every interior multiplier (tolerance 1e-6 * C away from both box
    walls) b = (1 + ||w|| r_i) / y_i - w . c_i; the estimates are averaged.
    With no interior multiplier, b minimizes the membership-weighted hinge
    loss over a deterministic 1-D candidate grid; the flag in the returned
    pair records that fallback.
    """
    alpha = np.asarray(alpha, dtype=float)
    if ts.m == 0:
        raise ValueError("empty training set")
    tol = B_INTERIOR_TOL_FACTOR * C
    upper = ts.memberships * C
    interior = (alpha > tol) & (alpha < upper - tol)
    norm_w = float(np.linalg.norm(w))
    estimates = (1.0 + norm_w * ts.radii) / ts.labels - ts.centers @ w
    if interior.any():
        return float(estimates[interior].mean()), False
    # fallback grid: every per-ball boundary offset plus a uniform sweep
    lo, hi = float(estimates.min()) - 1.0, float(estimates.max()) + 1.0
    candidates = np.unique(np.concatenate([estimates, np.linspace(lo, hi, 201)]))
    hinge = np.maximum(0.0, 1.0 - _margins(w, candidates, ts))
    loss = (ts.memberships[:, None] * hinge).sum(axis=0)
    return float(candidates[int(np.argmin(loss))]), True


def predict(w: np.ndarray, b: float, x: np.ndarray) -> int:
    """sign(w . x + b); an exact zero maps to +1."""
    return 1 if float(np.dot(w, x) + b) >= 0.0 else -1


def predict_batch(w: np.ndarray, b: float, X: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(X, dtype=float) @ w + b >= 0.0, 1, -1)


def accuracy(w: np.ndarray, b: float, d: Dataset) -> float:
    return float(np.mean(predict_batch(w, b, d.features) == d.labels))


def make_pso_config(ts: BallTrainingSet, C: float, seed: int = 0, **overrides) -> pso.PsoConfig:
    """Box [0, delta_i C] with the package's penalty default 1e3 * C."""
    defaults = dict(
        lower=np.zeros(ts.m),
        upper=ts.memberships * C,
        penalty_coefficient=1e3 * C,
        seed=seed,
    )
    defaults.update(overrides)
    return pso.PsoConfig(**defaults)


def train(ts: BallTrainingSet, mc: ModelConfig, cfg: pso.PsoConfig) -> DualSolution:
    """Maximize the dual by PSO, then recover the separating plane.

    The variant degeneracies are applied to ts before solving (idempotent if
    the caller already applied them). Raises SolverFailure when the best
    candidate misses the equality tolerance and DegenerateSolution when the
    winning multipliers have ||A|| = 0.
    """
    ts = apply_variant(ts, mc.variant)
    y = ts.labels.astype(float)

    def fitness(X):
        return gbfsvm_dual_objective(X, ts)

    def constraint(X):
        return np.asarray(X) @ y

    result = pso.optimize(fitness, constraint, cfg)
    if not result.feasible:
        raise SolverFailure(result.residual, cfg.equality_tolerance)
    w = recover_w(result.position, ts)
    b, fallback = recover_b(result.position, ts, w, mc.C)
    return DualSolution(
        alpha=result.position,
        w=w,
        b=b,
        objective=result.value,
        feasibility_gap=result.residual,
        variant=mc.variant,
        seed=cfg.seed,
        b_from_fallback=fallback,
    )
