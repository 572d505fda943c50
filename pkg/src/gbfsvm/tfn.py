"""Triangular fuzzy numbers, possibility measures, and the chance-constrained
variant of the ball classifier that treats class labels as fuzzy values.

A ball's membership degree delta is lifted to a triangular fuzzy label; under
a confidence level lam the chance constraints reduce to crisp ("clear")
constraints in which a scalar coefficient kappa replaces the hard label. With
crisp memberships (delta = 1) kappa collapses back to +/-1 and the model
coincides with the unfuzzified ball classifier.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import pso
from .data_io import _frozen
from .svm_core import BallTrainingSet, DegenerateSolution, SolverFailure

logger = logging.getLogger(__name__)

KAPPA_TOL = 1e-9  # coefficients this close to zero give no offset estimate


class FuzzyLabelDomainError(ValueError):
    """Membership degree outside [0.5, 1] (positive) or [-1, -0.5] (negative)."""


@dataclass(frozen=True)
class TriangularFuzzyNumber:
    """(r1, r2, r3) with r1 <= r2 <= r3; r2 is the peak of the triangle."""

    r1: float
    r2: float
    r3: float

    def __post_init__(self):
        if not (math.isfinite(self.r1) and math.isfinite(self.r2) and math.isfinite(self.r3)):
            raise ValueError("triangular fuzzy number components must be finite")
        if not (self.r1 <= self.r2 <= self.r3):
            raise ValueError(f"components must be ordered r1 <= r2 <= r3, got "
                             f"({self.r1}, {self.r2}, {self.r3})")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r1, self.r2, self.r3)


def pos_leq_zero(t: TriangularFuzzyNumber) -> float:
    """Possibility that the fuzzy value is <= 0.

    1 when the peak is already nonpositive, 0 when the whole support is
    positive, and the left-slope crossing r1 / (r1 - r2) in between.
    """
    if t.r2 <= 0.0:
        return 1.0
    if t.r1 > 0.0:
        return 0.0
    return t.r1 / (t.r1 - t.r2)


def chance_leq_zero(t: TriangularFuzzyNumber, lam: float) -> bool:
    """Pos{t <= 0} >= lam, evaluated in closed form as (1-lam) r1 + lam r2 <= 0.

    Valid for lam in (0, 1]; at lam = 0 the possibility comparison is
    vacuously true while the closed form is not, so that value is rejected.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"confidence level must lie in (0, 1], got {lam}")
    return (1.0 - lam) * t.r1 + lam * t.r2 <= 0.0


def fuzzy_label_from_membership(delta: float) -> TriangularFuzzyNumber:
    """Lift a signed membership degree to a triangular fuzzy label.

    Positive-class degrees live in [0.5, 1], negative-class degrees in
    [-1, -0.5]. Both ends are exact: delta = 1 gives (1, 1, 1), delta = -1
    gives (-1, -1, -1), and |delta| = 0.5 gives the maximally vague (-2, 0, 2).
    """
    if 0.5 <= delta <= 1.0:
        return TriangularFuzzyNumber(
            (2.0 * delta * delta + delta - 2.0) / delta,
            2.0 * delta - 1.0,
            (2.0 * delta * delta - 3.0 * delta + 2.0) / delta,
        )
    if -1.0 <= delta <= -0.5:
        return TriangularFuzzyNumber(
            (2.0 * delta * delta + 3.0 * delta + 2.0) / delta,
            2.0 * delta + 1.0,
            (2.0 * delta * delta - delta - 2.0) / delta,
        )
    raise FuzzyLabelDomainError(
        f"membership degree must lie in [0.5, 1] or [-1, -0.5], got {delta}")


def clear_constraint_coefficient(label: TriangularFuzzyNumber, lam: float, positive: bool) -> float:
    """Scalar that replaces the fuzzy label once the chance constraint is
    cleared at confidence lam: (1-lam) r3 + lam r2 for the positive class,
    (1-lam) r1 + lam r2 for the negative class."""
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"confidence level must lie in (0, 1], got {lam}")
    if positive:
        return (1.0 - lam) * label.r3 + lam * label.r2
    return (1.0 - lam) * label.r1 + lam * label.r2


@dataclass(frozen=True)
class TfnBallTrainingSet:
    """Ball training set with cleared fuzzy-label coefficients.

    Balls are ordered positive class first; split_index is the count of
    positive balls. kappa holds the cleared coefficients (nonnegative before
    the split, nonpositive after).
    """

    centers: np.ndarray
    radii: np.ndarray
    kappa: np.ndarray
    split_index: int
    lam: float

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float)
        radii = np.asarray(self.radii, dtype=float)
        kappa = np.asarray(self.kappa, dtype=float)
        m = len(centers)
        if centers.ndim != 2 or m == 0:
            raise ValueError("centers must be a nonempty m x d matrix")
        if radii.shape != (m,) or kappa.shape != (m,):
            raise ValueError("radii and kappa must both have length m")
        if not 0 <= self.split_index <= m:
            raise ValueError(f"split_index must lie in [0, {m}], got {self.split_index}")
        if not 0.0 < self.lam <= 1.0:
            raise ValueError(f"confidence level must lie in (0, 1], got {self.lam}")
        object.__setattr__(self, "centers", _frozen(centers))
        object.__setattr__(self, "radii", _frozen(radii))
        object.__setattr__(self, "kappa", _frozen(kappa))

    @property
    def m(self) -> int:
        return len(self.centers)

    @property
    def d(self) -> int:
        return self.centers.shape[1]

    @classmethod
    def from_ball_training_set(cls, ts: BallTrainingSet, lam: float) -> "TfnBallTrainingSet":
        """Reorder positives first and clear each ball's fuzzy label.

        A ball's membership delta in (0, 1] maps to the signed degree
        max(delta, 0.5) for positives and -max(delta, 0.5) for negatives;
        degrees below 0.5 are clamped up (logged), since flatter labels have
        no triangular representation here.
        """
        order = np.concatenate([np.flatnonzero(ts.labels == 1), np.flatnonzero(ts.labels == -1)])
        split = int(np.sum(ts.labels == 1))
        clamped = int(np.sum(ts.memberships < 0.5))
        if clamped:
            logger.info("clamped %d membership degree(s) below 0.5 before fuzzifying labels",
                        clamped)
        degrees = np.maximum(ts.memberships[order], 0.5)
        degrees[split:] *= -1.0
        kappa = np.array([
            clear_constraint_coefficient(fuzzy_label_from_membership(float(dg)), lam, i < split)
            for i, dg in enumerate(degrees)
        ])
        return cls(ts.centers[order], ts.radii[order], kappa, split, lam)


@dataclass(frozen=True)
class TfnDualSolution:
    multipliers: np.ndarray
    w: np.ndarray
    b: float
    objective: float
    feasibility_gap: float
    lam: float
    seed: int = 0
    b_from_fallback: bool = False

    def to_json(self) -> str:
        return json.dumps(
            {
                "multipliers": [float(a) for a in self.multipliers],
                "w": [float(v) for v in self.w],
                "b": float(self.b),
                "objective": float(self.objective),
                "feasibility_gap": float(self.feasibility_gap),
                "lam": float(self.lam),
                "seed": int(self.seed),
                "b_from_fallback": bool(self.b_from_fallback),
            },
            indent=2,
        )


def tfn_compute_A_B(mult: np.ndarray, ts: TfnBallTrainingSet):
    """A = sum mult_t kappa_t c_t, B = sum mult_t r_t (batched like the crisp
    version, with kappa in place of the hard labels)."""
    mult = np.asarray(mult, dtype=float)
    if mult.shape[-1] != ts.m:
        raise ValueError(f"multiplier length {mult.shape[-1]} does not match m = {ts.m}")
    A = (mult * ts.kappa) @ ts.centers
    B = mult @ ts.radii
    return A, B


def tfn_dual_objective(mult: np.ndarray, ts: TfnBallTrainingSet):
    """-1/2 ||A||^2 + 1/2 B^2 + | ||A|| - B | B + sum mult_t, with the cleared
    coefficients kappa playing the role of the labels."""
    A, B = tfn_compute_A_B(mult, ts)
    nA = np.linalg.norm(A, axis=-1)
    return -0.5 * nA * nA + 0.5 * B * B + np.abs(nA - B) * B + np.asarray(mult).sum(axis=-1)


def sign_split_audit(ts: TfnBallTrainingSet) -> bool:
    """True iff the class split is consistent: nonnegative coefficients before
    split_index, nonpositive after."""
    return bool(np.all(ts.kappa[: ts.split_index] >= 0.0)
                and np.all(ts.kappa[ts.split_index:] <= 0.0))


def tfn_recover_w(mult: np.ndarray, ts: TfnBallTrainingSet) -> np.ndarray:
    A, B = tfn_compute_A_B(np.asarray(mult, dtype=float), ts)
    nA = float(np.linalg.norm(A))
    if nA == 0.0:
        raise DegenerateSolution("||A|| = 0: multipliers carry no separating direction")
    return (nA - B) / nA * A


def tfn_recover_b(mult: np.ndarray, ts: TfnBallTrainingSet, w: np.ndarray,
                  C: float) -> tuple[float, bool]:
    """Offset from interior multipliers via kappa (w . c + b) = 1 + ||w|| r,
    skipping coefficients too close to zero; hinge-grid fallback otherwise."""
    mult = np.asarray(mult, dtype=float)
    tol = 1e-6 * C
    norm_w = float(np.linalg.norm(w))
    usable = np.abs(ts.kappa) > KAPPA_TOL
    interior = (mult > tol) & (mult < C - tol) & usable
    with np.errstate(divide="ignore", invalid="ignore"):
        estimates = (1.0 + norm_w * ts.radii) / ts.kappa - ts.centers @ w
    if interior.any():
        return float(estimates[interior].mean()), False
    finite = estimates[usable]
    if finite.size:
        lo, hi = float(finite.min()) - 1.0, float(finite.max()) + 1.0
        candidates = np.unique(np.concatenate([finite, np.linspace(lo, hi, 201)]))
    else:
        pivot = -float(np.mean(ts.centers @ w))
        candidates = pivot + np.linspace(-10.0, 10.0, 201)
    margins = ts.kappa[:, None] * ((ts.centers @ w)[:, None] + candidates) \
        - norm_w * ts.radii[:, None]
    loss = np.maximum(0.0, 1.0 - margins).sum(axis=0)
    return float(candidates[int(np.argmin(loss))]), True


def make_tfn_pso_config(ts: TfnBallTrainingSet, C: float, seed: int = 0,
                        **overrides) -> pso.PsoConfig:
    """Box [0, C] on every multiplier; penalty default 1e3 * C."""
    defaults = dict(
        lower=np.zeros(ts.m),
        upper=np.full(ts.m, float(C)),
        penalty_coefficient=1e3 * C,
        seed=seed,
    )
    defaults.update(overrides)
    return pso.PsoConfig(**defaults)


def train_tfn(ts: TfnBallTrainingSet, C: float, cfg: pso.PsoConfig) -> TfnDualSolution:
    """Maximize the cleared dual by PSO under sum mult_t kappa_t = 0 and the
    box [0, C], then recover the plane."""
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")
    kappa = ts.kappa

    def fitness(X):
        return tfn_dual_objective(X, ts)

    def constraint(X):
        return np.asarray(X) @ kappa

    result = pso.optimize(fitness, constraint, cfg)
    if not result.feasible:
        raise SolverFailure(result.residual, cfg.equality_tolerance)
    w = tfn_recover_w(result.position, ts)
    b, fallback = tfn_recover_b(result.position, ts, w, C)
    return TfnDualSolution(
        multipliers=result.position,
        w=w,
        b=b,
        objective=result.value,
        feasibility_gap=result.residual,
        lam=ts.lam,
        seed=cfg.seed,
        b_from_fallback=fallback,
    )
