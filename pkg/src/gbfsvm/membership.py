"""Class-center membership function: 1 - distance / (class radius + epsilon).

Fitted on a training set, the same function weights individual points (for
point-based fuzzy SVM baselines) and ball centers (for fuzzy granular-balls),
so every model variant shares one membership semantics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_io import Dataset


class MembershipError(ValueError):
    """Raised when a membership function is queried before it can be fitted."""


@dataclass(frozen=True)
class ClassGeometry:
    """Per-class means and max-distance radii, plus the positivity epsilon."""

    mean_pos: np.ndarray
    mean_neg: np.ndarray
    radius_pos: float
    radius_neg: float
    epsilon: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise MembershipError(f"epsilon must be positive, got {self.epsilon}")
        if self.radius_pos < 0 or self.radius_neg < 0:
            raise MembershipError("class radii must be nonnegative")


def fit_class_geometry(d: Dataset, epsilon: float = 1e-6) -> ClassGeometry:
    """Compute per-class arithmetic means and max member-to-mean distances."""
    pos = d.features[d.labels == 1]
    neg = d.features[d.labels == -1]
    if len(pos) == 0 or len(neg) == 0:
        raise MembershipError("both classes must be present to fit class geometry")
    mean_pos = pos.mean(axis=0)
    mean_neg = neg.mean(axis=0)
    radius_pos = float(np.linalg.norm(pos - mean_pos, axis=1).max())
    radius_neg = float(np.linalg.norm(neg - mean_neg, axis=1).max())
    return ClassGeometry(mean_pos, mean_neg, radius_pos, radius_neg, float(epsilon))


def membership_value(x: np.ndarray, y: int, g: ClassGeometry) -> float:
    """Membership of point x toward class y, in (0, 1].

    Returns 1 - |x - mean_y| / (radius_y + epsilon), clamped to a floor of
    epsilon for queries farther from the class mean than the class radius
    (possible off the training support).
    """
    if y == 1:
        mean, radius = g.mean_pos, g.radius_pos
    elif y == -1:
        mean, radius = g.mean_neg, g.radius_neg
    else:
        raise MembershipError(f"class must be +1 or -1, got {y}")
    dist = float(np.linalg.norm(np.asarray(x, dtype=float) - mean))
    return max(g.epsilon, 1.0 - dist / (radius + g.epsilon))


def membership_values(features: np.ndarray, labels: np.ndarray, g: ClassGeometry) -> np.ndarray:
    """Vectorized membership_value over rows of features with matching labels."""
    feats = np.asarray(features, dtype=float)
    labs = np.asarray(labels, dtype=int)
    out = np.empty(len(feats))
    for cls, mean, radius in ((1, g.mean_pos, g.radius_pos), (-1, g.mean_neg, g.radius_neg)):
        mask = labs == cls
        if mask.any():
            dist = np.linalg.norm(feats[mask] - mean, axis=1)
            out[mask] = np.maximum(g.epsilon, 1.0 - dist / (radius + g.epsilon))
    return out


def fuzzify_dataset(d: Dataset, g: ClassGeometry) -> Dataset:
    """Attach per-point memberships computed from the class geometry."""
    return d.with_memberships(membership_values(d.features, d.labels, g))
