"""Fuzzy granular-ball generation by recursive 2-means splitting under a purity threshold.

The whole training set starts as one ball and is split by k-means (k = number
of distinct labels inside the ball) until every ball reaches the purity
threshold or cannot be split further. Membership degrees are attached
afterwards, either by averaging member memberships or by evaluating a
membership function at each ball center.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .data_io import Dataset, _frozen

log = logging.getLogger(__name__)

RADIUS_MODES = ("mean_distance", "max_distance")


class BallConfigError(ValueError):
    """Invalid ball-generation configuration."""


class MembershipRangeError(ValueError):
    """A membership function returned a value outside (0, 1]."""


@dataclass(frozen=True)
class GranularBall:
    """A hyper-ball summary of a subset of samples.

    center is the mean of member feature vectors; radius the configured
    statistic (mean or max) of member-to-center distances; purity the
    fraction of members carrying the majority label.
    """

    center: np.ndarray
    radius: float
    label: int
    purity: float
    membership: float | None
    member_indices: np.ndarray

    @property
    def size(self) -> int:
        return len(self.member_indices)


@dataclass(frozen=True)
class BallGenConfig:
    purity_threshold: float = 0.9
    radius_mode: str = "mean_distance"
    kmeans_max_iters: int = 100
    kmeans_seed: int = 0  # reserved; default class-mean seeding is deterministic
    min_ball_size: int = 1

    def __post_init__(self):
        if not 0.5 < self.purity_threshold <= 1.0:
            raise BallConfigError(f"purity_threshold must lie in (0.5, 1], got {self.purity_threshold}")
        if self.radius_mode not in RADIUS_MODES:
            raise BallConfigError(f"radius_mode must be one of {RADIUS_MODES}, got {self.radius_mode!r}")
        if self.kmeans_max_iters < 1:
            raise BallConfigError("kmeans_max_iters must be >= 1")
        if self.min_ball_size < 1:
            raise BallConfigError("min_ball_size must be >= 1")


@dataclass(frozen=True)
class FuzzyBallSet:
    """Final balls of one generation run; member indices partition the source."""

    balls: tuple[GranularBall, ...]
    config: BallGenConfig
    source_n: int

    def __len__(self) -> int:
        return len(self.balls)

    def centers(self) -> np.ndarray:
        return np.array([b.center for b in self.balls])

    def radii(self) -> np.ndarray:
        return np.array([b.radius for b in self.balls])

    def labels(self) -> np.ndarray:
        return np.array([b.label for b in self.balls])

    def memberships(self) -> np.ndarray:
        vals = [b.membership for b in self.balls]
        if any(v is None for v in vals):
            raise ValueError("membership degrees have not been attached yet")
        return np.array(vals, dtype=float)

    def to_records(self) -> list[dict]:
        """One flat record per ball, for the CSV/JSON ball-dump artifact."""
        return [
            {
                "ball": i,
                "center": [float(c) for c in b.center],
                "radius": float(b.radius),
                "label": int(b.label),
                "purity": float(b.purity),
                "membership": None if b.membership is None else float(b.membership),
                "size": int(b.size),
            }
            for i, b in enumerate(self.balls)
        ]

    def to_json(self) -> str:
        return json.dumps(
            {
                "source_n": self.source_n,
                "purity_threshold": self.config.purity_threshold,
                "radius_mode": self.config.radius_mode,
                "balls": self.to_records(),
            },
            indent=2,
        )

    def to_csv(self) -> str:
        lines = ["ball,radius,label,purity,membership,size,center"]
        for r in self.to_records():
            mem = "" if r["membership"] is None else repr(r["membership"])
            center = " ".join(repr(c) for c in r["center"])
            lines.append(f"{r['ball']},{r['radius']!r},{r['label']},{r['purity']!r},{mem},{r['size']},{center}")
        return "\n".join(lines) + "\n"


def ball_center(points: np.ndarray) -> np.ndarray:
    """Coordinatewise arithmetic mean of a nonempty point set."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) == 0:
        raise ValueError("ball_center requires a nonempty n x d point set")
    return points.mean(axis=0)


def ball_radius(points: np.ndarray, center: np.ndarray, mode: str = "mean_distance") -> float:
    """Mean or max Euclidean distance from the points to the center."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) == 0:
        raise ValueError("ball_radius requires a nonempty n x d point set")
    if mode not in RADIUS_MODES:
        raise BallConfigError(f"radius_mode must be one of {RADIUS_MODES}, got {mode!r}")
    dists = np.linalg.norm(points - np.asarray(center, dtype=float), axis=1)
    return float(dists.mean() if mode == "mean_distance" else dists.max())


def ball_purity(labels: np.ndarray) -> tuple[float, int]:
    """Fraction of the majority label plus that label; ties break toward +1."""
    labels = np.asarray(labels, dtype=int)
    if len(labels) == 0:
        raise ValueError("ball_purity requires a nonempty label sequence")
    n_pos = int(np.sum(labels == 1))
    n_neg = len(labels) - n_pos
    if n_pos >= n_neg:
        return n_pos / len(labels), 1
    return n_neg / len(labels), -1


def _lloyd_assign(points: np.ndarray, init_centers: np.ndarray, max_iters: int) -> np.ndarray:
    """Deterministic Lloyd iterations from the given centers; returns assignments.

    Nearest-center ties go to the lower center index. Empty clusters keep
    their previous center (the caller treats a single-cluster result as a
    degenerate split).
    """
    centers = np.array(init_centers, dtype=float)
    assign = None
    for _ in range(max_iters):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1)
        new_assign = d2.argmin(axis=1)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for k in range(len(centers)):
            mask = assign == k
            if mask.any():
                centers[k] = points[mask].mean(axis=0)
    return assign


def _make_ball(d: Dataset, indices: np.ndarray, cfg: BallGenConfig) -> GranularBall:
    pts = d.features[indices]
    center = ball_center(pts)
    radius = ball_radius(pts, center, cfg.radius_mode)
    purity, label = ball_purity(d.labels[indices])
    return GranularBall(_frozen(center), radius, label, purity, None, _frozen(np.sort(indices)))


def _split_indices(d: Dataset, indices: np.ndarray, cfg: BallGenConfig) -> list[np.ndarray]:
    """Split one impure ball's member indices into >= 2 nonempty groups.

    k-means with k = number of distinct labels, seeded at the per-class
    means. When that degenerates (empty cluster or unchanged partition) the
    single point farthest from the ball center is split off instead, which
    guarantees strict progress.
    """
    pts = d.features[indices]
    labs = d.labels[indices]
    classes = np.unique(labs)
    init = np.array([pts[labs == c].mean(axis=0) for c in classes])
    assign = _lloyd_assign(pts, init, cfg.kmeans_max_iters)
    parts = [indices[assign == k] for k in range(len(init)) if np.any(assign == k)]
    if len(parts) < 2:
        # degenerate split: peel off the farthest point (ties -> lowest index)
        center = pts.mean(axis=0)
        far = int(np.argmax(np.linalg.norm(pts - center, axis=1)))
        rest = np.delete(np.arange(len(indices)), far)
        parts = [indices[rest], indices[[far]]]
    return parts


def generate_balls(d: Dataset, cfg: BallGenConfig) -> FuzzyBallSet:
    """Recursive purity-driven ball generation.

    The full dataset is first split by 2-means; thereafter any ball whose
    purity falls below the threshold is re-split until every ball satisfies
    the threshold or is unsplittable (at most min_ball_size members, or all
    member feature vectors identical). Final balls are ordered by their
    smallest member index. Deterministic for identical inputs.
    """
    all_idx = np.arange(d.n)
    pending = _split_indices(d, all_idx, cfg)
    final: list[np.ndarray] = []
    while pending:
        idx = pending.pop()
        purity, _ = ball_purity(d.labels[idx])
        if purity >= cfg.purity_threshold or len(idx) <= cfg.min_ball_size:
            final.append(idx)
            continue
        pts = d.features[idx]
        if np.all(pts == pts[0]):
            warnings.warn(
                f"accepting ball of {len(idx)} identical points with purity {purity:.3f} "
                f"below threshold {cfg.purity_threshold}: no split can separate them",
                stacklevel=2,
            )
            final.append(idx)
            continue
        pending.extend(_split_indices(d, idx, cfg))
    final.sort(key=lambda idx: int(idx.min()))
    balls = tuple(_make_ball(d, idx, cfg) for idx in final)
    return FuzzyBallSet(balls, cfg, d.n)


def attach_membership_from_samples(fbs: FuzzyBallSet, d: Dataset) -> FuzzyBallSet:
    """Ball membership = arithmetic mean of its members' membership degrees."""
    if d.memberships is None:
        raise ValueError("dataset carries no membership degrees")
    balls = tuple(
        replace(b, membership=float(d.memberships[b.member_indices].mean())) for b in fbs.balls
    )
    return FuzzyBallSet(balls, fbs.config, fbs.source_n)


def attach_membership_from_function(fbs: FuzzyBallSet, mu) -> FuzzyBallSet:
    """Ball membership = mu(center, majority label); must land in (0, 1]."""
    out = []
    for b in fbs.balls:
        val = float(mu(b.center, b.label))
        if not 0.0 < val <= 1.0:
            raise MembershipRangeError(
                f"membership function returned {val!r} outside (0, 1] at ball center {b.center}"
            )
        out.append(replace(b, membership=val))
    return FuzzyBallSet(tuple(out), fbs.config, fbs.source_n)
