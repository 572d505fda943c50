"""Deterministic synthetic datasets.

Benchmarks accept dataset specs of the form ``synth:<name>`` or
``synth:<name>:<seed>`` alongside plain CSV paths. The two named generators
imitate the size, dimensionality, class balance and rough difficulty of a
small overlapping 2-d problem and a well-separated 9-d diagnostic problem, so
benchmark runs are reproducible with no files on disk.
"""

from __future__ import annotations

import csv
import math

import numpy as np

from .data_io import Dataset


class UnknownSyntheticError(ValueError):
    """Dataset spec does not name a registered synthetic generator."""


def blobs(n_pos: int, n_neg: int, mean_pos, mean_neg, std_pos, std_neg,
          seed: int = 0, name: str = "blobs") -> Dataset:
    """Two Gaussian classes; positives first, label +1 then -1."""
    if n_pos < 1 or n_neg < 1:
        raise ValueError("both classes need at least one sample")
    rng = np.random.default_rng(seed)
    mean_pos = np.asarray(mean_pos, dtype=float)
    mean_neg = np.asarray(mean_neg, dtype=float)
    if mean_pos.shape != mean_neg.shape or mean_pos.ndim != 1:
        raise ValueError("class means must be 1-d vectors of equal length")
    d = len(mean_pos)
    pos = mean_pos + rng.standard_normal((n_pos, d)) * np.asarray(std_pos, dtype=float)
    neg = mean_neg + rng.standard_normal((n_neg, d)) * np.asarray(std_neg, dtype=float)
    features = np.vstack([pos, neg])
    labels = np.concatenate([np.ones(n_pos, dtype=int), -np.ones(n_neg, dtype=int)])
    return Dataset(features, labels, name=name)


def _grainfield(rng, u, v, base, sigma: float, groups) -> np.ndarray:
    """Stack tight Gaussian pockets placed on a (u, v) coordinate frame.

    Each group is (count, u_pos, v_pos); points are pocket_center +
    sigma * N(0, I). The pockets are compact relative to their spacing, so
    the data is grainy: all structure lives in where the pockets sit, not in
    per-point spread.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    base = np.asarray(base, dtype=float)
    rows = []
    for count, u_pos, v_pos in groups:
        center = base + u_pos * u + v_pos * v
        rows.append(center + rng.standard_normal((count, len(base))) * sigma)
    return np.vstack(rows)


def _ribbon(rng, u, v, base, count, u_range, v_range, v_star, scale):
    """Contested strip between the class bands with a graded label field.

    Points fall uniformly over ``u_range x v_range``; each is positive with
    probability Phi((v - v_star) / scale), so class posterior rises smoothly
    across the strip and the best cut through it is at v_star. Returns
    (points, labels).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    base = np.asarray(base, dtype=float)
    u_pos = rng.uniform(u_range[0], u_range[1], count)
    v_pos = rng.uniform(v_range[0], v_range[1], count)
    pts = base + u_pos[:, None] * u + v_pos[:, None] * v
    z = (v_pos - v_star) / scale
    p_pos = 0.5 * (1.0 + np.vectorize(math.erf)(z / np.sqrt(2.0)))
    labels = np.where(rng.random(count) < p_pos, 1, -1)
    return pts, labels


def _pocket_ribbon(rng, count_per, u_slots, v_slots, v_star, scale):
    """Contested strip made of tight single-label pockets on a grid.

    Each grid position gets one pocket of ``count_per`` points whose shared
    label is drawn once with P(+1) = Phi((v - v_star) / scale), so the label
    odds rise smoothly across the strip while the strip itself stays grainy.
    Returns (groups, labels) for :func:`_grainfield`.
    """
    groups = []
    labels = []
    for v_pos in v_slots:
        p_pos = 0.5 * (1.0 + math.erf((v_pos - v_star) / (scale * np.sqrt(2.0))))
        for u_pos in u_slots:
            lab = 1 if rng.random() < p_pos else -1
            groups.append((count_per, u_pos, v_pos))
            labels.append(lab)
    return groups, labels


def _graded_row(v_row: float, majority: int, own_sizes, dissent_sizes):
    """One row of tight cells whose sizes ramp along the row.

    Own-label cells sit at whole slots, dissenting cells at half-offset
    slots between them, so along the row the two labels interleave
    everywhere. The size ramp puts most of the row's mass at one end, which
    drags the class mean sideways without giving any lengthwise threshold a
    clean separation. Returns (groups, labels) for :func:`_grainfield`.
    """
    own_slots = np.linspace(-4.25, 4.75, len(own_sizes))
    dissent_slots = np.linspace(-3.75, 3.75, len(dissent_sizes))
    groups = [(c, s, v_row) for c, s in zip(own_sizes, own_slots)]
    labels = [majority] * len(own_sizes)
    groups += [(c, s, v_row) for c, s in zip(dissent_sizes, dissent_slots)]
    labels += [-majority] * len(dissent_sizes)
    return groups, labels


def fourclass_like(seed: int = 0) -> Dataset:
    """854 x 2, near-balanced (425 positive vs 429 negative), grainy.

    Two rows of tight cells on a diagonal frame: a mostly-positive row
    above, a mostly-negative row below, with dissenting cells of the other
    label interleaved along both. Cell sizes ramp eastward in the top row
    and westward in the bottom row, so the class means are dragged far
    sideways while both labels occur everywhere along either row. A broad
    contested ribbon fills the corridor between the rows, its label odds
    rising smoothly across a crossover line; cuts that follow the line
    between the class means pay for it in the ribbon and among the
    dissenters.
    """
    rng = np.random.default_rng(seed)
    u = np.array([1.0, 1.0]) / np.sqrt(2.0)
    v = np.array([1.0, -1.0]) / np.sqrt(2.0)
    ramp8 = np.arange(8, 51, 6)            # 8..50 eastward, sums to 232
    small8 = np.arange(6, 42, 5)           # 6..41, sums to 188
    ramp5 = np.arange(13, 30, 4)           # 13..29, sums to 105
    g_pos, l_pos = _graded_row(+1.45, +1, ramp8, ramp5)
    g_neg, l_neg = _graded_row(-1.55, -1, small8[::-1], ramp5[::-1])
    g_rib, l_rib = _pocket_ribbon(rng, 8, np.linspace(-3.9, 3.9, 7),
                                  np.linspace(-0.80, 0.55, 4), 0.15, 0.33)
    groups = g_pos + g_neg + g_rib
    sizes_labels = [(g[0], lab) for g, lab in zip(groups, l_pos + l_neg + l_rib)]
    cells = _grainfield(rng, u, v, np.zeros(2), 0.13, groups)
    labels = np.concatenate([np.full(c, lab, dtype=int) for c, lab in sizes_labels])
    features = cells
    name = "fourclass" if seed == 0 else f"fourclass#{seed}"
    return Dataset(features, labels, name=name)


def breastcancer_like(seed: int = 0) -> Dataset:
    """683 x 9, imbalanced (roughly 250 positive vs 430 negative).

    Two compact class blobs offset across a boundary normal that touches
    eight of the nine features, with a thin contested ribbon between them
    where the label field flips gradually. The ribbon's crossover sits off
    the blob midline, on the majority side, so the best cut hugs the
    negative blob rather than splitting the difference.
    """
    rng = np.random.default_rng(seed)
    u = np.ones(9) / 3.0  # unit vector of the shared spread
    v = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 0.0])
    v /= np.sqrt(8.0)  # unit, orthogonal to u, touching coords 0-7
    base = np.full(9, 5.5)
    pos = _grainfield(rng, u, v, base, 0.26, [(180, 0.0, 1.15)])
    neg = _grainfield(rng, u, v, base, 0.30, [(353, 0.0, -1.45)])
    strip, strip_labels = _ribbon(rng, u, v, base, 150,
                                  (-0.8, 0.8), (-0.66, 0.46), -0.15, 0.28)
    features = np.vstack([pos, neg, strip])
    labels = np.concatenate([np.ones(180, dtype=int), -np.ones(353, dtype=int),
                             strip_labels])
    name = "breastcancer" if seed == 0 else f"breastcancer#{seed}"
    return Dataset(features, labels, name=name)


_REGISTRY = {
    "fourclass": fourclass_like,
    "breastcancer": breastcancer_like,
}


def is_synthetic_spec(spec: str) -> bool:
    return spec.startswith("synth:")


def resolve(spec: str) -> Dataset:
    """Build the dataset named by ``synth:<name>`` or ``synth:<name>:<seed>``."""
    if not is_synthetic_spec(spec):
        raise UnknownSyntheticError(f"not a synthetic dataset spec: {spec!r}")
    parts = spec.split(":")
    name = parts[1]
    if name not in _REGISTRY:
        raise UnknownSyntheticError(
            f"unknown synthetic dataset {name!r}; known: {sorted(_REGISTRY)}")
    seed = 0
    if len(parts) > 2:
        try:
            seed = int(parts[2])
        except ValueError:
            raise UnknownSyntheticError(f"seed in {spec!r} must be an integer") from None
    if len(parts) > 3:
        raise UnknownSyntheticError(f"malformed synthetic dataset spec: {spec!r}")
    return _REGISTRY[name](seed=seed)


def to_csv(d: Dataset, path) -> None:
    """Write features as f0..f{d-1} plus a trailing ±1 label column."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(d.d)] + ["label"])
        for row, lab in zip(d.features, d.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(lab)])
