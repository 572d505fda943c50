"""Seeded global-best particle swarm maximizer over a box, with a linear
equality constraint handled by quadratic penalty.

Fitness and constraint callables must be batched: given a (k, m) array of
candidate positions they return a length-k array (a single (m,) position must
also work and return a scalar). Every objective in this package follows that
convention, which keeps the swarm update fully vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

VELOCITY_CLAMP = 0.2  # fraction of the box width
POP_CAP = 200


@dataclass(frozen=True)
class PsoConfig:
    """Swarm parameters plus the box the swarm lives in.

    pop=None resolves to max(30, 2 * m) capped at 200. penalty_coefficient=None
    resolves to 1e3 * max(upper); callers solving a dual with bound C should
    pass 1e3 * C explicitly.
    """

    lower: np.ndarray
    upper: np.ndarray
    pop: int | None = None
    max_iter: int = 1050
    inertia: float = 0.5
    c1: float = 1.6
    c2: float = 1.6
    equality_tolerance: float = 1e-3
    penalty_coefficient: float | None = None
    seed: int = 0

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be 1-D arrays of equal length")
        if np.any(lower > upper):
            raise ValueError("lower must be <= upper componentwise")
        if self.pop is not None and self.pop < 1:
            raise ValueError("pop must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.equality_tolerance <= 0:
            raise ValueError("equality_tolerance must be positive")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def resolved_pop(self) -> int:
        if self.pop is not None:
            return self.pop
        return min(POP_CAP, max(30, 2 * self.dim))

    def resolved_penalty(self) -> float:
        if self.penalty_coefficient is not None:
            return self.penalty_coefficient
        hi = float(np.max(self.upper)) if self.dim else 1.0
        return 1e3 * max(hi, 1.0)


@dataclass(frozen=True)
class PsoResult:
    position: np.ndarray
    value: float  # raw fitness at position
    residual: float  # |constraint(position)|
    feasible: bool
    seed: int


def optimize(fitness, constraint, cfg: PsoConfig) -> PsoResult:
    """Maximize fitness(x) - penalty * constraint(x)^2 over the box.

    Standard global-best PSO: zero initial velocities, uniform initial
    positions, velocity clamped to 0.2 of the box width, positions clipped
    into the box each step. The incumbent penalized score is non-decreasing;
    score ties keep the earlier particle. Fully deterministic under the seed.
    """
    rng = np.random.default_rng(cfg.seed)
    pop, m = cfg.resolved_pop(), cfg.dim
    lower, upper = cfg.lower, cfg.upper
    width = upper - lower
    vmax = VELOCITY_CLAMP * width
    penalty = cfg.resolved_penalty()

    def scores(X: np.ndarray) -> np.ndarray:
        r = np.asarray(constraint(X), dtype=float)
        return np.asarray(fitness(X), dtype=float) - penalty * r * r

    X = lower + width * rng.random((pop, m))
    V = np.zeros_like(X)
    pbest = X.copy()
    pbest_score = scores(X)
    g = int(np.argmax(pbest_score))
    gbest = pbest[g].copy()
    gbest_score = float(pbest_score[g])

    # Scratch buffers reused across iterations; every arithmetic step below
    # mirrors the textbook update x += v; v = w*v + c1*u1*(p-x) + c2*u2*(g-x)
    # with the same operation order, just without per-iteration allocation.
    u1 = np.empty_like(X)
    u2 = np.empty_like(X)
    pull = np.empty_like(X)
    term = np.empty_like(X)
    for _ in range(cfg.max_iter):
        rng.random(out=u1)
        rng.random(out=u2)
        V *= cfg.inertia
        np.multiply(cfg.c1, u1, out=term)
        np.subtract(pbest, X, out=pull)
        np.multiply(term, pull, out=term)
        V += term
        np.multiply(cfg.c2, u2, out=term)
        np.subtract(gbest, X, out=pull)
        np.multiply(term, pull, out=term)
        V += term
        np.clip(V, -vmax, vmax, out=V)
        X += V
        np.clip(X, lower, upper, out=X)
        s = scores(X)
        improved = s > pbest_score
        if improved.any():
            pbest[improved] = X[improved]
            pbest_score[improved] = s[improved]
            g = int(np.argmax(pbest_score))
            if pbest_score[g] > gbest_score:
                gbest = pbest[g].copy()
                gbest_score = float(pbest_score[g])

    value = float(np.asarray(fitness(gbest[None, :]))[0])
    residual = float(abs(np.asarray(constraint(gbest[None, :]))[0]))
    return PsoResult(gbest, value, residual, residual <= cfg.equality_tolerance, cfg.seed)


def best_of_runs(fitness, constraint, cfg: PsoConfig, runs: int) -> PsoResult:
    """Best of `runs` optimizations seeded cfg.seed + k for k = 0..runs-1.

    Picks the highest raw fitness among runs meeting the equality tolerance;
    if no run is feasible, returns the lowest-residual run flagged infeasible.
    Ties keep the earliest run, so repeated invocations reproduce the winner.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    results = [optimize(fitness, constraint, replace(cfg, seed=cfg.seed + k)) for k in range(runs)]
    feasible = [r for r in results if r.feasible]
    if feasible:
        return max(feasible, key=lambda r: r.value)
    return min(results, key=lambda r: r.residual)
