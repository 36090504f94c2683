"""Kertesz threshold cascade: blocked nodes, spontaneous adoption, and
the two diffusion metrics (fraction infected, diffusion speed).

A susceptible, non-blocked node adopts in step t when the adopted
fraction of its neighbors (taken against the previous step's adopted
set) reaches the threshold tau, or spontaneously with probability
delta. Updates are synchronous. Note the adoption-rate comparison is
r < delta: spontaneous adoption fires with probability delta, per the
model's definition of delta as a rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from netdiff import rng as _rng
from netdiff.graph import Graph, betweenness_centrality, degree_centrality


@dataclass
class KTParams:
    eta0: float = 0.01
    k: int = 500
    delta: float = 0.001
    beta: float = 0.05
    tau: float = 0.30
    steady_fraction: float = 0.95

    def __post_init__(self):
        for name in ("eta0", "delta", "beta", "steady_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        # tau > 1 is allowed as an explicitly unreachable threshold
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.k < 1:
            raise ValueError("need at least one iteration")
        if self.eta0 + self.beta > 1.0:
            raise ValueError("eta0 + beta must not exceed 1")


@dataclass
class SeedStrategy:
    kind: str = "top-degree"  # random | top-degree | top-betweenness
    fraction: float = 0.01

    def __post_init__(self):
        if self.kind not in ("random", "top-degree", "top-betweenness"):
            raise ValueError(f"unknown seed strategy {self.kind!r}")
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError("seed fraction must lie in (0, 1]")


@dataclass
class DiffusionTrace:
    """One cascade run, compactly stored as per-node adoption steps.

    adoption_step[v] is the timestep at which v adopted (0 for seeds),
    or -1 if it never adopted. eta[t] is the adopted fraction after
    step t; the trace may end before params.k when the state froze.
    """

    n: int
    adoption_step: np.ndarray
    blocked: np.ndarray  # bool mask, constant over time
    eta: np.ndarray
    steady_fraction: float
    steady_step: int | None = None

    @property
    def last_step(self) -> int:
        return len(self.eta) - 1

    def adopted_at(self, t: int) -> np.ndarray:
        """Bool mask of the adopted set I_t."""
        if not 0 <= t <= self.last_step:
            raise ValueError(f"timestep {t} outside trace range")
        return (self.adoption_step >= 0) & (self.adoption_step <= t)

    def states_at(self, t: int) -> np.ndarray:
        """Per-node state at step t: 'S', 'A', or 'B'."""
        out = np.full(self.n, "S", dtype="<U1")
        out[self.adopted_at(t)] = "A"
        out[self.blocked] = "B"
        return out


def select_seeds(g: Graph, strategy: SeedStrategy, rng: np.random.Generator) -> np.ndarray:
    """Pick ceil(fraction * n) seed nodes per the strategy.

    Centrality ties break by ascending node id.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    count = math.ceil(strategy.fraction * g.n)
    if count > g.n:
        raise ValueError("seed count exceeds node count")
    if strategy.kind == "random":
        return np.sort(rng.choice(g.n, size=count, replace=False))
    if strategy.kind == "top-degree":
        scores = degree_centrality(g).values
    else:
        scores = betweenness_centrality(g).values
    order = np.lexsort((np.arange(g.n), -scores))
    return np.sort(order[:count])


def select_blocked(g: Graph, beta: float, seeds, rng: np.random.Generator) -> np.ndarray:
    """round(beta * n) blocked nodes drawn uniformly from non-seeds."""
    count = round(beta * g.n)
    pool = np.setdiff1d(np.arange(g.n), np.asarray(seeds, dtype=np.int64))
    if count > len(pool):
        raise ValueError("blocked fraction infeasible given seed set")
    if count == 0:
        return np.empty(0, dtype=np.int64)
    return np.sort(rng.choice(pool, size=count, replace=False))


def kt_run(g: Graph, params: KTParams, seeds, blocked, rng: np.random.Generator) -> DiffusionTrace:
    """Run the cascade for up to params.k synchronous steps.

    Exits early once no susceptible node remains or, with delta = 0,
    once a step changes nothing. One uniform draw is made per (step,
    node) regardless of state, which keeps runs with shared streams
    coupled across parameter choices.
    """
    n = g.n
    seeds = np.asarray(seeds, dtype=np.int64)
    blocked_mask = np.zeros(n, dtype=bool)
    blocked_mask[np.asarray(blocked, dtype=np.int64)] = True
    if blocked_mask[seeds].any():
        raise ValueError("seeds and blocked sets must be disjoint")

    adoption_step = np.full(n, -1, dtype=np.int64)
    adoption_step[seeds] = 0
    adopted = np.zeros(n, dtype=bool)
    adopted[seeds] = True

    deg = g.degrees().astype(float)
    safe_deg = np.where(deg > 0, deg, 1.0)

    # adopted-neighbor counts, maintained incrementally as nodes adopt
    infected_nbrs = np.zeros(n)
    for s in seeds:
        infected_nbrs[g.neighbors(s)] += 1

    eta = [adopted.sum() / n]
    for t in range(1, params.k + 1):
        active = ~adopted & ~blocked_mask
        if not active.any():
            break
        lam = infected_nbrs / safe_deg  # isolated nodes get 0
        r = rng.random(n)
        newly = active & ((lam >= params.tau) | (r < params.delta))
        if not newly.any() and params.delta == 0:
            break
        adopted |= newly
        adoption_step[newly] = t
        for v in np.nonzero(newly)[0]:
            infected_nbrs[g.neighbors(v)] += 1
        eta.append(adopted.sum() / n)

    eta = np.array(eta)
    reached = np.nonzero(eta >= params.steady_fraction)[0]
    steady = int(reached[0]) if reached.size else None
    return DiffusionTrace(n=n, adoption_step=adoption_step, blocked=blocked_mask,
                          eta=eta, steady_fraction=params.steady_fraction,
                          steady_step=steady)


def fraction_infected(trace: DiffusionTrace, t: int) -> float:
    """eta(t) = adopted count at step t over node count."""
    if not 0 <= t <= trace.last_step:
        raise ValueError(f"timestep {t} outside trace range")
    return float(trace.eta[t])


@dataclass
class DiffusionSpeed:
    value: float
    saturated: bool


def diffusion_speed(trace: DiffusionTrace) -> DiffusionSpeed:
    """Average speed nu = (eta_steady - eta(0)) / t_steady.

    Uses the steady-state target fraction when it was reached; falls
    back to the realized gain over the whole run (flagged unsaturated)
    otherwise. A trace already at steady state at t=0 has speed 0.
    """
    if len(trace.eta) == 0:
        raise ValueError("empty trace")
    eta0 = trace.eta[0]
    if trace.steady_step is not None:
        if trace.steady_step == 0:
            return DiffusionSpeed(0.0, saturated=True)
        return DiffusionSpeed((trace.steady_fraction - eta0) / trace.steady_step,
                              saturated=True)
    t_end = trace.last_step
    if t_end == 0:
        return DiffusionSpeed(0.0, saturated=False)
    return DiffusionSpeed((trace.eta[-1] - eta0) / t_end, saturated=False)


# -- ensemble driver --------------------------------------------------------


@dataclass
class ConstantGraph:
    """Picklable factory returning one fixed graph for every run."""

    graph: Graph

    def __call__(self, index: int) -> Graph:
        return self.graph


@dataclass
class SeededFactory:
    """Picklable factory: fn(seed=offset + index, **kwargs) per run."""

    fn: object  # module-level generator function
    kwargs: dict
    seed_offset: int = 0

    def __call__(self, index: int) -> Graph:
        return self.fn(seed=self.seed_offset + index, **self.kwargs)


def padded_eta(trace: DiffusionTrace, steps: int) -> np.ndarray:
    """eta(0..steps) with the frozen tail extended to full length."""
    out = np.full(steps + 1, trace.eta[-1])
    out[:len(trace.eta)] = trace.eta
    return out


def run_one(graph_factory, params: KTParams, strategy: SeedStrategy,
            steps: int, seed: int, index: int) -> np.ndarray:
    gen = _rng.stream(seed, index)
    g = graph_factory(index)
    seeds = select_seeds(g, strategy, gen)
    blocked = select_blocked(g, params.beta, seeds, gen)
    trace = kt_run(g, params, seeds, blocked, gen)
    return padded_eta(trace, steps)


def ensemble_curves(graph_factory, params: KTParams, strategy: SeedStrategy,
                    runs: int, seed: int, workers: int = 1) -> np.ndarray:
    """Infection[t, i] matrix over `runs` independent cascades.

    graph_factory(i) supplies the graph for run i (a fresh instance per
    run, or a constant graph). Each run draws its own Philox stream, so
    results are identical no matter how work is scheduled.
    """
    steps = params.k
    if workers > 1 and runs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            curves = list(pool.map(
                run_one,
                [graph_factory] * runs, [params] * runs, [strategy] * runs,
                [steps] * runs, [seed] * runs, range(runs),
                chunksize=max(1, runs // (workers * 4)),
            ))
    else:
        curves = [run_one(graph_factory, params, strategy, steps, seed, i)
                  for i in range(runs)]
    return np.column_stack(curves)
