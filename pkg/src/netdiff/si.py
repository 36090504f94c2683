"""Continuous-time susceptible-infected model on a graph.

A susceptible node i accrues infection hazard
    lambda(i, t) = psi_S(i) * sum_{j infectious} psi_T(j) * kappa(i, j) + zeta
where susceptibility psi_S and transmissibility psi_T are linear in
node covariates and the kernel kappa couples connected pairs through an
inverse-power distance term plus edge covariates. Pressure flows along
graph edges only; kappa is exactly zero without a connection. Inter-
event times are exponential, which gives an exact Gillespie simulator
and a closed-form log-likelihood for observed event sequences.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from netdiff.graph import Graph


@dataclass
class SIParams:
    zeta: float = 0.0
    alpha: float = 0.0
    gamma: float = 0.0
    theta: tuple = ()
    phi: tuple = ()
    omega: tuple = (1.0,)  # intercept-only: constant susceptibility 1

    def __post_init__(self):
        if self.zeta < 0 or self.alpha < 0:
            raise ValueError("zeta and alpha must be non-negative")
        self.theta = tuple(float(x) for x in self.theta)
        self.phi = tuple(float(x) for x in self.phi)
        self.omega = tuple(float(x) for x in self.omega)
        if not self.omega:
            raise ValueError("omega needs at least the intercept")

    def vector(self) -> np.ndarray:
        """Free parameters in chain order: zeta, alpha, gamma, theta, phi."""
        return np.array([self.zeta, self.alpha, self.gamma, *self.theta, *self.phi])

    def names(self) -> list:
        return (["zeta", "alpha", "gamma"]
                + [f"theta{i + 1}" for i in range(len(self.theta))]
                + [f"phi{i + 1}" for i in range(len(self.phi))])

    def with_vector(self, vec) -> "SIParams":
        vec = np.asarray(vec, dtype=float)
        p3 = len(self.theta)
        p2 = len(self.phi)
        if len(vec) != 3 + p3 + p2:
            raise ValueError("parameter vector length mismatch")
        return SIParams(zeta=float(vec[0]), alpha=float(vec[1]), gamma=float(vec[2]),
                        theta=tuple(vec[3:3 + p3]), phi=tuple(vec[3 + p3:]),
                        omega=self.omega)


@dataclass
class CovariateSet:
    """Node covariate matrix (n x p) and optional per-edge covariates.

    Susceptibility consumes the first len(omega)-1 columns and
    transmissibility the first len(phi) columns, so an intercept-only
    susceptibility coexists with covariate-driven transmissibility.
    Edge covariates align with the graph's sorted edge list.
    """

    node: np.ndarray
    edge: np.ndarray | None = None

    def __post_init__(self):
        self.node = np.atleast_2d(np.asarray(self.node, dtype=float))
        if self.edge is not None:
            self.edge = np.asarray(self.edge, dtype=float)
            if self.edge.ndim == 1:
                self.edge = self.edge[:, None]


@dataclass
class DistanceProvider:
    """Pairwise distances entering the kernel, evaluated on edges.

    hops mode: adjacent nodes are one hop apart, so every edge has
    distance 1. euclidean mode: straight-line distance between the
    endpoint coordinates.
    """

    mode: str = "hops"

    def __post_init__(self):
        if self.mode not in ("hops", "euclidean"):
            raise ValueError(f"unknown distance mode {self.mode!r}")

    def edge_distances(self, g: Graph) -> np.ndarray:
        if self.mode == "hops":
            return np.ones(g.edge_count)
        if g.coords is None:
            raise ValueError("euclidean distances need node coordinates")
        e = g.edge_array()
        return np.sqrt(((g.coords[e[:, 0]] - g.coords[e[:, 1]]) ** 2).sum(axis=1))


@dataclass
class EventLog:
    """Ordered infection events (strictly increasing times) plus the
    time-0 infected set and the observation horizon."""

    times: np.ndarray
    nodes: np.ndarray
    initial_infected: np.ndarray
    horizon: float
    extinct: bool = False

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.nodes = np.asarray(self.nodes, dtype=np.int64)
        self.initial_infected = np.asarray(self.initial_infected, dtype=np.int64)
        if self.times.shape != self.nodes.shape:
            raise ValueError("times and nodes must align")
        if self.times.size and self.times[0] < 0:
            raise ValueError("event times must be non-negative")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("event times must be strictly increasing")
        all_nodes = np.concatenate([self.initial_infected, self.nodes])
        if len(np.unique(all_nodes)) != len(all_nodes):
            raise ValueError("a node may be infected only once")
        if self.times.size and self.horizon < self.times[-1]:
            raise ValueError("horizon precedes the last event")

    def __len__(self) -> int:
        return len(self.times)


# -- rate components --------------------------------------------------------


def susceptibility(i: int, covariates: CovariateSet, omega) -> float:
    """psi_S(i) = omega_0 + sum_k omega_k X_k(i); must be non-negative."""
    omega = np.asarray(omega, dtype=float)
    k = len(omega) - 1
    if k > covariates.node.shape[1]:
        raise ValueError("more susceptibility coefficients than covariates")
    val = omega[0] + (omega[1:] @ covariates.node[i, :k] if k else 0.0)
    if val < 0:
        raise ValueError("negative susceptibility")
    return float(val)


def transmissibility(j: int, covariates: CovariateSet, phi) -> float:
    """psi_T(j) = sum_k phi_k X_k(j); no intercept; non-negative."""
    phi = np.asarray(phi, dtype=float)
    k = len(phi)
    if k > covariates.node.shape[1]:
        raise ValueError("more transmissibility coefficients than covariates")
    val = phi @ covariates.node[j, :k] if k else 0.0
    if val < 0:
        raise ValueError("negative transmissibility")
    return float(val)


def kernel(d: float, edge_covariates, alpha: float, gamma: float, theta,
           connected: bool = True) -> float:
    """kappa = alpha * d^-gamma + theta . C on a connection, else exactly 0."""
    if not connected:
        return 0.0
    theta = np.asarray(theta, dtype=float)
    cov = np.asarray(edge_covariates, dtype=float) if len(theta) else np.zeros(0)
    if d == 0 and gamma > 0:
        raise ValueError("zero distance in kernel")
    dist_term = alpha * d ** (-gamma) if alpha != 0 else 0.0
    return float(dist_term + (theta @ cov if len(theta) else 0.0))


def _susceptibility_vector(covariates: CovariateSet, omega, n: int) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    k = len(omega) - 1
    vals = np.full(n, omega[0]) + (covariates.node[:, :k] @ omega[1:] if k else 0.0)
    if np.any(vals < 0):
        raise ValueError("negative susceptibility")
    return vals


def _transmissibility_vector(covariates: CovariateSet, phi, n: int) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    k = len(phi)
    vals = covariates.node[:, :k] @ phi if k else np.zeros(n)
    if np.any(vals < 0):
        raise ValueError("negative transmissibility")
    return vals


def _edge_kernel(g: Graph, params: SIParams, covariates: CovariateSet,
                 distances: DistanceProvider) -> np.ndarray:
    """kappa over the graph's edge list."""
    d = distances.edge_distances(g)
    if params.gamma > 0 and np.any(d == 0):
        raise ValueError("zero distance in kernel")
    out = params.alpha * d ** (-params.gamma) if params.alpha != 0 else np.zeros(len(d))
    if params.theta:
        if covariates.edge is None:
            raise ValueError("theta given but no edge covariates")
        out = out + covariates.edge[:, :len(params.theta)] @ np.asarray(params.theta)
    if np.any(out < 0):
        raise ValueError("negative kernel value")
    return out


def rate(g: Graph, i: int, infectious, params: SIParams,
         covariates: CovariateSet, distances: DistanceProvider) -> float:
    """lambda(i, t) for susceptible i against the given infectious set."""
    infectious = set(int(j) for j in infectious)
    psi_s = susceptibility(i, covariates, params.omega)
    d = distances.edge_distances(g)
    edge_index = {e: k for k, e in enumerate(g.edge_list())}
    total = 0.0
    for j in g.neighbors(i):
        j = int(j)
        if j not in infectious:
            continue
        eid = edge_index[(i, j) if i < j else (j, i)]
        ecov = covariates.edge[eid] if covariates.edge is not None else ()
        total += transmissibility(j, covariates, params.phi) * kernel(
            float(d[eid]), ecov, params.alpha, params.gamma, params.theta)
    val = psi_s * total + params.zeta
    if val < 0:
        raise ValueError("negative rate")
    return float(val)


# -- shared incremental hazard bookkeeping ----------------------------------


class _HazardState:
    """Per-node rates maintained incrementally as nodes become infectious."""

    def __init__(self, g: Graph, params: SIParams, covariates: CovariateSet,
                 distances: DistanceProvider):
        self.g = g
        self.psi_s = _susceptibility_vector(covariates, params.omega, g.n)
        self.psi_t = _transmissibility_vector(covariates, params.phi, g.n)
        self.kappa = _edge_kernel(g, params, covariates, distances)
        self.zeta = params.zeta
        edge_index = {}
        for k, e in enumerate(g.edge_list()):
            edge_index[e] = k
        self._edge_index = edge_index
        self.susceptible = np.ones(g.n, dtype=bool)
        self.lam = np.full(g.n, params.zeta)

    def infect(self, j: int):
        """Move j out of the susceptible set and push its pressure."""
        self.susceptible[j] = False
        self.lam[j] = 0.0
        psi_t_j = self.psi_t[j]
        for i in self.g.neighbors(j):
            i = int(i)
            if not self.susceptible[i]:
                continue
            eid = self._edge_index[(i, j) if i < j else (j, i)]
            self.lam[i] += self.psi_s[i] * psi_t_j * self.kappa[eid]

    def total(self) -> float:
        return float(self.lam[self.susceptible].sum())


def simulate_si(g: Graph, params: SIParams, covariates: CovariateSet,
                distances: DistanceProvider, initial_infected, horizon: float,
                rng: np.random.Generator, stop_fraction: float | None = None) -> EventLog:
    """Exact Gillespie simulation up to the horizon.

    Waiting times are exponential in the total rate; the infected node
    is chosen proportionally to its rate; rates update incrementally
    over the new infectious node's neighborhood. Ends early (flagged
    extinct) if the total rate hits zero with susceptibles remaining,
    or once `stop_fraction` of all nodes is infected.
    """
    initial = [int(v) for v in initial_infected]
    if not initial and params.zeta == 0:
        raise ValueError("need initial infected nodes or a positive spark rate")
    state = _HazardState(g, params, covariates, distances)
    for j in initial:
        state.infect(j)

    times = []
    nodes = []
    t = 0.0
    infected_count = len(initial)
    extinct = False
    while True:
        if not state.susceptible.any():
            break
        if stop_fraction is not None and infected_count >= stop_fraction * g.n:
            break
        v = state.total()
        if v <= 0:
            extinct = True
            break
        t = t + rng.exponential(1.0 / v)
        if t > horizon:
            t = horizon
            break
        probs = state.lam[state.susceptible] / v
        choices = np.nonzero(state.susceptible)[0]
        j = int(rng.choice(choices, p=probs))
        times.append(t)
        nodes.append(j)
        state.infect(j)
        infected_count += 1

    horizon_out = min(horizon, t) if (stop_fraction is not None and times) else horizon
    return EventLog(times=np.array(times), nodes=np.array(nodes, dtype=np.int64),
                    initial_infected=np.array(initial, dtype=np.int64),
                    horizon=horizon_out, extinct=extinct)


def log_likelihood(params: SIParams, log: EventLog, g: Graph,
                   covariates: CovariateSet, distances: DistanceProvider) -> float:
    """Exact log-likelihood of an event log.

    Each observed event contributes log lambda(i_t) - v(t) * dt for its
    inter-event gap; the interval from the last event to the horizon
    contributes the right-censoring survival term -v * dt. An event on
    a zero-rate node yields -inf (impossible data), not an exception.
    """
    state = _HazardState(g, params, covariates, distances)
    for j in log.initial_infected:
        state.infect(int(j))

    total = 0.0
    prev_t = 0.0
    for t, j in zip(log.times, log.nodes):
        j = int(j)
        v = state.total()
        total -= v * (t - prev_t)
        lam_j = state.lam[j]
        if not state.susceptible[j]:
            raise ValueError(f"event on already-infected node {j}")
        if lam_j <= 0:
            return float("-inf")
        total += np.log(lam_j)
        state.infect(j)
        prev_t = t
    total -= state.total() * (log.horizon - prev_t)
    return float(total)
