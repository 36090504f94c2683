"""Random-walk Metropolis-Hastings with per-coordinate adaptive scales.

Proposals are independent Gaussian steps per coordinate (a symmetric
kernel), accepted with probability min(1, exp(dlog-posterior)); all
acceptance arithmetic stays in log space. Scales adapt multiplicatively
toward a 20-40% acceptance window during burn-in only, so the kept
portion of the chain satisfies detailed balance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("uniform prior needs lo < hi")

    def log_density(self, x: float) -> float:
        if self.lo <= x <= self.hi:
            return -np.log(self.hi - self.lo)
        return float("-inf")

    def sample(self, rng) -> float:
        return float(rng.uniform(self.lo, self.hi))

    def scale_hint(self) -> float:
        return (self.hi - self.lo) / 10.0


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("exponential prior needs a positive rate")

    def log_density(self, x: float) -> float:
        if x < 0:
            return float("-inf")
        return np.log(self.rate) - self.rate * x

    def sample(self, rng) -> float:
        return float(rng.exponential(1.0 / self.rate))

    def scale_hint(self) -> float:
        return 1.0 / (self.rate * 10.0)


@dataclass
class PriorSpec:
    """Independent per-parameter priors with log-space density."""

    dists: list
    names: list | None = None

    def __post_init__(self):
        if self.names is None:
            self.names = [f"p{i}" for i in range(len(self.dists))]
        if len(self.names) != len(self.dists):
            raise ValueError("names must align with distributions")

    @property
    def dim(self) -> int:
        return len(self.dists)

    def log_density(self, theta) -> float:
        total = 0.0
        for d, x in zip(self.dists, theta):
            lp = d.log_density(float(x))
            if lp == float("-inf"):
                return float("-inf")
            total += lp
        return total

    def sample(self, rng) -> np.ndarray:
        return np.array([d.sample(rng) for d in self.dists])

    def scale_hints(self) -> np.ndarray:
        return np.array([d.scale_hint() for d in self.dists])


@dataclass
class Chain:
    samples: np.ndarray  # iterations x dim, burn-in included
    log_posts: np.ndarray
    accepted: np.ndarray
    burn_in: int
    proposal_scales: np.ndarray
    names: list

    @property
    def kept(self) -> np.ndarray:
        return self.samples[self.burn_in:]

    @property
    def acceptance_rate(self) -> float:
        return float(self.accepted.mean())


def log_posterior(theta, prior: PriorSpec, likelihood_fn) -> float:
    """log L(theta) + log P(theta); -inf outside the prior support."""
    lp = prior.log_density(theta)
    if lp == float("-inf"):
        return float("-inf")
    return lp + likelihood_fn(np.asarray(theta, dtype=float))


def mh_step(current, current_lp, scales, prior: PriorSpec, likelihood_fn,
            rng: np.random.Generator):
    """One random-walk step; returns (state, log_post, accepted)."""
    proposal = current + rng.normal(0.0, 1.0, size=len(current)) * scales
    prop_lp = log_posterior(proposal, prior, likelihood_fn)
    if prop_lp == float("-inf"):
        return current, current_lp, False
    log_ratio = prop_lp - current_lp
    if log_ratio >= 0 or np.log(rng.random()) < log_ratio:
        return proposal, prop_lp, True
    return current, current_lp, False


@dataclass
class ProposalSpec:
    """Initial per-coordinate step sizes plus burn-in adaptation policy.

    Adaptation is two-part and runs only during burn-in: a global factor
    moves multiplicatively toward the 20-40% acceptance window, and the
    per-coordinate shape follows the running posterior standard
    deviations, so flat and tightly-constrained directions get steps on
    their own scales.
    """

    scales: np.ndarray | None = None
    adapt: bool = True
    target_low: float = 0.2
    target_high: float = 0.4
    interval: int = 50

    def initial(self, prior: PriorSpec) -> np.ndarray:
        if self.scales is not None:
            return np.asarray(self.scales, dtype=float).copy()
        return prior.scale_hints()


def _find_init(prior: PriorSpec, likelihood_fn, rng, draws: int = 10_000):
    """Best finite-log-posterior state among prior draws (capped search)."""
    best = None
    best_lp = float("-inf")
    tried = 0
    finite = 0
    while tried < draws:
        theta = prior.sample(rng)
        lp = log_posterior(theta, prior, likelihood_fn)
        tried += 1
        if lp > float("-inf"):
            finite += 1
            if lp > best_lp:
                best, best_lp = theta, lp
            if finite >= 64:
                break
    if best is None:
        raise ValueError("no in-support initial state found in prior draws")
    return best, best_lp


def run_chain(init, iterations: int, burn_in: int, proposal: ProposalSpec,
              prior: PriorSpec, likelihood_fn, rng: np.random.Generator) -> Chain:
    """Sample a full chain; samples include the burn-in segment.

    init=None draws candidate states from the prior and starts at the
    best finite one. Adaptation multiplies each scale toward the 20-40%
    acceptance window every `interval` steps and freezes at burn-in.
    """
    if not iterations > burn_in >= 0:
        raise ValueError("need iterations > burn_in >= 0")
    if init is None:
        current, current_lp = _find_init(prior, likelihood_fn, rng)
    else:
        current = np.asarray(init, dtype=float).copy()
        current_lp = log_posterior(current, prior, likelihood_fn)
        if current_lp == float("-inf"):
            raise ValueError("initial state outside prior support")

    dim = prior.dim
    scales = proposal.initial(prior)
    samples = np.empty((iterations, dim))
    log_posts = np.empty(iterations)
    accepted = np.zeros(iterations, dtype=bool)
    window = np.zeros(proposal.interval, dtype=bool)

    for it in range(iterations):
        current, current_lp, acc = mh_step(current, current_lp, scales, prior,
                                           likelihood_fn, rng)
        samples[it] = current
        log_posts[it] = current_lp
        accepted[it] = acc
        if proposal.adapt and it < burn_in:
            window[it % proposal.interval] = acc
            if (it + 1) % proposal.interval == 0:
                r = window.mean()
                if r < proposal.target_low:
                    scales *= 0.8
                elif r > proposal.target_high:
                    scales *= 1.25
    return Chain(samples=samples, log_posts=log_posts, accepted=accepted,
                 burn_in=burn_in, proposal_scales=scales, names=list(prior.names))


def posterior_summary(chain: Chain) -> dict:
    """Per-parameter mean and central 95% credible interval."""
    kept = chain.kept
    if kept.shape[0] < 100:
        raise ValueError("too few post-burn-in samples for a summary")
    out = {}
    for k, name in enumerate(chain.names):
        col = kept[:, k]
        lo, hi = np.percentile(col, [2.5, 97.5])
        out[name] = {"mean": float(col.mean()), "ci_lo": float(lo), "ci_hi": float(hi)}
    return out
