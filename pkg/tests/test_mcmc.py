import numpy as np
import pytest

from netdiff import rng as _rng
from netdiff.mcmc import (Chain, Exponential, PriorSpec, ProposalSpec, Uniform,
                          log_posterior, mh_step, posterior_summary, run_chain)


def _flat(_):
    return 0.0


def test_prior_spec_validation():
    with pytest.raises(ValueError):
        Uniform(2.0, 1.0)
    with pytest.raises(ValueError):
        Exponential(0.0)
    with pytest.raises(ValueError):
        PriorSpec([Uniform(0, 1)], names=["a", "b"])


def test_log_posterior_examples():
    prior = PriorSpec([Uniform(0.0, 1.0)])
    assert log_posterior([2.0], prior, _flat) == float("-inf")
    assert log_posterior([0.5], prior, _flat) == pytest.approx(0.0)  # log 1

    exp_prior = PriorSpec([Exponential(0.0001)])
    got = log_posterior([0.0001], exp_prior, _flat)
    assert got == pytest.approx(np.log(0.0001) - 0.0001 * 0.0001)


def test_mh_step_accepts_equal_and_better():
    prior = PriorSpec([Uniform(-10, 10)])
    gen = _rng.generator(1)
    # zero step: equal log posterior, always accepted
    cur = np.array([0.0])
    cur_lp = log_posterior(cur, prior, _flat)
    state, lp, acc = mh_step(cur, cur_lp, np.zeros(1), prior, _flat, gen)
    assert acc
    # strictly better proposals always accepted: target rewards moving right
    like = lambda th: float(th[0])
    cur = np.array([0.0])
    cur_lp = log_posterior(cur, prior, like)
    ups = 0
    for _ in range(200):
        new, cur_lp, acc = mh_step(cur, cur_lp, np.array([0.5]), prior, like, gen)
        if new[0] > cur[0]:
            assert acc
            ups += 1
        cur = new
    assert ups > 0


def test_mh_step_rejects_out_of_support():
    prior = PriorSpec([Uniform(0.0, 1.0)])
    gen = _rng.generator(2)
    # huge steps leave the support almost surely; rejected states repeat exactly
    cur = np.array([0.5])
    cur_lp = log_posterior(cur, prior, _flat)
    rejected = 0
    for _ in range(50):
        new, new_lp, acc = mh_step(cur, cur_lp, np.array([1e6]), prior, _flat, gen)
        if not acc:
            assert new is cur
            rejected += 1
    assert rejected >= 45


def test_run_chain_validation():
    prior = PriorSpec([Uniform(0, 1)])
    with pytest.raises(ValueError):
        run_chain(None, 100, 100, ProposalSpec(), prior, _flat, _rng.generator(1))
    with pytest.raises(ValueError, match="support"):
        run_chain([5.0], 100, 10, ProposalSpec(), prior, _flat, _rng.generator(1))


def test_run_chain_no_in_support_init():
    prior = PriorSpec([Uniform(0, 1)])
    with pytest.raises(ValueError, match="no in-support"):
        run_chain(None, 100, 10, ProposalSpec(), prior,
                  lambda th: float("-inf"), _rng.generator(1))


def test_prior_recovery():
    """Constant likelihood: the chain must reproduce the uniform prior."""
    prior = PriorSpec([Uniform(0.0, 1.0)])
    chain = run_chain(None, 50_000, 5_000, ProposalSpec(), prior, _flat,
                      _rng.generator(11))
    kept = chain.kept[:, 0]
    assert kept.mean() == pytest.approx(0.5, abs=0.02)
    assert kept.var() == pytest.approx(1 / 12, abs=0.01)
    s = posterior_summary(chain)["p0"]
    assert s["ci_lo"] == pytest.approx(0.025, abs=0.02)
    assert s["ci_hi"] == pytest.approx(0.975, abs=0.02)


def test_standard_normal_target():
    prior = PriorSpec([Uniform(-50.0, 50.0)])
    chain = run_chain(None, 100_000, 5_000, ProposalSpec(), prior,
                      lambda th: -0.5 * float(th[0]) ** 2, _rng.generator(12))
    kept = chain.kept[:, 0]
    assert abs(kept.mean()) < 0.05
    assert kept.var() == pytest.approx(1.0, abs=0.1)


def test_zero_variance_proposal_constant_chain():
    prior = PriorSpec([Uniform(0, 1)])
    chain = run_chain([0.5], 500, 10, ProposalSpec(scales=np.zeros(1), adapt=False),
                      prior, _flat, _rng.generator(3))
    assert chain.accepted.all()
    assert np.all(chain.samples == 0.5)


def test_chain_reproducibility():
    prior = PriorSpec([Uniform(0, 1), Exponential(2.0)])
    like = lambda th: -float(th[1])
    a = run_chain(None, 3_000, 500, ProposalSpec(), prior, like, _rng.generator(13))
    b = run_chain(None, 3_000, 500, ProposalSpec(), prior, like, _rng.generator(13))
    assert np.array_equal(a.samples, b.samples)
    assert np.array_equal(a.accepted, b.accepted)


def test_rejected_steps_duplicate_previous_state():
    prior = PriorSpec([Uniform(0, 1)])
    chain = run_chain([0.5], 2_000, 100, ProposalSpec(scales=np.array([5.0]), adapt=False),
                      prior, _flat, _rng.generator(14))
    rejected = np.nonzero(~chain.accepted[1:])[0] + 1
    assert rejected.size > 0
    for it in rejected[:200]:
        assert chain.samples[it] == chain.samples[it - 1]


def test_posterior_summary():
    const = Chain(samples=np.full((300, 1), 2.5), log_posts=np.zeros(300),
                  accepted=np.ones(300, bool), burn_in=100,
                  proposal_scales=np.ones(1), names=["c"])
    s = posterior_summary(const)["c"]
    assert s == {"mean": 2.5, "ci_lo": 2.5, "ci_hi": 2.5}

    sym = Chain(samples=np.array([[-1.0], [1.0]] * 150), log_posts=np.zeros(300),
                accepted=np.ones(300, bool), burn_in=0,
                proposal_scales=np.ones(1), names=["s"])
    assert posterior_summary(sym)["s"]["mean"] == pytest.approx(0.0)

    short = Chain(samples=np.zeros((50, 1)), log_posts=np.zeros(50),
                  accepted=np.ones(50, bool), burn_in=0,
                  proposal_scales=np.ones(1), names=["x"])
    with pytest.raises(ValueError, match="too few"):
        posterior_summary(short)
