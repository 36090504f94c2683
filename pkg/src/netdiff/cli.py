"""Command-line surface binding the library into reproducible pipelines.

Every randomized command takes --seed (one is generated and recorded in
the output metadata if omitted); identical config + seed reproduces
byte-identical data outputs. Logs go to stderr, data to files or
stdout, never mixed.
"""

from __future__ import annotations

import json
import logging
import sys
import time

import click
import numpy as np

from netdiff import __version__, generators, io, kt, mcmc, motifs, si, stats
from netdiff import rng as _rng
from netdiff.graph import giant_component

log = logging.getLogger("netdiff")

_STRATEGY = {"random": "random", "degree": "top-degree", "betweenness": "top-betweenness"}


def _parse_blocks(text: str):
    """Block sizes as `KxS` (K equal blocks) or a comma list."""
    if "x" in text:
        k, s = text.split("x")
        return [int(s)] * int(k)
    return [int(p) for p in text.split(",")]


def _parse_grid(text: str):
    """Probability grid `lo:hi:count`, inclusive and evenly spaced."""
    lo, hi, count = text.split(":")
    return list(np.linspace(float(lo), float(hi), int(count)))


def _resolve_seed(seed):
    return _rng.fresh_seed() if seed is None else seed


@click.group()
@click.version_option(version=__version__)
@click.option("--verbose", is_flag=True, help="debug logging on stderr")
@click.option("--quiet", is_flag=True, help="errors only")
def main(verbose, quiet):
    """Diffusion simulation and inference on complex networks."""
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.INFO
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--kind", type=click.Choice(["er", "grg", "dt", "sbm"]), required=True)
@click.option("--n", type=int, default=300, show_default=True)
@click.option("--p", type=float, default=0.02, help="ER edge probability")
@click.option("--r", type=float, default=0.08, help="GRG connection radius")
@click.option("--points", type=click.Choice(["normal", "uniform"]), default="normal",
              show_default=True, help="DT point distribution")
@click.option("--blocks", default="3x200", show_default=True, help="SBM block sizes")
@click.option("--pw", type=float, default=0.03, help="SBM within-block probability")
@click.option("--pb", type=float, default=0.001, help="SBM between-block probability")
@click.option("--seed", type=int, default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--coords", type=click.Path(), default=None,
              help="also write node coordinates (grg/dt)")
def generate(kind, n, p, r, points, blocks, pw, pb, seed, out, coords):
    """Generate a random graph and write its edge list."""
    started = time.time()
    seed = _resolve_seed(seed)
    if kind == "er":
        g = generators.erdos_renyi(n, p, seed)
    elif kind == "grg":
        g = generators.geometric_random(n, r, seed)
    elif kind == "dt":
        g = generators.delaunay(n, points, seed)
    else:
        sizes = _parse_blocks(blocks)
        k = len(sizes)
        P = np.full((k, k), pb)
        np.fill_diagonal(P, pw)
        g = generators.stochastic_block_model(sizes, P, seed)
    io.write_edge_list(g, out)
    if coords:
        io.write_coordinates(g, coords)
    config = {"kind": kind, "n": n, "p": p, "r": r, "points": points,
              "blocks": blocks, "pw": pw, "pb": pb, "out": out, "coords": coords}
    io.write_metadata(out, "generate", config, seed, started)
    log.info("wrote %s (%d nodes, %d edges)", out, g.n, g.edge_count)


@main.command("simulate-kt")
@click.option("--edges", required=True, type=click.Path(exists=True))
@click.option("--eta0", type=float, default=0.01, show_default=True)
@click.option("--steps", type=int, default=500, show_default=True)
@click.option("--delta", type=float, default=0.001, show_default=True)
@click.option("--beta", type=float, default=0.05, show_default=True)
@click.option("--tau", type=float, default=0.30, show_default=True)
@click.option("--steady", type=float, default=0.95, show_default=True,
              help="steady-state target fraction")
@click.option("--seed-strategy", type=click.Choice(list(_STRATEGY)), default="degree",
              show_default=True)
@click.option("--runs", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--resample", type=click.Choice(["percentile", "bootstrap"]),
              default="percentile", show_default=True)
@click.option("--giant/--no-giant", default=False, help="restrict to the giant component")
@click.option("--out", required=True, type=click.Path())
@click.option("--plot", type=click.Path(), default=None,
              help="render the curve as a figure alongside the CSV")
def simulate_kt(edges, eta0, steps, delta, beta, tau, steady, seed_strategy, runs,
                seed, resample, giant, out, plot):
    """Run threshold cascades and write the mean infection curve."""
    started = time.time()
    seed = _resolve_seed(seed)
    g = io.ingest_edge_list(edges)
    if giant:
        g = giant_component(g)
    params = kt.KTParams(eta0=eta0, k=steps, delta=delta, beta=beta, tau=tau,
                         steady_fraction=steady)
    strategy = kt.SeedStrategy(_STRATEGY[seed_strategy], fraction=eta0)
    curves = kt.ensemble_curves(kt.ConstantGraph(g), params, strategy, runs, seed,
                                workers=io.worker_count())
    rows = []
    if runs > 1:
        band = stats.infection_bands(stats.CurveEnsemble(curves), resample=resample,
                                     rng=_rng.stream(seed, 1 << 62))
        for t in range(curves.shape[0]):
            rows.append((t, band.mean[t], band.lo[t], band.hi[t]))
        plot_curves = {seed_strategy: band}
    else:
        for t in range(curves.shape[0]):
            rows.append((t, float(curves[t, 0]), "", ""))
        plot_curves = {seed_strategy: stats.BandedCurve(
            mean=curves[:, 0], lo=curves[:, 0], hi=curves[:, 0])}
    io.write_csv(out, ["timestep", "mean_eta", "lo95", "hi95"], rows)
    config = {"edges": edges, "eta0": eta0, "steps": steps, "delta": delta,
              "beta": beta, "tau": tau, "steady": steady,
              "seed_strategy": seed_strategy, "runs": runs, "resample": resample,
              "giant": giant, "out": out}
    io.write_metadata(out, "simulate-kt", config, seed, started, inputs=[edges])
    if plot:
        from netdiff import plotting

        plotting.plot_infection_curves(plot_curves, plot)
        log.info("wrote %s", plot)
    log.info("wrote %s (%d runs)", out, runs)


@main.command("motifs")
@click.option("--edges", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def motifs_cmd(edges, out):
    """Edge-disjoint 4-node motif census to JSON."""
    started = time.time()
    g = io.ingest_edge_list(edges)
    c = motifs.census(g)
    payload = {
        "counts": dict(c.counts),
        "concentrations": motifs.concentration(c) if c.total else {},
        "used_edges": len(c.used_edges),
        "total_edges": g.edge_count,
    }
    io.write_json(out, payload)
    io.write_metadata(out, "motifs", {"edges": edges, "out": out}, None, started,
                      inputs=[edges])
    log.info("wrote %s (total %d motifs)", out, c.total)


def _load_si_inputs(edges, coords, covariates, edge_cov, distance):
    g = io.ingest_edge_list(edges)
    if coords:
        g = io.ingest_coordinates(coords, g)
    cov = io.read_covariates(covariates, g) if covariates else io.centrality_covariates(g)
    if edge_cov:
        cov = si.CovariateSet(node=cov.node, edge=io.read_edge_covariates(edge_cov, g))
    distances = si.DistanceProvider("hops" if distance == "hops" else "euclidean")
    return g, cov, distances


@main.command("simulate-si")
@click.option("--edges", required=True, type=click.Path(exists=True))
@click.option("--coords", type=click.Path(exists=True), default=None)
@click.option("--covariates", type=click.Path(exists=True), default=None,
              help="node covariate CSV; defaults to normalized centralities")
@click.option("--edge-cov", type=click.Path(exists=True), default=None)
@click.option("--distance", type=click.Choice(["hops", "euclidean"]), default="hops",
              show_default=True)
@click.option("--zeta", type=float, default=1e-4, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--gamma", type=float, default=2.0, show_default=True)
@click.option("--theta", type=float, multiple=True)
@click.option("--phi", type=float, multiple=True, default=(1.0, 1.0, 1.0),
              show_default=True)
@click.option("--initial", default=None, help="comma list of seed node labels")
@click.option("--initial-count", type=int, default=1, show_default=True,
              help="random seeds when --initial is not given")
@click.option("--horizon", type=float, required=True)
@click.option("--stop-fraction", type=float, default=None,
              help="stop once this fraction of nodes is infected")
@click.option("--seed", type=int, default=None)
@click.option("--out", required=True, type=click.Path())
def simulate_si(edges, coords, covariates, edge_cov, distance, zeta, alpha, gamma,
                theta, phi, initial, initial_count, horizon, stop_fraction, seed, out):
    """Simulate one continuous-time SI realization to an event log."""
    started = time.time()
    seed = _resolve_seed(seed)
    g, cov, distances = _load_si_inputs(edges, coords, covariates, edge_cov, distance)
    params = si.SIParams(zeta=zeta, alpha=alpha, gamma=gamma, theta=tuple(theta),
                         phi=tuple(phi))
    gen = _rng.generator(seed)
    if initial:
        index = {g.label_of(v): v for v in range(g.n)}
        try:
            init = [index[lab.strip()] for lab in initial.split(",")]
        except KeyError as e:
            raise click.ClickException(f"unknown node {e.args[0]!r}")
    else:
        init = list(gen.choice(g.n, size=initial_count, replace=False))
    event_log = si.simulate_si(g, params, cov, distances, init, horizon, gen,
                               stop_fraction=stop_fraction)
    io.write_event_log(event_log, g, out)
    config = {"edges": edges, "coords": coords, "covariates": covariates,
              "edge_cov": edge_cov, "distance": distance, "zeta": zeta,
              "alpha": alpha, "gamma": gamma, "theta": list(theta),
              "phi": list(phi), "initial": initial, "initial_count": initial_count,
              "horizon": horizon, "stop_fraction": stop_fraction, "out": out}
    inputs = [p for p in (edges, coords, covariates, edge_cov) if p]
    io.write_metadata(out, "simulate-si", config, seed, started, inputs=inputs)
    log.info("wrote %s (%d events%s)", out, len(event_log),
             ", extinct" if event_log.extinct else "")


@main.command("infer-si")
@click.option("--edges", required=True, type=click.Path(exists=True))
@click.option("--events", required=True, type=click.Path(exists=True))
@click.option("--coords", type=click.Path(exists=True), default=None)
@click.option("--covariates", type=click.Path(exists=True), default=None)
@click.option("--edge-cov", type=click.Path(exists=True), default=None)
@click.option("--distance", type=click.Choice(["hops", "euclidean"]), default="hops",
              show_default=True)
@click.option("--priors", required=True, type=click.Path(exists=True))
@click.option("--iters", type=int, default=20000, show_default=True)
@click.option("--burnin", type=int, default=2000, show_default=True)
@click.option("--chains", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--trace", required=True, type=click.Path())
@click.option("--summary", required=True, type=click.Path())
@click.option("--plot", type=click.Path(), default=None,
              help="render per-parameter trace figures")
def infer_si(edges, events, coords, covariates, edge_cov, distance, priors, iters,
             burnin, chains, seed, trace, summary, plot):
    """Fit SI parameters by Metropolis-Hastings and write trace + summary."""
    started = time.time()
    seed = _resolve_seed(seed)
    g, cov, distances = _load_si_inputs(edges, coords, covariates, edge_cov, distance)
    event_log = io.read_event_log(events, g)
    template = si.SIParams(theta=(0.0,) * (1 if edge_cov else 0),
                           phi=(0.0,) * cov.node.shape[1])
    names = template.names()
    prior = io.read_priors(priors, names)

    def likelihood_fn(vec):
        return si.log_likelihood(template.with_vector(vec), event_log, g, cov,
                                 distances)

    results = []
    for c in range(chains):
        gen = _rng.stream(seed, c)
        chain = mcmc.run_chain(None, iters, burnin, mcmc.ProposalSpec(), prior,
                               likelihood_fn, gen)
        results.append(chain)
        log.info("chain %d: acceptance %.3f", c, chain.acceptance_rate)

    kept = np.vstack([c.kept for c in results])
    kept_lp = np.concatenate([c.log_posts[c.burn_in:] for c in results])
    rows = [tuple(kept[i]) + (kept_lp[i],) for i in range(kept.shape[0])]
    io.write_csv(trace, names + ["log_post"], rows)

    payload = {}
    for k, name in enumerate(names):
        lo, hi = np.percentile(kept[:, k], [2.5, 97.5])
        payload[name] = {"mean": float(kept[:, k].mean()),
                         "ci_lo": float(lo), "ci_hi": float(hi)}
    payload["acceptance_rate"] = float(np.mean([c.acceptance_rate for c in results]))
    io.write_json(summary, payload)

    config = {"edges": edges, "events": events, "coords": coords,
              "covariates": covariates, "edge_cov": edge_cov, "distance": distance,
              "priors": priors, "iters": iters, "burnin": burnin, "chains": chains,
              "trace": trace, "summary": summary}
    inputs = [p for p in (edges, events, coords, covariates, edge_cov, priors) if p]
    io.write_metadata(summary, "infer-si", config, seed, started, inputs=inputs)
    if plot:
        from netdiff import plotting

        plotting.plot_traces(np.vstack([c.samples for c in results]), names, plot,
                             burn_in=burnin)
        log.info("wrote %s", plot)
    log.info("wrote %s and %s", trace, summary)


@main.group()
def stats_group():
    """Statistical tests on saved samples."""


# expose as `netdiff stats ad-test`
main.add_command(stats_group, name="stats")


@stats_group.command("ad-test")
@click.option("--inputs", multiple=True, required=True, type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="also write JSON here")
def ad_test(inputs, out):
    """k-sample Anderson-Darling test over sample files."""
    started = time.time()
    samples = [io.read_sample_csv(p) for p in inputs]
    statistic, p_value = stats.ad_k_sample(samples)
    payload = {"statistic": statistic, "p_value": p_value}
    click.echo(json.dumps(payload))
    if out:
        io.write_json(out, payload)
        io.write_metadata(out, "stats ad-test", {"inputs": list(inputs), "out": out},
                          None, started, inputs=list(inputs))


@main.group()
def experiment():
    """Paper-pipeline experiment drivers."""


@experiment.command("motif-speed")
@click.option("--pw", type=float, default=0.03, show_default=True)
@click.option("--pb-grid", default="0.001:0.01:10", show_default=True,
              help="between-block probability grid lo:hi:count")
@click.option("--blocks", default="3x200", show_default=True)
@click.option("--runs", type=int, default=100, show_default=True)
@click.option("--eta0", type=float, default=0.01, show_default=True)
@click.option("--steps", type=int, default=500, show_default=True)
@click.option("--delta", type=float, default=0.001, show_default=True)
@click.option("--beta", type=float, default=0.05, show_default=True)
@click.option("--tau", type=float, default=0.30, show_default=True)
@click.option("--seed-strategy", type=click.Choice(list(_STRATEGY)), default="degree",
              show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--plot", type=click.Path(), default=None)
def motif_speed(pw, pb_grid, blocks, runs, eta0, steps, delta, beta, tau,
                seed_strategy, seed, out, plot):
    """Correlate diffusion speed with motif concentrations across an
    SBM between-block probability grid."""
    started = time.time()
    seed = _resolve_seed(seed)
    params = kt.KTParams(eta0=eta0, k=steps, delta=delta, beta=beta, tau=tau)
    strategy = kt.SeedStrategy(_STRATEGY[seed_strategy], fraction=eta0)
    result = stats.motif_speed_experiment(
        _parse_blocks(blocks), pw, _parse_grid(pb_grid), runs, params, strategy,
        seed, workers=io.worker_count())
    rows = [(name, result.mean_corr[name], result.sd_corr[name])
            for name in motifs.TEMPLATE_NAMES]
    io.write_csv(out, ["motif", "mean_corr", "sd_corr"], rows)
    config = {"pw": pw, "pb_grid": pb_grid, "blocks": blocks, "runs": runs,
              "eta0": eta0, "steps": steps, "delta": delta, "beta": beta,
              "tau": tau, "seed_strategy": seed_strategy, "out": out}
    io.write_metadata(out, "experiment motif-speed", config, seed, started)
    if plot:
        from netdiff import plotting

        plotting.plot_motif_correlations(result, plot)
        log.info("wrote %s", plot)
    log.info("wrote %s", out)


if __name__ == "__main__":
    main()
