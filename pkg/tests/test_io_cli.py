import json
import os

import numpy as np
import pytest
from click.testing import CliRunner

from netdiff import cli, io
from netdiff.generators import erdos_renyi, geometric_random
from netdiff.graph import giant_component
from netdiff.mcmc import Exponential, Uniform
from netdiff.si import EventLog


# -- ingestion ---------------------------------------------------------------


def test_ingest_edge_list_examples(tmp_path):
    p = tmp_path / "edges.csv"
    p.write_text("a,b\nb,c\n")
    g = io.ingest_edge_list(p)
    assert g.n == 3 and g.edge_count == 2
    assert g.labels == ["a", "b", "c"]

    p.write_text("a,b,5.0\n")
    g = io.ingest_edge_list(p)
    assert g.weight(0, 1) == 5.0


def test_ingest_comments_duplicates_self_loops(tmp_path):
    p = tmp_path / "edges.csv"
    p.write_text("# header comment\na,b,1.0\nb,a,7.5\nc,c\na,c\n")
    with pytest.warns(UserWarning, match="self-loop"):
        g = io.ingest_edge_list(p)
    assert g.n == 3
    assert g.edge_count == 2
    assert g.weight(0, 1) == 7.5  # duplicate collapsed keeping the last weight


def test_ingest_malformed_line_reports_number(tmp_path):
    p = tmp_path / "edges.csv"
    p.write_text("a,b\nnot-an-edge\n")
    with pytest.raises(ValueError, match=":2:"):
        io.ingest_edge_list(p)
    p.write_text("a,b,heavy\n")
    with pytest.raises(ValueError, match="bad weight"):
        io.ingest_edge_list(p)


def _label_edges(g):
    return {frozenset((g.label_of(u), g.label_of(v))): w
            for (u, v), w in zip(g.edge_list(), g.edge_weights())}


def test_edge_list_round_trip(tmp_path):
    """Writing and re-ingesting reproduces the identical labeled graph
    (dense ids are reassigned in first-seen order)."""
    for seed in range(5):
        g = erdos_renyi(40, 0.1, seed=seed)
        path = tmp_path / f"rt{seed}.csv"
        io.write_edge_list(g, path)
        back = io.ingest_edge_list(path)
        assert back.n == g.n - sum(1 for v in range(g.n) if g.degree(v) == 0)
        assert _label_edges(back) == {k: w for k, w in _label_edges(g).items()}


def test_weighted_round_trip(tmp_path):
    g = erdos_renyi(20, 0.2, seed=1)
    weights = _rng_weights(g.edge_count)
    from netdiff.graph import Graph

    wg = Graph(g.n, g.edge_list(), weights=weights)
    path = tmp_path / "w.csv"
    io.write_edge_list(wg, path)
    back = io.ingest_edge_list(path)
    assert _label_edges(back) == _label_edges(wg)


def _rng_weights(m):
    return np.round(np.random.default_rng(4).random(m) * 10, 6)


def test_coordinates_round_trip_and_errors(tmp_path):
    g = geometric_random(10, 0.5, seed=2)
    cpath = tmp_path / "coords.csv"
    io.write_coordinates(g, cpath)
    epath = tmp_path / "edges.csv"
    io.write_edge_list(g, epath)
    bare = io.ingest_edge_list(epath)
    # permute coordinate rows: result keyed by label, identical
    lines = cpath.read_text().strip().split("\n")
    (tmp_path / "perm.csv").write_text("\n".join(reversed(lines)) + "\n")
    got = io.ingest_coordinates(tmp_path / "perm.csv", bare)
    assert np.allclose(got.coords[: bare.n], g.coords[_label_order(g, bare)])

    (tmp_path / "missing.csv").write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(ValueError, match="missing coordinates for node"):
        io.ingest_coordinates(tmp_path / "missing.csv", bare)

    (tmp_path / "dup.csv").write_text("\n".join(lines + [lines[0]]) + "\n")
    with pytest.raises(ValueError, match="duplicate"):
        io.ingest_coordinates(tmp_path / "dup.csv", bare)

    (tmp_path / "unknown.csv").write_text(lines[0].replace(lines[0].split(",")[0], "zz", 1) + "\n")
    with pytest.raises(ValueError, match="unknown node"):
        io.ingest_coordinates(tmp_path / "unknown.csv", bare)


def _label_order(g, bare):
    index = {g.label_of(v): v for v in range(g.n)}
    return [index[bare.label_of(v)] for v in range(bare.n)]


def test_event_log_round_trip_and_tie_perturbation(tmp_path):
    g = erdos_renyi(10, 0.5, seed=3)
    log = EventLog(times=[0.5, 1.25], nodes=[3, 4], initial_infected=[0],
                   horizon=2.0)
    p = tmp_path / "events.csv"
    io.write_event_log(log, g, p)
    back = io.read_event_log(p, g)
    assert np.array_equal(back.times, log.times)
    assert np.array_equal(back.nodes, log.nodes)
    assert np.array_equal(back.initial_infected, log.initial_infected)
    assert back.horizon == 2.0

    p.write_text("# initial: 0\n# horizon: 3.0\n1.0,1\n1.0,2\n")
    with pytest.warns(UserWarning, match="tied event times"):
        tied = io.read_event_log(p, g)
    assert tied.times[1] == pytest.approx(1.0 + 1e-9)


def test_covariates_round_trip(tmp_path):
    g = erdos_renyi(15, 0.3, seed=4)
    cov = io.centrality_covariates(g)
    assert cov.node.shape == (15, 3)
    assert cov.node.max() <= 1.0 and cov.node.min() >= 0.0
    p = tmp_path / "cov.csv"
    io.write_covariates(cov, g, p)
    back = io.read_covariates(p, g)
    assert np.array_equal(back.node, cov.node)


def test_edge_covariates(tmp_path):
    g = erdos_renyi(10, 0.4, seed=5)
    u, v = g.edge_list()[0]
    p = tmp_path / "ecov.csv"
    p.write_text(f"{g.label_of(u)},{g.label_of(v)},3.5\n")
    vals = io.read_edge_covariates(p, g)
    assert vals.shape == (g.edge_count, 1)
    assert vals[0, 0] == 3.5 and np.all(vals[1:] == 0)

    p.write_text("0,999,1.0\n")
    with pytest.raises(ValueError, match="unknown node"):
        io.read_edge_covariates(p, g)


def test_priors_file(tmp_path):
    p = tmp_path / "priors.cfg"
    p.write_text("# comment\nzeta exp 0.0001\nalpha uniform 1 2\ngamma u 0.01 5\n")
    prior = io.read_priors(p, ["zeta", "alpha", "gamma"])
    assert isinstance(prior.dists[0], Exponential)
    assert isinstance(prior.dists[1], Uniform)
    assert prior.names == ["zeta", "alpha", "gamma"]

    with pytest.raises(ValueError, match="no prior given"):
        io.read_priors(p, ["zeta", "alpha", "gamma", "phi1"])
    p.write_text("zeta exp 0.0001\nzeta exp 1\n")
    with pytest.raises(ValueError, match="duplicate"):
        io.read_priors(p, ["zeta"])


def test_worker_count(monkeypatch):
    monkeypatch.delenv("NETDIFF_THREADS", raising=False)
    assert io.worker_count() == 1
    monkeypatch.setenv("NETDIFF_THREADS", "4")
    assert io.worker_count() == 4
    monkeypatch.setenv("NETDIFF_THREADS", "lots")
    with pytest.warns(UserWarning):
        assert io.worker_count() == 1


def test_atomic_write_leaves_no_partial_file(tmp_path):
    target = tmp_path / "out.txt"

    with pytest.raises(TypeError):
        io.atomic_write(target, object())  # not a string: write() fails midway
    assert not target.exists()
    assert not any(f.name.startswith(".tmp-netdiff") for f in tmp_path.iterdir())


# -- CLI ---------------------------------------------------------------------


@pytest.fixture
def runner():
    return CliRunner()


def _invoke(runner, args):
    result = runner.invoke(cli.main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


def test_cli_generate_complete_graph(runner, tmp_path):
    out = tmp_path / "edges.csv"
    _invoke(runner, ["--quiet", "generate", "--kind", "er", "--n", "10", "--p", "1",
                     "--seed", "1", "--out", str(out)])
    assert len(out.read_text().strip().split("\n")) == 45
    meta = json.loads((tmp_path / "edges.csv.meta.json").read_text())
    assert meta["tool"] == "netdiff" and meta["seed"] == 1


def test_cli_generate_round_trip(runner, tmp_path):
    out = tmp_path / "dt.csv"
    coords = tmp_path / "dt_coords.csv"
    _invoke(runner, ["--quiet", "generate", "--kind", "dt", "--n", "30",
                     "--seed", "3", "--out", str(out), "--coords", str(coords)])
    g = io.ingest_edge_list(out)
    g = io.ingest_coordinates(coords, g)
    from netdiff.generators import delaunay

    direct = delaunay(30, "normal", seed=3)
    assert _label_edges(g) == {frozenset((str(u), str(v))): w
                               for (u, v), w in zip(direct.edge_list(),
                                                    direct.edge_weights())}


def test_cli_simulate_kt_one_node_graph(runner, tmp_path):
    edges = tmp_path / "one.csv"
    edges.write_text("a,a\n")  # self-loop line registers an isolated node
    out = tmp_path / "curve.csv"
    _invoke(runner, ["--quiet", "simulate-kt", "--edges", str(edges), "--eta0", "0.5",
                     "--steps", "10", "--runs", "1", "--seed", "2", "--out", str(out)])
    rows = out.read_text().strip().split("\n")
    assert rows[0] == "timestep,mean_eta,lo95,hi95"
    assert all(r.split(",")[1] == "1.0" for r in rows[1:])


def test_cli_motifs_json(runner, tmp_path):
    edges = tmp_path / "edges.csv"
    io.write_edge_list(erdos_renyi(20, 0.3, seed=7), edges)
    out = tmp_path / "census.json"
    _invoke(runner, ["--quiet", "motifs", "--edges", str(edges), "--out", str(out)])
    data = json.loads(out.read_text())
    assert set(data) == {"counts", "concentrations", "used_edges", "total_edges"}
    assert set(data["counts"]) == {"path4", "star4", "cycle4", "paw", "diamond",
                                   "clique4"}
    assert sum(data["concentrations"].values()) == pytest.approx(1.0)


def test_cli_si_pipeline_and_determinism(runner, tmp_path):
    edges = tmp_path / "edges.csv"
    io.write_edge_list(erdos_renyi(30, 0.15, seed=8), edges)
    priors = tmp_path / "priors.cfg"
    priors.write_text("zeta exp 1\nalpha uniform 0.001 5\ngamma uniform 0 10\n"
                      "phi1 uniform 0 5\nphi2 uniform 0 5\nphi3 uniform 0 5\n")

    events = {}
    for tag in ("a", "b"):
        out = tmp_path / f"events_{tag}.csv"
        _invoke(runner, ["--quiet", "simulate-si", "--edges", str(edges),
                         "--horizon", "200", "--stop-fraction", "0.8",
                         "--seed", "11", "--out", str(out)])
        events[tag] = out.read_bytes()
    assert events["a"] == events["b"]  # byte-identical rerun

    trace, summary = tmp_path / "trace.csv", tmp_path / "summary.json"
    _invoke(runner, ["--quiet", "infer-si", "--edges", str(edges),
                     "--events", str(tmp_path / "events_a.csv"),
                     "--priors", str(priors), "--iters", "300", "--burnin", "100",
                     "--chains", "2", "--seed", "12", "--trace", str(trace),
                     "--summary", str(summary)])
    header = trace.read_text().split("\n")[0]
    assert header == "zeta,alpha,gamma,phi1,phi2,phi3,log_post"
    data = json.loads(summary.read_text())
    assert "acceptance_rate" in data
    assert set(data["alpha"]) == {"mean", "ci_lo", "ci_hi"}
    assert data["alpha"]["ci_lo"] <= data["alpha"]["mean"] <= data["alpha"]["ci_hi"]


def test_cli_ad_test(runner, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    gen = np.random.default_rng(1)
    a.write_text("\n".join(str(x) for x in gen.normal(0, 1, 60)) + "\n")
    b.write_text("\n".join(str(x) for x in gen.normal(4, 1, 60)) + "\n")
    result = _invoke(runner, ["--quiet", "stats", "ad-test", "--inputs", str(a),
                              "--inputs", str(b)])
    payload = json.loads(result.output.strip().split("\n")[-1])
    assert payload["p_value"] <= 0.01


def test_cli_experiment_motif_speed(runner, tmp_path):
    out = tmp_path / "table.csv"
    args = ["--quiet", "experiment", "motif-speed", "--blocks", "3x30",
            "--pb-grid", "0.005:0.06:4", "--runs", "2", "--steps", "60",
            "--seed", "5", "--out", str(out)]
    _invoke(runner, args)
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "motif,mean_corr,sd_corr"
    assert len(lines) == 7  # all six motifs reported

    out2 = tmp_path / "table2.csv"
    _invoke(runner, [a if a != str(out) else str(out2) for a in args])
    assert out.read_text() == out2.read_text()


def test_cli_curve_determinism_and_plot(runner, tmp_path):
    edges = tmp_path / "edges.csv"
    io.write_edge_list(erdos_renyi(40, 0.15, seed=9), edges)
    outs = []
    for tag in ("x", "y"):
        out = tmp_path / f"curve_{tag}.csv"
        _invoke(runner, ["--quiet", "simulate-kt", "--edges", str(edges),
                         "--eta0", "0.05", "--steps", "60", "--runs", "10",
                         "--seed", "21", "--out", str(out),
                         "--plot", str(tmp_path / f"curve_{tag}.png")])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert (tmp_path / "curve_x.png").stat().st_size > 0


def test_cli_error_leaves_no_output(runner, tmp_path):
    out = tmp_path / "never.csv"
    result = runner.invoke(cli.main, ["--quiet", "generate", "--kind", "er",
                                      "--n", "10", "--p", "7", "--seed", "1",
                                      "--out", str(out)])
    assert result.exit_code != 0
    assert not out.exists()


def test_cli_fresh_seed_recorded(runner, tmp_path):
    out = tmp_path / "edges.csv"
    _invoke(runner, ["--quiet", "generate", "--kind", "er", "--n", "5", "--p", "0.5",
                     "--out", str(out)])
    meta = json.loads((tmp_path / "edges.csv.meta.json").read_text())
    assert isinstance(meta["seed"], int)
