"""File formats and run metadata.

Tabular data is CSV, summaries are JSON. Node labels are arbitrary
strings; dense integer indices exist only inside the library, and the
boundary is crossed exactly here. Writers stage to a temp file and
rename so failed runs never leave partial outputs, and every output
gets a sibling .meta.json recording enough to replay the run.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
import warnings
from dataclasses import dataclass

import numpy as np

from netdiff import __version__
from netdiff.graph import (Graph, betweenness_centrality, clustering_centrality,
                           degree_centrality, normalize_by_max)
from netdiff.mcmc import Exponential, PriorSpec, Uniform
from netdiff.si import CovariateSet, EventLog


def worker_count() -> int:
    """Parallelism cap from NETDIFF_THREADS (default 1, sequential)."""
    raw = os.environ.get("NETDIFF_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        warnings.warn(f"ignoring invalid NETDIFF_THREADS={raw!r}")
        return 1


def atomic_write(path, text: str):
    """Write via temp file + rename; no partial outputs on failure."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-netdiff-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_metadata(out_path, command: str, config: dict, seed, started: float,
                   inputs=()):
    """Sibling .meta.json: version, resolved config, seed, duration, digests."""
    meta = {
        "tool": "netdiff",
        "version": __version__,
        "command": command,
        "config": config,
        "seed": seed,
        "duration_s": round(time.time() - started, 6),
        "inputs": {os.fspath(p): _sha256(p) for p in inputs},
    }
    atomic_write(os.fspath(out_path) + ".meta.json",
                 json.dumps(meta, indent=2, sort_keys=True) + "\n")


# -- graphs -----------------------------------------------------------------


def ingest_edge_list(path, weighted: bool = True) -> Graph:
    """Parse `source,target[,weight]` lines into a Graph.

    '#' lines are comments; duplicate edges collapse keeping the last
    weight; self-loops are skipped with a warning. Node ids are dense
    integers in first-seen order, labels kept on the graph.
    """
    labels = []
    index = {}
    edges = {}

    def node(label):
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) not in (2, 3):
                raise ValueError(f"{path}:{lineno}: expected source,target[,weight]")
            u, v = node(parts[0]), node(parts[1])
            if u == v:
                warnings.warn(f"{path}:{lineno}: self-loop on {parts[0]!r} skipped")
                continue
            w = 1.0
            if len(parts) == 3 and weighted:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: bad weight {parts[2]!r}")
                if w < 0:
                    raise ValueError(f"{path}:{lineno}: negative weight")
            edges[(u, v) if u < v else (v, u)] = w  # keep-last collapse
    items = sorted(edges.items())
    return Graph(len(labels), [e for e, _ in items],
                 weights=np.array([w for _, w in items]), labels=labels)


def write_edge_list(g: Graph, path, metadata=None):
    lines = []
    weights = g.edge_weights()
    plain = np.all(weights == 1.0)
    for (u, v), w in zip(g.edge_list(), weights):
        if plain:
            lines.append(f"{g.label_of(u)},{g.label_of(v)}")
        else:
            lines.append(f"{g.label_of(u)},{g.label_of(v)},{_fmt(w)}")
    atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def ingest_coordinates(path, g: Graph) -> Graph:
    """Attach `label,x,y` coordinates; every node must get exactly one row."""
    index = {g.label_of(v): v for v in range(g.n)}
    coords = np.full((g.n, 2), np.nan)
    seen = set()
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected label,x,y")
            label = parts[0]
            if label not in index:
                raise ValueError(f"{path}:{lineno}: unknown node {label!r}")
            if label in seen:
                raise ValueError(f"{path}:{lineno}: duplicate coordinates for {label!r}")
            seen.add(label)
            coords[index[label]] = [float(parts[1]), float(parts[2])]
    missing = [g.label_of(v) for v in range(g.n) if np.isnan(coords[v]).any()]
    if missing:
        raise ValueError(f"missing coordinates for node {missing[0]!r}")
    return Graph(g.n, g.edge_list(), weights=g.edge_weights(),
                 labels=list(g.labels) if g.labels else None,
                 coords=coords, blocks=g.blocks)


def write_coordinates(g: Graph, path):
    if g.coords is None:
        raise ValueError("graph has no coordinates")
    lines = [f"{g.label_of(v)},{_fmt(g.coords[v, 0])},{_fmt(g.coords[v, 1])}"
             for v in range(g.n)]
    atomic_write(path, "\n".join(lines) + "\n")


# -- SI data ----------------------------------------------------------------


def read_event_log(path, g: Graph) -> EventLog:
    """CSV `time,node_label` plus `# initial:` and `# horizon:` headers.

    Exact time ties are perturbed by +1e-9 * rank with a warning, since
    the likelihood assumes strictly ordered events.
    """
    index = {g.label_of(v): v for v in range(g.n)}
    initial = []
    horizon = None
    times, nodes = [], []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("initial:"):
                    labels = [s.strip() for s in body[len("initial:"):].split(",") if s.strip()]
                    for lab in labels:
                        if lab not in index:
                            raise ValueError(f"{path}:{lineno}: unknown node {lab!r}")
                        initial.append(index[lab])
                elif body.startswith("horizon:"):
                    horizon = float(body[len("horizon:"):])
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected time,node_label")
            if parts[1] not in index:
                raise ValueError(f"{path}:{lineno}: unknown node {parts[1]!r}")
            times.append(float(parts[0]))
            nodes.append(index[parts[1]])
    times = np.array(times)
    if np.any(np.diff(times) < 0):
        raise ValueError("event times must be sorted ascending")
    ties = np.nonzero(np.diff(times) == 0)[0]
    if ties.size:
        warnings.warn("perturbing tied event times by 1e-9 per rank")
        for k in range(1, len(times)):
            if times[k] <= times[k - 1]:
                times[k] = times[k - 1] + 1e-9
    if horizon is None:
        horizon = float(times[-1]) if times.size else 0.0
    return EventLog(times=times, nodes=np.array(nodes, dtype=np.int64),
                    initial_infected=np.array(initial, dtype=np.int64),
                    horizon=horizon)


def write_event_log(log: EventLog, g: Graph, path):
    lines = [
        "# initial: " + ",".join(g.label_of(int(v)) for v in log.initial_infected),
        f"# horizon: {_fmt(log.horizon)}",
    ]
    for t, v in zip(log.times, log.nodes):
        lines.append(f"{_fmt(t)},{g.label_of(int(v))}")
    atomic_write(path, "\n".join(lines) + "\n")


def centrality_covariates(g: Graph) -> CovariateSet:
    """The standard covariate triple: normalized degree, betweenness,
    and clustering, each divided by its network maximum."""
    cols = [
        normalize_by_max(degree_centrality(g)).values,
        normalize_by_max(betweenness_centrality(g)).values,
        normalize_by_max(clustering_centrality(g)).values,
    ]
    return CovariateSet(node=np.column_stack(cols))


def read_covariates(path, g: Graph) -> CovariateSet:
    """CSV `node_label,deg_c,btw_c,clust`; one row per node."""
    index = {g.label_of(v): v for v in range(g.n)}
    node = np.full((g.n, 3), np.nan)
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected node_label,deg_c,btw_c,clust")
            if parts[0] not in index:
                raise ValueError(f"{path}:{lineno}: unknown node {parts[0]!r}")
            node[index[parts[0]]] = [float(x) for x in parts[1:]]
    missing = [g.label_of(v) for v in range(g.n) if np.isnan(node[v]).any()]
    if missing:
        raise ValueError(f"missing covariates for node {missing[0]!r}")
    return CovariateSet(node=node)


def write_covariates(cov: CovariateSet, g: Graph, path):
    lines = []
    for v in range(g.n):
        vals = ",".join(repr(float(x)) for x in cov.node[v])
        lines.append(f"{g.label_of(v)},{vals}")
    atomic_write(path, "\n".join(lines) + "\n")


def read_edge_covariates(path, g: Graph) -> np.ndarray:
    """CSV `source,target,value` aligned to the graph's edge list.

    Edges without a row default to 0; rows naming non-edges are errors.
    """
    index = {g.label_of(v): v for v in range(g.n)}
    eid = {e: i for i, e in enumerate(g.edge_list())}
    out = np.zeros((g.edge_count, 1))
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected source,target,value")
            try:
                u, v = index[parts[0]], index[parts[1]]
            except KeyError as e:
                raise ValueError(f"{path}:{lineno}: unknown node {e.args[0]!r}")
            key = (u, v) if u < v else (v, u)
            if key not in eid:
                raise ValueError(f"{path}:{lineno}: {parts[0]},{parts[1]} is not an edge")
            out[eid[key], 0] = float(parts[2])
    return out


# -- priors -----------------------------------------------------------------


def read_priors(path, names) -> PriorSpec:
    """Prior config: one `name uniform lo hi` or `name exp rate` per line.

    Every model parameter in `names` must be covered exactly once.
    """
    found = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 3:
                raise ValueError(f"{path}:{lineno}: expected `name dist args`")
            name, dist = parts[0], parts[1].lower()
            if name in found:
                raise ValueError(f"{path}:{lineno}: duplicate prior for {name!r}")
            if dist in ("uniform", "u"):
                if len(parts) != 4:
                    raise ValueError(f"{path}:{lineno}: uniform needs lo hi")
                found[name] = Uniform(float(parts[2]), float(parts[3]))
            elif dist in ("exp", "exponential"):
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: exponential needs a rate")
                found[name] = Exponential(float(parts[2]))
            else:
                raise ValueError(f"{path}:{lineno}: unknown distribution {dist!r}")
    missing = [n for n in names if n not in found]
    if missing:
        raise ValueError(f"no prior given for {missing[0]!r}")
    extra = [n for n in found if n not in names]
    if extra:
        raise ValueError(f"prior for unknown parameter {extra[0]!r}")
    return PriorSpec([found[n] for n in names], names=list(names))


# -- tabular output ----------------------------------------------------------


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    atomic_write(path, "\n".join(lines) + "\n")


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_json(path, payload):
    atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_sample_csv(path) -> np.ndarray:
    """One numeric value per line (comments allowed): a test sample."""
    vals = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            vals.append(float(line.split(",")[0]))
    if not vals:
        raise ValueError(f"{path}: no values")
    return np.array(vals)
