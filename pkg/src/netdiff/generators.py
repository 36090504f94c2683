"""Random-graph constructors: Erdos-Renyi, geometric, Delaunay, and SBM.

The ER/GRG/DT trio is calibrated so 300-node instances land near 900
edges (p=0.02, r=0.08, and the planar bound respectively), which keeps
density comparable and isolates topology effects. All generators are
pure functions of (parameters, seed).
"""

from __future__ import annotations

import numpy as np

from netdiff import rng as _rng
from netdiff.graph import Graph


def _pair_index(n: int):
    """Upper-triangle pair arrays (u, v) with u < v."""
    iu = np.triu_indices(n, k=1)
    return iu[0], iu[1]


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p): each unordered pair is an edge independently with prob p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    gen = _rng.generator(seed)
    u, v = _pair_index(n)
    keep = gen.random(len(u)) < p
    edges = list(zip(u[keep].tolist(), v[keep].tolist()))
    return Graph(n, edges)


def geometric_random(n: int, r: float, seed: int) -> Graph:
    """Points uniform on the unit square; edge iff distance <= r.

    Coordinates are retained on the graph so the edge set can be
    recomputed from them exactly.
    """
    if r < 0:
        raise ValueError("radius must be non-negative")
    gen = _rng.generator(seed)
    pts = gen.random((n, 2))
    u, v = _pair_index(n)
    d2 = ((pts[u] - pts[v]) ** 2).sum(axis=1)
    keep = d2 <= r * r
    edges = list(zip(u[keep].tolist(), v[keep].tolist()))
    return Graph(n, edges, coords=pts)


def stochastic_block_model(block_sizes, P, seed: int) -> Graph:
    """SBM with symmetric block probability matrix P; block labels stored."""
    P = np.asarray(P, dtype=float)
    k = len(block_sizes)
    if P.shape != (k, k):
        raise ValueError("probability matrix must be k x k for k blocks")
    if not np.allclose(P, P.T):
        raise ValueError("probability matrix must be symmetric")
    if np.any(P < 0) or np.any(P > 1):
        raise ValueError("probabilities must lie in [0, 1]")
    n = int(sum(block_sizes))
    blocks = np.repeat(np.arange(k), block_sizes)
    gen = _rng.generator(seed)
    u, v = _pair_index(n)
    probs = P[blocks[u], blocks[v]]
    keep = gen.random(len(u)) < probs
    edges = list(zip(u[keep].tolist(), v[keep].tolist()))
    return Graph(n, edges, blocks=blocks)


# -- Delaunay triangulation (Bowyer-Watson) --------------------------------


def _splitmix64(x: np.ndarray) -> np.ndarray:
    """Cheap deterministic 64-bit mix for coordinate perturbation."""
    x = (x + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    x = ((x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    x = ((x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    return x ^ (x >> np.uint64(31))


def _perturb(points: np.ndarray) -> np.ndarray:
    """Break cocircular/collinear ties with a hash-based 1e-12 jitter."""
    idx = np.arange(points.shape[0], dtype=np.uint64)
    hx = _splitmix64(idx * np.uint64(2) + np.uint64(1))
    hy = _splitmix64(idx * np.uint64(2) + np.uint64(2))
    scale = np.float64(1e-12)
    jitter = np.stack([hx, hy], axis=1).astype(np.float64) / np.float64(2**64) - 0.5
    return points + jitter * scale


def _orient_exact(a, b, c) -> int:
    from fractions import Fraction as F

    det = ((F(float(b[0])) - F(float(a[0]))) * (F(float(c[1])) - F(float(a[1])))
           - (F(float(b[1])) - F(float(a[1]))) * (F(float(c[0])) - F(float(a[0]))))
    return (det > 0) - (det < 0)


def _orient(a, b, c) -> int:
    det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    mag = abs((b[0] - a[0]) * (c[1] - a[1])) + abs((b[1] - a[1]) * (c[0] - a[0]))
    if abs(det) > 1e-12 * mag:
        return 1 if det > 0 else -1
    return _orient_exact(a, b, c)


def _ccw(a, b, c) -> bool:
    return _orient(a, b, c) > 0


def _incircle_exact(a, b, c, p) -> int:
    from fractions import Fraction as F

    ax, ay = F(float(a[0])) - F(float(p[0])), F(float(a[1])) - F(float(p[1]))
    bx, by = F(float(b[0])) - F(float(p[0])), F(float(b[1])) - F(float(p[1]))
    cx, cy = F(float(c[0])) - F(float(p[0])), F(float(c[1])) - F(float(p[1]))
    det = ((ax * ax + ay * ay) * (bx * cy - cx * by)
           - (bx * bx + by * by) * (ax * cy - cx * ay)
           + (cx * cx + cy * cy) * (ax * by - bx * ay))
    return (det > 0) - (det < 0)


# Super-triangle vertices live at infinity in three fixed directions, so
# no finite placement can interfere with hull triangles. Incircle tests
# against them reduce to half-plane tests; the half-plane normals below
# are exact solutions of u_i . w = -|u_i|^2 for the direction pairs.
_INF_DIR = {0: (0.0, 1.0), 1: (-1.0, -1.0), 2: (1.0, -1.0)}
_INF_PAIR_W = {
    frozenset((0, 1)): (3.0, -1.0),
    frozenset((1, 2)): (0.0, 2.0),
    frozenset((2, 0)): (-3.0, -1.0),
}


def _half_plane_sign(w, p, a) -> int:
    from fractions import Fraction as F

    val = w[0] * (p[0] - a[0]) + w[1] * (p[1] - a[1])
    mag = abs(w[0] * (p[0] - a[0])) + abs(w[1] * (p[1] - a[1]))
    if abs(val) > 1e-12 * mag:
        return 1 if val > 0 else -1
    ex = (F(w[0]) * (F(float(p[0])) - F(float(a[0])))
          + F(w[1]) * (F(float(p[1])) - F(float(a[1]))))
    return (ex > 0) - (ex < 0)


def delaunay_triangulation(points: np.ndarray):
    """Bowyer-Watson incremental triangulation.

    Returns (triangles, edges): triangle index triples of the final
    triangulation and its unique undirected edge set, with the
    super-triangle (handled symbolically at infinity) removed at the
    end. Points are perturbed deterministically so degenerate
    quadruples cannot occur; all geometric predicates carry an exact
    rational fallback, making the output the exact Delaunay
    triangulation of the perturbed points.
    """
    pts = _perturb(np.asarray(points, dtype=float))
    n = pts.shape[0]
    if n < 3:
        raise ValueError("need at least 3 points")
    s0, s1, s2 = n, n + 1, n + 2

    def inside_disk(tri, p) -> bool:
        inf = [v for v in tri if v >= n]
        if len(inf) == 0:
            raise AssertionError("finite triangles are tested vectorized")
        if len(inf) == 3:
            return True  # whole plane
        if len(inf) == 1:
            # CCW triangle (a, b, s): disk limit is the open half-plane
            # strictly left of a->b
            order = list(tri)
            while order[2] < n:
                order = [order[2], order[0], order[1]]
            a, b = pts[order[0]], pts[order[1]]
            return _orient(a, b, pts[p]) > 0
        # two infinite vertices: half-plane through the finite vertex
        a = pts[[v for v in tri if v < n][0]]
        w = _INF_PAIR_W[frozenset(v - n for v in inf)]
        return _half_plane_sign(w, pts[p], a) < 0

    # CCW by construction: cross products of consecutive _INF_DIR are positive
    inf_tris = [(s0, s1, s2)]
    fin_tris = np.empty((0, 3), dtype=np.int64)

    for p in range(n):
        px, py = pts[p]
        if fin_tris.shape[0]:
            a = pts[fin_tris[:, 0]]
            b = pts[fin_tris[:, 1]]
            cc = pts[fin_tris[:, 2]]
            # incircle determinant; > 0 means p strictly inside (CCW rows)
            ax, ay = a[:, 0] - px, a[:, 1] - py
            bx, by = b[:, 0] - px, b[:, 1] - py
            cx, cy = cc[:, 0] - px, cc[:, 1] - py
            lift_a = ax * ax + ay * ay
            lift_b = bx * bx + by * by
            lift_c = cx * cx + cy * cy
            det = (lift_a * (bx * cy - cx * by)
                   - lift_b * (ax * cy - cx * ay)
                   + lift_c * (ax * by - bx * ay))
            # error bound in the style of Shewchuk's predicates;
            # uncertain rows are re-evaluated exactly
            perm = (lift_a * (np.abs(bx * cy) + np.abs(cx * by))
                    + lift_b * (np.abs(ax * cy) + np.abs(cx * ay))
                    + lift_c * (np.abs(ax * by) + np.abs(bx * ay)))
            bad_fin = det > 0
            uncertain = np.abs(det) <= 4e-15 * perm
            for idx in np.nonzero(uncertain)[0]:
                t = fin_tris[idx]
                sign = _incircle_exact(pts[t[0]], pts[t[1]], pts[t[2]], pts[p])
                bad_fin[idx] = sign > 0
        else:
            bad_fin = np.zeros(0, dtype=bool)
        bad_inf = [t for t in inf_tris if inside_disk(t, p)]

        dying = [tuple(int(x) for x in t) for t in fin_tris[bad_fin]] + bad_inf
        # cavity boundary: directed edges whose reverse is not also dying.
        # Adjacent CCW triangles traverse a shared edge in opposite
        # directions, so interior edges cancel.
        directed = set()
        for t in dying:
            directed.update(((t[0], t[1]), (t[1], t[2]), (t[2], t[0])))
        new_fin = []
        new_inf = []
        for u, v in directed:
            if (v, u) in directed:
                continue
            # (u, v, p) inherits CCW: the cavity interior lay left of u->v
            if u >= n or v >= n:
                new_inf.append((u, v, p))
            else:
                new_fin.append((u, v, p))
        fin_tris = np.vstack([fin_tris[~bad_fin],
                              np.array(new_fin, dtype=np.int64).reshape(-1, 3)])
        bad_set = set(bad_inf)
        inf_tris = [t for t in inf_tris if t not in bad_set] + new_inf

    edges = set()
    for t in fin_tris:
        i, j, k = sorted(int(x) for x in t)
        edges.add((i, j))
        edges.add((j, k))
        edges.add((i, k))
    return fin_tris, sorted(edges)


def hull_size(triangles, edges) -> int:
    """Number of convex-hull vertices, from edges on exactly one triangle."""
    count = {e: 0 for e in edges}
    for t in triangles:
        i, j, k = sorted(int(x) for x in t)
        count[(i, j)] += 1
        count[(j, k)] += 1
        count[(i, k)] += 1
    hull_nodes = set()
    for (u, v), c in count.items():
        if c == 1:
            hull_nodes.add(u)
            hull_nodes.add(v)
    return len(hull_nodes)


def delaunay(n: int, point_distribution: str = "normal", seed: int = 0) -> Graph:
    """Delaunay triangulation graph of n randomly placed points.

    point_distribution: "normal" (standard bivariate, the default) or
    "uniform" (unit square). Edge count satisfies |E| = 3n - 3 - h for
    hull size h.
    """
    if n < 3:
        raise ValueError("need at least 3 points")
    gen = _rng.generator(seed)
    if point_distribution == "normal":
        pts = gen.normal(size=(n, 2))
    elif point_distribution == "uniform":
        pts = gen.random((n, 2))
    else:
        raise ValueError(f"unknown point distribution {point_distribution!r}")
    _, edges = delaunay_triangulation(pts)
    return Graph(n, edges, coords=pts)
