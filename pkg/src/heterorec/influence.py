"""Per-node spread-influence estimators and structural baselines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffusion import mc_influence
from .errors import InvalidCapacity
from .graph import Graph


@dataclass(frozen=True)
class InfluenceScores:
    """Per-node influence values under a named method
    (heteroinf | degree | coreness | mc)."""

    method: str
    scores: np.ndarray


def hetero_inf(g: Graph, u: int, w: int = 4) -> float:
    """Capacity-limited influence estimate of node u.

    Keeps the ``w`` out-edges with the largest spread probabilities
    S_uv = P_uv * U_v (ties broken by ascending neighbor id) and returns
    their sum. With out-degree below ``w`` all out-edges are summed.
    """
    if w < 1:
        raise InvalidCapacity(f"interaction capability w must be >= 1, got {w}")
    g._check_node(int(u))
    dst, s = g.spread_out(int(u))
    if len(dst) == 0:
        return 0.0
    if len(dst) <= w:
        return float(s.sum())
    top = np.lexsort((dst, -s))[:w]
    return float(s[top].sum())


def hetero_inf_all(g: Graph, w: int = 4) -> np.ndarray:
    """hetero_inf evaluated for every node."""
    if w < 1:
        raise InvalidCapacity(f"interaction capability w must be >= 1, got {w}")
    out = np.zeros(g.n)
    for u in range(g.n):
        out[u] = hetero_inf(g, u, w)
    return out


def degree_influence(g: Graph, u: int) -> int:
    """Out-degree baseline."""
    g._check_node(int(u))
    return g.out_degree(int(u))


def coreness_influence(g: Graph) -> np.ndarray:
    """k-core numbers of the undirected projection (direction and weights
    ignored), computed by iterative minimum-degree peeling."""
    n = g.n
    adj: list[set[int]] = [set() for _ in range(n)]
    for u in range(n):
        dst, _ = g.out_edges(u)
        for v in dst:
            adj[u].add(int(v))
            adj[int(v)].add(u)

    deg = np.fromiter((len(a) for a in adj), dtype=np.int64, count=n)
    if n == 0:
        return deg
    core = deg.copy()

    # bucket sort by degree, then peel in place (swap-into-bucket trick)
    md = int(deg.max())
    bin_start = np.zeros(md + 2, dtype=np.int64)
    for d in deg:
        bin_start[d + 1] += 1
    np.cumsum(bin_start, out=bin_start)
    nxt = bin_start[:-1].copy()
    vert = np.empty(n, dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    for v in range(n):
        pos[v] = nxt[deg[v]]
        vert[pos[v]] = v
        nxt[deg[v]] += 1

    bins = bin_start[:-1].copy()
    for i in range(n):
        v = int(vert[i])
        for u in adj[v]:
            if core[u] > core[v]:
                du, pu = int(core[u]), int(pos[u])
                pw = int(bins[du])
                w = int(vert[pw])
                if u != w:
                    vert[pu], vert[pw] = w, u
                    pos[u], pos[w] = pw, pu
                bins[du] += 1
                core[u] -= 1
    return core


def heteroinf_scores(g: Graph, w: int = 4) -> InfluenceScores:
    return InfluenceScores("heteroinf", hetero_inf_all(g, w))


def degree_scores(g: Graph) -> InfluenceScores:
    return InfluenceScores("degree", g.out_degrees().astype(np.float64))


def coreness_scores(g: Graph) -> InfluenceScores:
    return InfluenceScores("coreness", coreness_influence(g).astype(np.float64))


def mc_scores(g: Graph, runs: int, seed: int) -> InfluenceScores:
    """Monte-Carlo influence for every node; node u uses the derived stream
    (seed, u) so values do not depend on evaluation order."""
    scores = np.zeros(g.n)
    for u in range(g.n):
        scores[u], _ = mc_influence(g, u, runs, np.random.default_rng([seed, u]))
    return InfluenceScores("mc", scores)


def save_scores(scores: InfluenceScores, g: Graph, path) -> None:
    """Write `node_id<TAB>score` rows (external ids, internal order)."""
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(g.n):
            fh.write(f"{int(g.external_ids[i])}\t{float(scores.scores[i])!r}\n")


def load_scores(path, method: str = "loaded") -> dict[int, float]:
    """Read a scores file as {external node id: score}."""
    out: dict[int, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            node, score = line.split("\t")
            out[int(node)] = float(score)
    return out
