"""Forward simulation of the invite-then-accept diffusion process.

The two-stage process (u invites v with probability P_uv, v accepts with
probability U_v) is folded into a single Bernoulli trial per edge with
success probability S_uv = P_uv * U_v, which has the same activation
distribution. Each node, when first activated, attempts every out-edge
exactly once; the cascade ends when no new node activates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphTooLargeForEnumeration, UnknownSeed
from .graph import Graph


@dataclass(frozen=True)
class CascadeResult:
    """Outcome of one simulated cascade.

    ``reached`` includes the seeds. ``activation_edges`` is the forest of
    (u, v) edges along which activation actually happened: every non-seed
    reached node has exactly one incoming activation edge.
    """

    reached: frozenset
    activation_edges: tuple


def simulate_cascade(g: Graph, seeds, rng) -> CascadeResult:
    """Run one independent-cascade simulation from a seed set.

    ``rng`` is an integer seed or a ``numpy.random.Generator``. The frontier
    is processed in ascending node-id order and each activated node draws one
    uniform per out-edge (in adjacency order), so a fixed seed reproduces the
    exact same trajectory.
    """
    rng = np.random.default_rng(rng)
    seed_list = sorted(int(s) for s in seeds)
    for s in seed_list:
        if not 0 <= s < g.n:
            raise UnknownSeed(f"seed {s} is not a node of the graph")

    reached = set(seed_list)
    edges: list[tuple[int, int]] = []
    frontier = seed_list
    while frontier:
        nxt: list[int] = []
        for u in frontier:
            dst, s = g.spread_out(u)
            if len(dst) == 0:
                continue
            draws = rng.random(len(dst))
            for j in range(len(dst)):
                v = int(dst[j])
                if draws[j] < s[j] and v not in reached:
                    reached.add(v)
                    nxt.append(v)
                    edges.append((u, v))
        frontier = sorted(nxt)
    return CascadeResult(frozenset(reached), tuple(edges))


def _reachable_subgraph(g: Graph, u: int):
    """Nodes reachable from u (ignoring probabilities) and the edges among
    them; only those edges can affect u's spread."""
    seen = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        dst, _ = g.out_edges(x)
        for v in dst:
            v = int(v)
            if v not in seen:
                seen.add(v)
                stack.append(v)
    nodes = sorted(seen)
    local = {v: i for i, v in enumerate(nodes)}
    edges = []
    for x in nodes:
        dst, p = g.out_edges(x)
        for j in range(len(dst)):
            edges.append((local[x], local[int(dst[j])], float(p[j] * g.accept[dst[j]])))
    return nodes, local, edges


def exact_influence(g: Graph, u: int, limit: int = 20) -> float:
    """Expected number of users influenced by u, excluding u itself.

    Enumerates every live-edge world of the subgraph reachable from u (each
    edge independently live with probability S_uv) and averages the reach
    size minus one. Edges that u cannot reach are marginalized out, so only
    the reachable edge count is held to ``limit``.
    """
    g._check_node(int(u))
    nodes, local, edges = _reachable_subgraph(g, int(u))
    me = len(edges)
    if me > limit:
        raise GraphTooLargeForEnumeration(
            f"{me} edges reachable from node {u} exceeds enumeration limit {limit}"
        )
    if me == 0:
        return 0.0

    k = len(nodes)
    root = local[int(u)]
    s = np.array([e[2] for e in edges])
    total = 0.0
    for mask in range(1 << me):
        prob = 1.0
        adj: list[list[int]] = [[] for _ in range(k)]
        for e in range(me):
            if mask >> e & 1:
                prob *= s[e]
                adj[edges[e][0]].append(edges[e][1])
            else:
                prob *= 1.0 - s[e]
        if prob == 0.0:
            continue
        seen = 1
        visited = [False] * k
        visited[root] = True
        stack = [root]
        while stack:
            x = stack.pop()
            for v in adj[x]:
                if not visited[v]:
                    visited[v] = True
                    seen += 1
                    stack.append(v)
        total += prob * (seen - 1)
    return float(total)


def mc_influence(
    g: Graph, u: int, runs: int, rng, chunk: int = 8192
) -> tuple[float, float]:
    """Monte-Carlo estimate of u's influence with its standard error.

    Samples live-edge worlds of the subgraph reachable from u in vectorized
    batches (distributionally identical to repeated ``simulate_cascade``
    calls) and averages reach size minus one.
    """
    g._check_node(int(u))
    if runs < 1:
        raise ValueError("runs must be >= 1")
    rng = np.random.default_rng(rng)

    nodes, local, edges = _reachable_subgraph(g, int(u))
    k = len(nodes)
    root = local[int(u)]
    me = len(edges)
    if me == 0:
        return 0.0, 0.0

    ea = np.array([e[0] for e in edges])
    eb = np.array([e[1] for e in edges])
    es = np.array([e[2] for e in edges])

    counts = np.empty(runs, dtype=np.int64)
    done = 0
    while done < runs:
        c = min(chunk, runs - done)
        live = rng.random((c, me)) < es
        reached = np.zeros((c, k), dtype=bool)
        reached[:, root] = True
        changed = True
        while changed:
            changed = False
            for e in range(me):
                upd = live[:, e] & reached[:, ea[e]] & ~reached[:, eb[e]]
                if upd.any():
                    reached[upd, eb[e]] = True
                    changed = True
        counts[done : done + c] = reached.sum(axis=1)
        done += c

    infl = counts - 1
    est = float(infl.mean())
    se = float(infl.std(ddof=1) / np.sqrt(runs)) if runs > 1 else 0.0
    return est, se
