"""Per-inviter top-k recommendation: profit ranking, RR-set greedy coverage
with shared-set rerank, and a personalized-PageRank baseline."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInviterSet, InvalidCapacity, InvalidParameters, UnknownNode
from .graph import Graph, derive_candidates
from .influence import hetero_inf_all
from .rrset import RRSetCollection


@dataclass
class RecommendationTable:
    """Ordered candidate lists per inviter.

    Each list entry is (candidate id, score tuple). Lists are at most k long,
    never repeat a candidate, never contain the inviter itself, and only hold
    the inviter's out-neighbors. ``selection`` records the greedy pick order
    when the table came from the coverage recommender.
    """

    method: str
    k: int
    lists: dict[int, list[tuple[int, tuple]]]
    selection: tuple = ()

    @property
    def inviters(self) -> list[int]:
        return sorted(self.lists)

    def top(self, u: int, k: int | None = None) -> list[int]:
        k = self.k if k is None else k
        return [c for c, _ in self.lists[u][:k]]


def _validated_inviters(g: Graph, inviters) -> list[int]:
    members = sorted({int(u) for u in inviters})
    if not members:
        raise EmptyInviterSet("inviter set is empty")
    for u in members:
        g._check_node(u)
    return members


def hetero_ir(
    g: Graph,
    inviters,
    k: int,
    w: int = 4,
    *,
    no_first: bool = False,
    no_second: bool = False,
) -> RecommendationTable:
    """Rank each inviter's out-neighbors by recommendation profit.

    The profit of candidate v for inviter u is
    beta_uv = P_uv*U_v + P_uv*U_v*I_H(v): the direct interaction term plus
    the second-order term weighted by v's capacity-limited influence.
    ``no_first`` drops the direct term, ``no_second`` drops the influence
    term (scores reduce to P_uv*U_v). Ties break toward smaller node ids.
    """
    if k < 1:
        raise InvalidParameters(f"k must be >= 1, got {k}")
    if no_first and no_second:
        raise InvalidParameters("cannot drop both score terms")
    members = _validated_inviters(g, inviters)
    ih = None if no_second else hetero_inf_all(g, w)

    method = "heteroir"
    if no_first:
        method += "-no1st"
    if no_second:
        method += "-no2nd"

    lists: dict[int, list[tuple[int, tuple]]] = {}
    for u in members:
        dst, s = g.spread_out(u)
        if len(dst) == 0:
            lists[u] = []
            continue
        if no_second:
            beta = s.copy()
        elif no_first:
            beta = s * ih[dst]
        else:
            beta = s * (1.0 + ih[dst])
        order = np.lexsort((dst, -beta))[:k]
        lists[u] = [(int(dst[i]), (float(beta[i]),)) for i in order]
    return RecommendationTable(method=method, k=k, lists=lists)


def hetero_im(
    g: Graph,
    inviters,
    candidates,
    collection: RRSetCollection,
    k: int,
    *,
    rerank: bool = True,
) -> RecommendationTable:
    """Greedy coverage recommendation over a sampled RR-set collection.

    Repeatedly selects the candidate covering the most alive sets, appends it
    to the list of every inviter that links to it (scored with the shared-set
    count between the pair and the candidate's coverage, both taken over the
    alive sets at selection time), then retires the covered sets so later
    picks favor candidates reaching different parts of the graph. Every
    candidate is eventually placed; once the collection is exhausted picks
    fall back to the tie-break order.

    With ``rerank`` each final list is ordered by shared-set count, then
    coverage; without it (the pure max-coverage variant) by coverage, then
    shared-set count. Coverage ties during selection go to the candidate with
    the larger incoming spread-probability mass, then the smaller id.
    """
    if k < 1:
        raise InvalidParameters(f"k must be >= 1, got {k}")
    members = _validated_inviters(g, inviters)
    inviter_set = set(members)
    if candidates is None:
        candidates = derive_candidates(g, members)
    cand = np.array(sorted({int(c) for c in candidates}), dtype=np.int64)
    for c in cand:
        g._check_node(int(c))

    lists: dict[int, list[tuple[int, tuple]]] = {u: [] for u in members}
    if len(cand) == 0:
        return RecommendationTable(method="heteroim" if rerank else "heteroim-norerank",
                                   k=k, lists=lists)

    cov = np.zeros(g.n, dtype=np.int64)
    for u in cand:
        cov[u] = len(collection.sets_containing(int(u)))
    in_mass = g.in_spread_sums()

    alive_mask = np.ones(len(cand), dtype=bool)
    selection: list[int] = []
    for _ in range(len(cand)):
        idx = np.flatnonzero(alive_mask)
        c_vals = cov[cand[idx]]
        best = c_vals.max()
        tied = idx[c_vals == best]
        if len(tied) > 1:
            mass = in_mass[cand[tied]]
            tied = tied[mass == mass.max()]
        pick = int(tied[0])  # cand is sorted ascending, so first = smallest id
        u = int(cand[pick])
        alive_mask[pick] = False
        selection.append(u)

        c_u = int(cov[u])
        src, _ = g.in_edges(u)
        for v in src:
            v = int(v)
            if v in inviter_set and v != u:
                rho = collection.shared_rr_count(u, v, over="alive")
                lists[v].append((u, (rho, c_u)))

        removed = collection.sets_containing(u)
        for sid in removed:
            np.subtract.at(cov, collection.set_members(int(sid)), 1)
        collection.deactivate(removed)

    for v in members:
        if rerank:
            lists[v].sort(key=lambda e: (-e[1][0], -e[1][1]))
        else:
            lists[v].sort(key=lambda e: (-e[1][1], -e[1][0]))
        lists[v][:] = lists[v][:k]

    return RecommendationTable(
        method="heteroim" if rerank else "heteroim-norerank",
        k=k,
        lists=lists,
        selection=tuple(selection),
    )


def ppr_scores(
    g: Graph, u: int, damping: float = 0.15, tol: float = 1e-10, max_iter: int = 10_000
) -> np.ndarray:
    """Personalized PageRank with restart at u.

    ``damping`` is the restart weight: each step keeps that much mass at u
    and walks the rest along out-edges with probability proportional to
    S_uv (uniform over out-neighbors when a node's S values are all zero);
    mass at dangling nodes returns to u. Iterates until the L1 change drops
    below ``tol``.
    """
    if not 0.0 < damping < 1.0:
        raise InvalidParameters(f"damping must lie in (0, 1), got {damping}")
    u = int(u)
    if not 0 <= u < g.n:
        raise UnknownNode(f"node {u} outside [0, {g.n})")

    n = g.n
    w = np.zeros(g.m)
    dangling = np.zeros(n, dtype=bool)
    for x in range(n):
        lo, hi = g.out_ptr[x], g.out_ptr[x + 1]
        if lo == hi:
            dangling[x] = True
            continue
        s = g.out_p[lo:hi] * g.accept[g.out_dst[lo:hi]]
        total = s.sum()
        if total > 0:
            w[lo:hi] = s / total
        else:
            w[lo:hi] = 1.0 / (hi - lo)

    src_rep = np.repeat(np.arange(n), np.diff(g.out_ptr))
    x = np.zeros(n)
    x[u] = 1.0
    for _ in range(max_iter):
        nxt = np.zeros(n)
        np.add.at(nxt, g.out_dst, w * x[src_rep])
        loss = x[dangling].sum()
        nxt *= 1.0 - damping
        nxt[u] += damping + (1.0 - damping) * loss
        if np.abs(nxt - x).sum() < tol:
            x = nxt
            break
        x = nxt
    return x


def ppr_recommend(
    g: Graph, u: int, k: int, damping: float = 0.15, tol: float = 1e-10
) -> list[tuple[int, float]]:
    """Top-k out-neighbors of u by personalized-PageRank score."""
    if k < 1:
        raise InvalidParameters(f"k must be >= 1, got {k}")
    scores = ppr_scores(g, u, damping=damping, tol=tol)
    dst, _ = g.out_edges(int(u))
    if len(dst) == 0:
        return []
    vals = scores[dst]
    order = np.lexsort((dst, -vals))[:k]
    return [(int(dst[i]), float(vals[i])) for i in order]


def ppr_table(
    g: Graph, inviters, k: int, damping: float = 0.15, tol: float = 1e-10
) -> RecommendationTable:
    members = _validated_inviters(g, inviters)
    lists = {
        u: [(c, (s,)) for c, s in ppr_recommend(g, u, k, damping=damping, tol=tol)]
        for u in members
    }
    return RecommendationTable(method="ppr", k=k, lists=lists)


def save_recommendations(table: RecommendationTable, path, g: Graph | None = None) -> None:
    """Write `inviter<TAB>rank<TAB>candidate<TAB>score1<TAB>score2` rows,
    1-based ranks, external ids when a graph is given. score2 stays empty for
    single-score methods."""

    def ext(i: int) -> int:
        return int(g.external_ids[i]) if g is not None else i

    def fmt(x) -> str:
        return repr(int(x)) if isinstance(x, (int, np.integer)) else repr(float(x))

    with open(path, "w", encoding="utf-8") as fh:
        for u in table.inviters:
            for rank, (c, scores) in enumerate(table.lists[u], 1):
                s1 = fmt(scores[0]) if len(scores) > 0 else ""
                s2 = fmt(scores[1]) if len(scores) > 1 else ""
                fh.write(f"{ext(u)}\t{rank}\t{ext(c)}\t{s1}\t{s2}\n")


def load_recommendations(path, method: str = "loaded", k: int | None = None) -> RecommendationTable:
    """Read a recommendations file; ids are kept as written."""
    lists: dict[int, list[tuple[int, tuple]]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise InvalidParameters(f"recs:{lineno}: expected 5 columns, got {len(parts)}")
            u, rank, c = int(parts[0]), int(parts[1]), int(parts[2])
            scores = tuple(float(s) for s in (parts[3], parts[4]) if s != "")
            lists.setdefault(u, [])
            if rank != len(lists[u]) + 1:
                raise InvalidParameters(f"recs:{lineno}: rank {rank} out of sequence")
            lists[u].append((c, scores))
    if k is None:
        k = max((len(v) for v in lists.values()), default=1) or 1
    return RecommendationTable(method=method, k=k, lists=lists)
