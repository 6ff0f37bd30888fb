"""Offline evaluation of recommendation tables against a ground-truth event
log: secondary-spread coverage and ranking quality."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, log2

import numpy as np

from .errors import (
    InvalidParameters,
    MismatchedGraph,
    NoRelevantInviters,
    UniverseMismatch,
)
from .eventlog import EventLog
from .influence import InfluenceScores
from .recommend import RecommendationTable

EXACT_IDEAL_LIMIT = 10_000


@dataclass(frozen=True)
class SpreadResult:
    spread: int
    ispread: int
    nspread: float
    ideal_mode: str


def _coverage(v: int, desc: dict[int, set[int]]) -> set[int]:
    return {v} | desc.get(v, set())


def _best_subset(
    cands: list[int], k: int, desc: dict[int, set[int]], mode: str
) -> tuple[set[int], str]:
    """Choose up to k successfully-spread neighbors maximizing the inviter's
    deduplicated coverage. Exact enumeration while C(deg, k) stays small,
    greedy max-coverage beyond that."""
    if len(cands) <= k:
        union: set[int] = set()
        for v in cands:
            union |= _coverage(v, desc)
        return union, "exact"

    use = mode
    if mode == "auto":
        use = "exact" if comb(len(cands), k) <= EXACT_IDEAL_LIMIT else "greedy"

    if use == "exact":
        best: set[int] = set()
        for combo in combinations(cands, k):
            union = set()
            for v in combo:
                union |= _coverage(v, desc)
            if len(union) > len(best):
                best = union
        return best, "exact"

    chosen: set[int] = set()
    remaining = list(cands)
    for _ in range(k):
        gains = [(len(_coverage(v, desc) - chosen), -v) for v in remaining]
        g_best, neg_v = max(gains)
        v = -neg_v
        chosen |= _coverage(v, desc)
        remaining.remove(v)
    return chosen, "greedy"


def spread_eval(
    recs: RecommendationTable, log: EventLog, k: int, ideal: str = "auto"
) -> SpreadResult:
    """Achieved, ideal, and normalized deduplicated spread of top-k lists.

    A recommended candidate counts if the log shows its inviter successfully
    spread to it; the candidate and everything below it in the trajectory
    forest enter one global deduplicated pool. The ideal pool does the same
    with each inviter's best possible k successes; the normalized value is
    their ratio (zero when the ideal pool is empty).
    """
    if k < 1:
        raise InvalidParameters(f"k must be >= 1, got {k}")
    if ideal not in ("auto", "exact", "greedy"):
        raise InvalidParameters(f"ideal must be auto|exact|greedy, got {ideal!r}")
    succ = log.successful_edges()
    desc = log.descendants()
    universe = log.node_universe()

    spread_nodes: set[int] = set()
    stray = 0
    for u in recs.inviters:
        for v in recs.top(u, k):
            if v not in universe:
                stray += 1
            if (u, v) in succ:
                spread_nodes |= _coverage(v, desc)
    if stray:
        warnings.warn(
            f"{stray} recommended ids absent from the event log; treated as non-spreading",
            MismatchedGraph,
            stacklevel=2,
        )

    ideal_nodes: set[int] = set()
    modes: set[str] = set()
    for u in recs.inviters:
        cands = sorted(v for (a, v) in succ if a == u)
        if not cands:
            continue
        chosen, used = _best_subset(cands, k, desc, ideal)
        ideal_nodes |= chosen
        modes.add(used)

    spread = len(spread_nodes)
    ispread = len(ideal_nodes)
    nspread = spread / ispread if ispread else 0.0
    mode = "greedy" if "greedy" in modes else "exact"
    return SpreadResult(spread=spread, ispread=ispread, nspread=nspread, ideal_mode=mode)


def _relevants(recs: RecommendationTable, log: EventLog) -> dict[int, set[int]]:
    succ = log.successful_edges()
    rel: dict[int, set[int]] = {}
    for u in recs.inviters:
        r = {v for (a, v) in succ if a == u}
        if r:
            rel[u] = r
    return rel


def recall_at_k(recs: RecommendationTable, log: EventLog, k: int) -> float:
    """Mean, over inviters with at least one relevant candidate, of the
    fraction of their relevants found in the top k. Relevance is an
    invited-and-accepted pair in the log."""
    if k < 1:
        raise InvalidParameters(f"k must be >= 1, got {k}")
    rel = _relevants(recs, log)
    if not rel:
        warnings.warn("no inviter has a relevant candidate; recall is 0",
                      NoRelevantInviters, stacklevel=2)
        return 0.0
    vals = [len(r & set(recs.top(u, k))) / len(r) for u, r in rel.items()]
    return float(np.mean(vals))


def ndcg_at_k(recs: RecommendationTable, log: EventLog, k: int) -> float:
    """Binary-gain NDCG: DCG sums 1/log2(rank+1) at relevant ranks, the ideal
    packs min(k, #relevant) relevants up front; mean over inviters with at
    least one relevant."""
    if k < 1:
        raise InvalidParameters(f"k must be >= 1, got {k}")
    rel = _relevants(recs, log)
    if not rel:
        warnings.warn("no inviter has a relevant candidate; ndcg is 0",
                      NoRelevantInviters, stacklevel=2)
        return 0.0
    vals = []
    for u, r in rel.items():
        top = recs.top(u, k)
        dcg = sum(1.0 / log2(i + 2) for i, v in enumerate(top) if v in r)
        idcg = sum(1.0 / log2(i + 2) for i in range(min(k, len(r))))
        vals.append(dcg / idcg)
    return float(np.mean(vals))


def _top_k_ids(scores: InfluenceScores, k: int) -> set[int]:
    s = scores.scores
    order = np.lexsort((np.arange(len(s)), -s))[:k]
    return set(int(i) for i in order)


def hit_at_k(predicted: InfluenceScores, true: InfluenceScores, k: int) -> float:
    """Fraction of the predicted top-k inside the true top-k; ties in either
    ranking break toward smaller node ids."""
    if len(predicted.scores) != len(true.scores):
        raise UniverseMismatch(
            f"score universes differ: {len(predicted.scores)} vs {len(true.scores)} nodes"
        )
    if not 1 <= k <= len(true.scores):
        raise InvalidParameters(f"k must lie in [1, {len(true.scores)}], got {k}")
    return len(_top_k_ids(predicted, k) & _top_k_ids(true, k)) / k


@dataclass
class EvalReport:
    """Metric values keyed by method and K, plus the ideal-spread mode used."""

    rec: dict = field(default_factory=dict)
    hit: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add_recommendation_eval(
        self, recs: RecommendationTable, log: EventLog, ks, ideal: str = "auto",
        method: str | None = None,
    ) -> None:
        name = method or recs.method
        per_k = self.rec.setdefault(name, {})
        for k in ks:
            sr = spread_eval(recs, log, k, ideal=ideal)
            per_k[k] = {
                "spread": sr.spread,
                "ispread": sr.ispread,
                "nspread": sr.nspread,
                "recall": recall_at_k(recs, log, k),
                "ndcg": ndcg_at_k(recs, log, k),
            }
            self.meta[f"ispread_mode/{name}/{k}"] = sr.ideal_mode

    def add_hit_eval(
        self, predicted: InfluenceScores, true: InfluenceScores, ks,
        method: str | None = None,
    ) -> None:
        name = method or predicted.method
        per_k = self.hit.setdefault(name, {})
        for k in ks:
            per_k[k] = hit_at_k(predicted, true, k)

    def to_text(self) -> str:
        """One `method<TAB>metric<TAB>K<TAB>value` line per measurement."""
        lines = []
        for method in sorted(self.rec):
            for k in sorted(self.rec[method]):
                for metric in ("spread", "ispread", "nspread", "recall", "ndcg"):
                    lines.append(f"{method}\t{metric}\t{k}\t{self.rec[method][k][metric]!r}")
        for method in sorted(self.hit):
            for k in sorted(self.hit[method]):
                lines.append(f"{method}\thit\t{k}\t{self.hit[method][k]!r}")
        return "".join(line + "\n" for line in lines)

    def to_json(self) -> str:
        return json.dumps(
            {"recommendation": self.rec, "hit": self.hit, "meta": self.meta},
            indent=2,
            sort_keys=True,
        )

    def save(self, path, json_path=None) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())
        if json_path is not None:
            with open(json_path, "w", encoding="utf-8") as fh:
                fh.write(self.to_json())
