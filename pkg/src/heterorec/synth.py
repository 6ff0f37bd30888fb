"""Reproducible synthetic graphs and ground-truth event logs.

Defaults keep the mean per-edge spread probability around 0.05 (invite
probabilities Beta(1, 3), accept probabilities Beta(1, 4)), echoing how
sparse realized spread is relative to friend counts. Everything is fully
determined by the configured seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InfeasibleConfig
from .eventlog import EventLog
from .graph import Graph, build_graph


@dataclass(frozen=True)
class SynthConfig:
    n: int
    target_m: int
    out_degree_model: str = "uniform"
    powerlaw_exponent: float = 2.5
    invite_alpha: float = 1.0
    invite_beta: float = 3.0
    accept_alpha: float = 1.0
    accept_beta: float = 4.0
    invite_cap: int = 4
    seed: int = 0
    event_seeds: Sequence[int] | None = None  # None = every node starts active

    def __post_init__(self):
        if self.n < 1:
            raise InfeasibleConfig(f"n must be >= 1, got {self.n}")
        if not 0 <= self.target_m <= self.n * (self.n - 1):
            raise InfeasibleConfig(
                f"target_m = {self.target_m} infeasible for n = {self.n}"
            )
        for name in ("invite_alpha", "invite_beta", "accept_alpha", "accept_beta"):
            if getattr(self, name) <= 0:
                raise InfeasibleConfig(f"{name} must be positive")
        if self.invite_cap < 1:
            raise InfeasibleConfig(f"invite_cap must be >= 1, got {self.invite_cap}")
        if self.out_degree_model not in ("uniform", "powerlaw"):
            raise InfeasibleConfig(
                f"out_degree_model must be uniform or powerlaw, got {self.out_degree_model!r}"
            )
        if self.out_degree_model == "powerlaw" and self.powerlaw_exponent <= 1.0:
            raise InfeasibleConfig("powerlaw_exponent must exceed 1")


def _decode_pair(code: int, n: int) -> tuple[int, int]:
    u, off = divmod(code, n - 1)
    v = off if off < u else off + 1
    return u, v


def _uniform_edges(cfg: SynthConfig, rng: np.random.Generator) -> list[tuple[int, int]]:
    total = cfg.n * (cfg.n - 1)
    chosen: set[int] = set()
    while len(chosen) < cfg.target_m:
        need = cfg.target_m - len(chosen)
        draw = rng.integers(0, total, size=max(16, int(need * 1.3)))
        for code in draw:
            if len(chosen) == cfg.target_m:
                break
            chosen.add(int(code))
    return [_decode_pair(c, cfg.n) for c in sorted(chosen)]


def _powerlaw_edges(cfg: SynthConfig, rng: np.random.Generator) -> list[tuple[int, int]]:
    raw = rng.pareto(cfg.powerlaw_exponent - 1.0, cfg.n) + 1.0
    deg = raw / raw.sum() * cfg.target_m
    deg = np.minimum(np.floor(deg).astype(np.int64), cfg.n - 1)
    # top up by largest fractional part until the target is met or all full
    frac_order = np.argsort(-(raw / raw.sum() * cfg.target_m - deg))
    i = 0
    while deg.sum() < cfg.target_m and i < 4 * cfg.n:
        u = int(frac_order[i % cfg.n])
        if deg[u] < cfg.n - 1:
            deg[u] += 1
        i += 1
    edges: list[tuple[int, int]] = []
    for u in range(cfg.n):
        if deg[u] == 0:
            continue
        targets = rng.choice(cfg.n - 1, size=int(deg[u]), replace=False)
        for t in targets:
            v = int(t) if t < u else int(t) + 1
            edges.append((u, v))
    return edges


def generate_graph(cfg: SynthConfig) -> Graph:
    """Directed simple graph with ~target_m edges; invite and accept
    probabilities drawn from the configured Beta models."""
    rng = np.random.default_rng(cfg.seed)
    if cfg.out_degree_model == "uniform":
        pairs = _uniform_edges(cfg, rng)
    else:
        pairs = _powerlaw_edges(cfg, rng)
    pairs.sort()
    accept = rng.beta(cfg.accept_alpha, cfg.accept_beta, cfg.n)
    invite = rng.beta(cfg.invite_alpha, cfg.invite_beta, len(pairs))
    edges = [(u, v, float(p)) for (u, v), p in zip(pairs, invite)]
    return build_graph(accept, edges)


def generate_event_log(g: Graph, cfg: SynthConfig, seed: int) -> EventLog:
    """Simulate one invitation event.

    Active nodes are processed in cascade rounds (ascending id inside a
    round), each exactly once: out-neighbors are drawn with Bernoulli(P_uv),
    the drawn set is cut to ``invite_cap`` keeping the highest invite
    probabilities, and each surviving invitee accepts with Bernoulli(U_v).
    Drawn-but-capped candidates are logged with invited = 0. Accepting nodes
    activate and invite in the next round.
    """
    rng = np.random.default_rng(seed)
    if cfg.event_seeds is None:
        active = set(range(g.n))
    else:
        active = {int(s) for s in cfg.event_seeds}
        for s in active:
            g._check_node(s)

    rows: list[tuple[int, int, int, int]] = []
    frontier = sorted(active)
    while frontier:
        nxt: set[int] = set()
        for u in frontier:
            dst, p = g.out_edges(u)
            if len(dst) == 0:
                continue
            drawn = rng.random(len(dst)) < p
            drawn_idx = np.flatnonzero(drawn)
            if len(drawn_idx) == 0:
                continue
            if len(drawn_idx) > cfg.invite_cap:
                keep = np.lexsort((dst[drawn_idx], -p[drawn_idx]))[: cfg.invite_cap]
                invited_idx = set(int(drawn_idx[i]) for i in keep)
            else:
                invited_idx = set(int(i) for i in drawn_idx)
            accept_draws = rng.random(len(invited_idx))
            pos = 0
            for i in drawn_idx:
                v = int(dst[i])
                if int(i) in invited_idx:
                    acc = int(accept_draws[pos] < g.accept[v])
                    pos += 1
                    rows.append((u, v, 1, acc))
                    if acc and v not in active:
                        active.add(v)
                        nxt.add(v)
                else:
                    rows.append((u, v, 0, 0))
        frontier = sorted(nxt)
    return EventLog.from_rows(rows)


def pick_inviters(g: Graph, count: int, seed: int, min_out_degree: int = 1) -> list[int]:
    """Seeded uniform choice of inviters among nodes with enough out-edges."""
    eligible = np.flatnonzero(g.out_degrees() >= min_out_degree)
    if len(eligible) < count:
        raise InfeasibleConfig(
            f"only {len(eligible)} nodes have out-degree >= {min_out_degree}, need {count}"
        )
    rng = np.random.default_rng(seed)
    chosen = rng.choice(eligible, size=count, replace=False)
    return sorted(int(u) for u in chosen)
