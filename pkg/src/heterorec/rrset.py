"""Reverse-reachable set engine: budget sizing, sampling, coverage queries.

A reverse-reachable (RR) set is drawn by picking a source node v and walking
the graph backwards, keeping each in-edge (u -> x) independently with
probability S_ux = P_ux * U_x. A node's containment count across many RR sets
estimates its spread strength; the count of sets shared by a node pair
estimates how likely the pair is to interact.

Sampling derives one RNG stream per set index from the base seed, so the
collection's contents depend only on (seed, strategy), never on worker count
or scheduling.
"""

from __future__ import annotations

import random
import struct
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import ceil, lgamma, log, log2, sqrt
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ClampedParameters,
    EmptyGraph,
    InvalidParameters,
    SameNode,
    UniformFallback,
    UnknownNode,
)
from .graph import Graph

DEFAULT_RN_CAP = 10_000_000

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    """SplitMix64 finalizer; decorrelates consecutive integers."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def _set_seed(base: int, index: int) -> int:
    return _mix64((base & _MASK64) + ((index + 1) * _GOLDEN & _MASK64))


@dataclass(frozen=True)
class RNParameters:
    """Inputs of the RR-set budget formula.

    n_p: node count of the graph; k: recommendation list length; chi: inviter
    count; epsilon/delta: error constants in (0, 1); inviter_out_degrees: one
    out-degree per inviter (length chi).
    """

    n_p: int
    k: int
    chi: int
    epsilon: float
    delta: float
    inviter_out_degrees: Sequence[int]

    def __post_init__(self):
        if self.n_p < 1:
            raise InvalidParameters(f"n_p must be >= 1, got {self.n_p}")
        if self.k < 1:
            raise InvalidParameters(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidParameters(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise InvalidParameters(f"delta must lie in (0, 1), got {self.delta}")
        if self.chi < 1:
            raise InvalidParameters(f"chi must be >= 1, got {self.chi}")
        if len(self.inviter_out_degrees) != self.chi:
            raise InvalidParameters(
                f"chi = {self.chi} but {len(self.inviter_out_degrees)} out-degrees given"
            )
        if any(d < 0 for d in self.inviter_out_degrees):
            raise InvalidParameters("out-degrees must be non-negative")


@dataclass(frozen=True)
class RNResult:
    i_max: int
    theta: float
    rn: int
    warnings: tuple[str, ...] = ()


def _ln_binom(c: int, k: int) -> float:
    return lgamma(c + 1) - lgamma(k + 1) - lgamma(c - k + 1)


def compute_rn(params: RNParameters, cap: int = DEFAULT_RN_CAP) -> RNResult:
    """Number of RR sets to sample, with its two factors.

    i_max = ceil(log2(n_p / (k * chi * eps^2))), clamped up to 1 when the
    argument drops to 1 or below. theta doubles the squared sum of
    sqrt(ln(6/delta))/2 and sqrt((sum of ln C(C_u, k) + ln(6/delta)) / 2);
    an inviter with fewer than k candidates contributes ln 1 = 0. The product
    2^i_max * theta is rounded up and clamped to ``cap``.
    """
    notes: list[str] = []

    ln6d = log(6.0 / params.delta)
    ln_prod = 0.0
    short = 0
    for c in params.inviter_out_degrees:
        if c < params.k:
            short += 1
        else:
            ln_prod += _ln_binom(int(c), params.k)
    if short:
        notes.append(f"{short} inviter(s) have out-degree < k; their factors clamped to ln 1")

    theta = 2.0 * (0.5 * sqrt(ln6d) + sqrt(0.5 * (ln_prod + ln6d))) ** 2

    arg = params.n_p / (params.k * params.chi * params.epsilon**2)
    i_max = ceil(log2(arg))
    if i_max < 1:
        notes.append(f"i_max = {i_max} clamped to 1 (n_p <= k*chi*eps^2)")
        i_max = 1

    rn = ceil(2**i_max * theta)
    if rn > cap:
        notes.append(f"rn = {rn} clamped to cap {cap}")
        rn = cap

    for msg in notes:
        warnings.warn(msg, ClampedParameters, stacklevel=2)
    return RNResult(i_max=i_max, theta=theta, rn=rn, warnings=tuple(notes))


def rn_for_graph(
    g: Graph, inviters: Sequence[int], k: int, epsilon: float, delta: float,
    cap: int = DEFAULT_RN_CAP,
) -> RNResult:
    """compute_rn with n_p, chi, and out-degrees read off a graph."""
    degrees = [g.out_degree(int(u)) for u in inviters]
    params = RNParameters(
        n_p=g.n, k=k, chi=len(degrees), epsilon=epsilon, delta=delta,
        inviter_out_degrees=degrees,
    )
    return compute_rn(params, cap=cap)


_MAGIC = b"RRSC"
_VERSION = 1
_STRATEGY_CODES = {"uniform": 0, "random_source": 1, "explicit": 2}
_STRATEGY_NAMES = {v: k for k, v in _STRATEGY_CODES.items()}


class RRSetCollection:
    """A bag of RR sets with an inverted node -> set-id index.

    Sets are stored flattened (``members``/``ptr``) with sorted member ids.
    Removal is logical via per-set ``alive`` flags, so set ids stay stable and
    shared-set queries can still be answered over everything ever sampled.
    """

    def __init__(
        self,
        n: int,
        members: np.ndarray,
        ptr: np.ndarray,
        sources: np.ndarray,
        seed: int = 0,
        strategy: str = "explicit",
    ):
        self.n = int(n)
        self.members = members.astype(np.int32, copy=False)
        self.ptr = ptr.astype(np.int64, copy=False)
        self.sources = sources.astype(np.int32, copy=False)
        self.seed = int(seed)
        self.strategy = strategy
        self.alive = np.ones(len(sources), dtype=bool)
        index: list[list[int]] = [[] for _ in range(self.n)]
        for i in range(len(sources)):
            for v in self.members[self.ptr[i] : self.ptr[i + 1]]:
                index[v].append(i)
        self._index = [np.asarray(ids, dtype=np.int64) for ids in index]

    @classmethod
    def from_sets(
        cls,
        sets: Iterable[Iterable[int]],
        n: int,
        sources: Sequence[int] | None = None,
        seed: int = 0,
        strategy: str = "explicit",
    ) -> "RRSetCollection":
        """Build a collection from explicit member sets (mainly for tests and
        worked examples). Default source of each set is its smallest member."""
        as_sorted = [np.asarray(sorted(set(int(v) for v in s)), dtype=np.int32) for s in sets]
        if any(len(s) == 0 for s in as_sorted):
            raise InvalidParameters("RR sets must be non-empty")
        ptr = np.zeros(len(as_sorted) + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(s) for s in as_sorted])
        flat = (
            np.concatenate(as_sorted) if as_sorted else np.zeros(0, dtype=np.int32)
        )
        if sources is None:
            src = np.array([s[0] for s in as_sorted], dtype=np.int32)
        else:
            src = np.asarray(sources, dtype=np.int32)
        for i, s in enumerate(as_sorted):
            if src[i] not in s:
                raise InvalidParameters(f"source {src[i]} not a member of set {i}")
        return cls(n, flat, ptr, src, seed=seed, strategy=strategy)

    @property
    def num_sets(self) -> int:
        return len(self.sources)

    @property
    def num_alive(self) -> int:
        return int(self.alive.sum())

    def set_members(self, i: int) -> np.ndarray:
        return self.members[self.ptr[i] : self.ptr[i + 1]]

    def sets_containing(self, u: int, alive_only: bool = True) -> np.ndarray:
        self._check_node(u)
        ids = self._index[int(u)]
        if alive_only:
            return ids[self.alive[ids]]
        return ids

    def coverage_counts(self, nodes: Iterable[int]) -> np.ndarray:
        """Alive-set containment count for each queried node."""
        return np.array(
            [len(self.sets_containing(int(u))) for u in nodes], dtype=np.int64
        )

    def shared_rr_count(self, i: int, j: int, over: str = "alive") -> int:
        """Number of sets containing both i and j (``over`` = alive | all)."""
        i, j = int(i), int(j)
        if i == j:
            raise SameNode(f"shared-set count needs two distinct nodes, got {i} twice")
        self._check_node(i)
        self._check_node(j)
        common = np.intersect1d(self._index[i], self._index[j], assume_unique=True)
        if over == "alive":
            return int(self.alive[common].sum())
        if over == "all":
            return len(common)
        raise InvalidParameters(f"over must be 'alive' or 'all', got {over!r}")

    def deactivate(self, ids: np.ndarray) -> None:
        self.alive[ids] = False

    def remove_sets_covering(self, u: int) -> int:
        """Mark every alive set containing u as removed; returns how many."""
        ids = self.sets_containing(int(u))
        self.alive[ids] = False
        return len(ids)

    def _check_node(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise UnknownNode(f"node {u} outside [0, {self.n})")

    def save(self, path) -> None:
        """Binary dump: header (magic, version, n, set count, seed, strategy)
        then per set source, length, and sorted member ids, all little-endian
        fixed width. Alive flags are not persisted."""
        code = _STRATEGY_CODES.get(self.strategy, _STRATEGY_CODES["explicit"])
        with open(path, "wb") as fh:
            fh.write(
                struct.pack("<4sIQQQB", _MAGIC, _VERSION, self.n, self.num_sets,
                            self.seed & _MASK64, code)
            )
            for i in range(self.num_sets):
                mem = self.set_members(i)
                fh.write(struct.pack("<II", int(self.sources[i]), len(mem)))
                fh.write(mem.astype("<i4").tobytes())

    @classmethod
    def load(cls, path) -> "RRSetCollection":
        with open(path, "rb") as fh:
            head = fh.read(struct.calcsize("<4sIQQQB"))
            magic, version, n, count, seed, code = struct.unpack("<4sIQQQB", head)
            if magic != _MAGIC:
                raise InvalidParameters(f"{path}: not an RR-set collection dump")
            if version != _VERSION:
                raise InvalidParameters(f"{path}: unsupported dump version {version}")
            sources = np.empty(count, dtype=np.int32)
            ptr = np.zeros(count + 1, dtype=np.int64)
            chunks: list[np.ndarray] = []
            for i in range(count):
                src, length = struct.unpack("<II", fh.read(8))
                sources[i] = src
                mem = np.frombuffer(fh.read(4 * length), dtype="<i4")
                ptr[i + 1] = ptr[i] + length
                chunks.append(mem)
        flat = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int32)
        return cls(int(n), flat, ptr, sources, seed=int(seed),
                   strategy=_STRATEGY_NAMES.get(code, "explicit"))


def _sample_chunk(g: Graph, lo: int, hi: int, seed: int, strategy: str, hsp: bool):
    """Generate sets lo..hi-1. Plain-list copies of the CSR arrays keep the
    inner loop cheap; the per-set stream makes the result order-independent."""
    in_ptr = g.in_ptr.tolist()
    in_src = g.in_src.tolist()
    in_p = g.in_p.tolist()
    accept = g.accept.tolist()
    n = g.n

    out_members: list[np.ndarray] = []
    out_sources = np.empty(hi - lo, dtype=np.int32)
    for i in range(lo, hi):
        rnd = random.Random(_set_seed(seed, i))
        if strategy == "uniform":
            source = i % n
        else:
            source = rnd.randrange(n)
        members = {source}
        frontier = [source]
        while frontier:
            nxt: list[int] = []
            for x in frontier:
                a, b = in_ptr[x], in_ptr[x + 1]
                if a == b:
                    continue
                ux = accept[x] if hsp else 1.0
                for e in range(a, b):
                    u = in_src[e]
                    r = rnd.random()
                    if u in members:
                        continue
                    if r < in_p[e] * ux:
                        members.add(u)
                        nxt.append(u)
            nxt.sort()
            frontier = nxt
        out_members.append(np.array(sorted(members), dtype=np.int32))
        out_sources[i - lo] = source
    return out_members, out_sources


_CHUNK = 8192


def sample_rr_sets(
    g: Graph,
    count: int,
    strategy: str = "uniform",
    seed: int = 0,
    *,
    hsp: bool = True,
    jobs: int = 1,
) -> RRSetCollection:
    """Sample a collection of RR sets.

    ``uniform`` makes each node the source of exactly floor(count / n) sets
    (set i is sourced at node i mod n; the remainder is dropped and the
    effective count reported on the collection). When floor(count / n) is
    zero the call falls back to i.i.d. random sources for all ``count`` sets,
    with a warning. ``hsp=False`` samples with edge probability P_uv alone,
    ignoring accept probabilities.
    """
    if g.n == 0:
        raise EmptyGraph("cannot sample RR sets from an empty graph")
    if count < 1:
        raise InvalidParameters(f"count must be >= 1, got {count}")
    if strategy not in ("uniform", "random_source"):
        raise InvalidParameters(f"strategy must be 'uniform' or 'random_source', got {strategy!r}")

    effective = count
    used_strategy = strategy
    if strategy == "uniform":
        per = count // g.n
        if per == 0:
            warnings.warn(
                f"count {count} below node count {g.n}; sampling all sets with random sources",
                UniformFallback,
                stacklevel=2,
            )
            used_strategy = "random_source"
        else:
            effective = per * g.n

    bounds = [(lo, min(lo + _CHUNK, effective)) for lo in range(0, effective, _CHUNK)]
    if jobs > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(
                pool.map(
                    _sample_chunk_star,
                    [(g, lo, hi, seed, used_strategy, hsp) for lo, hi in bounds],
                )
            )
    else:
        parts = [_sample_chunk(g, lo, hi, seed, used_strategy, hsp) for lo, hi in bounds]

    member_lists: list[np.ndarray] = []
    sources = np.empty(effective, dtype=np.int32)
    at = 0
    for mems, srcs in parts:
        member_lists.extend(mems)
        sources[at : at + len(srcs)] = srcs
        at += len(srcs)

    ptr = np.zeros(effective + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(s) for s in member_lists])
    flat = (
        np.concatenate(member_lists) if member_lists else np.zeros(0, dtype=np.int32)
    )
    return RRSetCollection(g.n, flat, ptr, sources, seed=seed, strategy=used_strategy)


def _sample_chunk_star(args):
    return _sample_chunk(*args)
