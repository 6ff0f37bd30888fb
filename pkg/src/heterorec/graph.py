"""Directed weighted attributed graph: invite probabilities on edges, accept
probabilities on nodes.

Node ids in input files are arbitrary 64-bit non-negative integers. They are
remapped to dense internal indices 0..N-1 in first-appearance order (the order
of rows in the nodes file); the mapping is kept on the graph and can be written
to a sidecar file. All algorithms work on internal indices.

File formats (UTF-8, tab-separated, no header):
    nodes file:    node_id <TAB> accept_prob
    edges file:    src_id <TAB> dst_id <TAB> invite_prob
    inviters file: one node id per line
    id-map sidecar: external_id <TAB> internal_index
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DanglingEndpoint,
    DuplicateEdge,
    EmptyInviterSet,
    MalformedRow,
    NoSuchEdge,
    ProbabilityOutOfRange,
    SelfLoop,
    UnknownNode,
)

_MAX_ID = 2**64 - 1


@contextmanager
def _as_text(source) -> Iterator[IO[str]]:
    if hasattr(source, "read"):
        yield source
    else:
        with open(source, "r", encoding="utf-8") as fh:
            yield fh


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Immutable directed graph in CSR form, with the transposed adjacency
    kept alongside for reverse traversal.

    ``out_dst[out_ptr[u]:out_ptr[u+1]]`` are u's out-neighbors sorted
    ascending, with matching invite probabilities in ``out_p``. The ``in_*``
    arrays mirror the same edge multiset keyed by destination. ``accept[v]``
    is the probability that v accepts an invitation.
    """

    accept: np.ndarray
    out_ptr: np.ndarray
    out_dst: np.ndarray
    out_p: np.ndarray
    in_ptr: np.ndarray
    in_src: np.ndarray
    in_p: np.ndarray
    external_ids: np.ndarray
    _ext_to_int: dict = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.accept)

    @property
    def m(self) -> int:
        return len(self.out_dst)

    def out_edges(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """Out-neighbors of u and their invite probabilities P_uv."""
        lo, hi = self.out_ptr[u], self.out_ptr[u + 1]
        return self.out_dst[lo:hi], self.out_p[lo:hi]

    def in_edges(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """In-neighbors of v and their invite probabilities P_uv."""
        lo, hi = self.in_ptr[v], self.in_ptr[v + 1]
        return self.in_src[lo:hi], self.in_p[lo:hi]

    def out_degree(self, u: int) -> int:
        return int(self.out_ptr[u + 1] - self.out_ptr[u])

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_ptr)

    def spread_prob(self, u: int, v: int) -> float:
        """Per-edge activation probability P_uv * U_v of the edge (u, v)."""
        self._check_node(u)
        self._check_node(v)
        dst, p = self.out_edges(u)
        i = np.searchsorted(dst, v)
        if i == len(dst) or dst[i] != v:
            raise NoSuchEdge(f"no edge ({u}, {v})")
        return float(p[i] * self.accept[v])

    def spread_out(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """Out-neighbors of u and the spread probabilities P_uv * U_v."""
        dst, p = self.out_edges(u)
        return dst, p * self.accept[dst]

    def in_spread_sums(self) -> np.ndarray:
        """Per node, the sum of spread probabilities over incoming edges."""
        s = np.zeros(self.n)
        for v in range(self.n):
            src, p = self.in_edges(v)
            if len(src):
                s[v] = float(p.sum() * self.accept[v])
        return s

    def internal_id(self, external_id: int) -> int:
        try:
            return self._ext_to_int[int(external_id)]
        except KeyError:
            raise UnknownNode(f"unknown external node id {external_id}") from None

    def _check_node(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise UnknownNode(f"node {u} outside [0, {self.n})")


def _check_prob(x: float, what: str) -> float:
    if not 0.0 <= x <= 1.0:
        raise ProbabilityOutOfRange(f"{what} = {x} outside [0, 1]")
    return x


def build_graph(
    accept: Sequence[float],
    edges: Iterable[tuple[int, int, float]],
    external_ids: Sequence[int] | None = None,
) -> Graph:
    """Construct a validated Graph from internal-index node and edge data.

    Rejects self-loops, duplicate (u, v) pairs, endpoints outside [0, n), and
    probabilities outside [0, 1]. The returned graph is immutable.
    """
    acc = np.asarray(accept, dtype=np.float64)
    n = len(acc)
    for i, a in enumerate(acc):
        _check_prob(float(a), f"accept_prob of node {i}")

    triples = [(int(u), int(v), float(p)) for (u, v, p) in edges]
    for u, v, p in triples:
        if u == v:
            raise SelfLoop(f"self-loop at node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise DanglingEndpoint(f"edge ({u}, {v}) references an unknown node")
        _check_prob(p, f"invite_prob of edge ({u}, {v})")

    triples.sort()
    for a, b in zip(triples, triples[1:]):
        if a[0] == b[0] and a[1] == b[1]:
            raise DuplicateEdge(f"duplicate edge ({a[0]}, {a[1]})")

    m = len(triples)
    src = np.fromiter((t[0] for t in triples), dtype=np.int64, count=m)
    dst = np.fromiter((t[1] for t in triples), dtype=np.int64, count=m)
    p = np.fromiter((t[2] for t in triples), dtype=np.float64, count=m)

    out_ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(out_ptr, src + 1, 1)
    np.cumsum(out_ptr, out=out_ptr)

    order_in = np.lexsort((src, dst))
    in_src = src[order_in]
    in_p = p[order_in]
    in_ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(in_ptr, dst + 1, 1)
    np.cumsum(in_ptr, out=in_ptr)

    if external_ids is None:
        ext = np.arange(n, dtype=np.uint64)
    else:
        ext = np.asarray(external_ids, dtype=np.uint64)
    ext_to_int = {int(e): i for i, e in enumerate(ext)}

    return Graph(
        accept=_readonly(acc),
        out_ptr=_readonly(out_ptr),
        out_dst=_readonly(dst),
        out_p=_readonly(p),
        in_ptr=_readonly(in_ptr),
        in_src=_readonly(in_src),
        in_p=_readonly(in_p),
        external_ids=_readonly(ext),
        _ext_to_int=ext_to_int,
    )


def _parse_id(tok: str, lineno: int, path_hint: str) -> int:
    try:
        val = int(tok)
    except ValueError:
        raise MalformedRow(f"{path_hint}:{lineno}: non-integer node id {tok!r}") from None
    if not 0 <= val <= _MAX_ID:
        raise MalformedRow(f"{path_hint}:{lineno}: node id {val} outside 64-bit unsigned range")
    return val


def _parse_prob(tok: str, lineno: int, path_hint: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise MalformedRow(f"{path_hint}:{lineno}: non-numeric probability {tok!r}") from None


def load_graph(nodes_source, edges_source) -> Graph:
    """Load and validate a graph from nodes and edges tables.

    Sources may be paths or open text streams. External node ids are remapped
    to dense internal indices in nodes-file row order; the mapping is kept on
    the returned graph (``external_ids``, ``internal_id``).
    """
    ext_ids: list[int] = []
    accept: list[float] = []
    seen: dict[int, int] = {}
    with _as_text(nodes_source) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise MalformedRow(f"nodes:{lineno}: expected 2 columns, got {len(parts)}")
            ext = _parse_id(parts[0], lineno, "nodes")
            if ext in seen:
                raise MalformedRow(f"nodes:{lineno}: duplicate declaration of node {ext}")
            u = _parse_prob(parts[1], lineno, "nodes")
            _check_prob(u, f"accept_prob of node {ext}")
            seen[ext] = len(ext_ids)
            ext_ids.append(ext)
            accept.append(u)

    edges: list[tuple[int, int, float]] = []
    with _as_text(edges_source) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise MalformedRow(f"edges:{lineno}: expected 3 columns, got {len(parts)}")
            s_ext = _parse_id(parts[0], lineno, "edges")
            d_ext = _parse_id(parts[1], lineno, "edges")
            p = _parse_prob(parts[2], lineno, "edges")
            _check_prob(p, f"invite_prob of edge ({s_ext}, {d_ext})")
            for e in (s_ext, d_ext):
                if e not in seen:
                    raise DanglingEndpoint(
                        f"edges:{lineno}: edge ({s_ext}, {d_ext}) references undeclared node {e}"
                    )
            edges.append((seen[s_ext], seen[d_ext], p))

    return build_graph(accept, edges, external_ids=ext_ids)


def save_graph(g: Graph, nodes_path, edges_path) -> None:
    """Write the graph back out in the nodes/edges file formats."""
    with open(nodes_path, "w", encoding="utf-8") as fh:
        for i in range(g.n):
            fh.write(f"{int(g.external_ids[i])}\t{float(g.accept[i])!r}\n")
    with open(edges_path, "w", encoding="utf-8") as fh:
        for u in range(g.n):
            dst, p = g.out_edges(u)
            for j in range(len(dst)):
                fh.write(
                    f"{int(g.external_ids[u])}\t{int(g.external_ids[dst[j]])}\t{float(p[j])!r}\n"
                )


def save_id_map(g: Graph, path) -> None:
    """Write the external-id to internal-index sidecar."""
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(g.n):
            fh.write(f"{int(g.external_ids[i])}\t{i}\n")


def load_inviters(source, g: Graph) -> list[int]:
    """Read an inviters file (one external id per line) as internal indices."""
    out: list[int] = []
    with _as_text(source) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            out.append(g.internal_id(_parse_id(line, lineno, "inviters")))
    return out


def save_inviters(g: Graph, inviters: Iterable[int], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u in inviters:
            fh.write(f"{int(g.external_ids[u])}\n")


def derive_candidates(g: Graph, inviters: Iterable[int]) -> set[int]:
    """Union of out-neighbors of the inviter set.

    Inviters may appear in the result when another inviter links to them;
    recommendation code never places a node on its own list. An inviter set
    with no out-edges yields an empty candidate set, not an error.
    """
    members = list(inviters)
    if not members:
        raise EmptyInviterSet("inviter set is empty")
    cand: set[int] = set()
    for u in members:
        g._check_node(int(u))
        dst, _ = g.out_edges(int(u))
        cand.update(int(v) for v in dst)
    return cand
