"""Weighted undirected graphs with exact fixed-point weights.

Weights are stored as integer *ticks* (``1 tick = 10**-decimals`` units) so that
the equality tests the protocol relies on (``d + w == D[t]``) are exact.
"""

from __future__ import annotations

import heapq
import io
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

DEFAULT_DECIMALS = 3
INF = np.iinfo(np.int64).max  # distance sentinel shared by every engine
MAX_RETRIES = 1000

# Distribution over {1, 2, 5} with mean exactly 2.
DEFAULT_WEIGHT_VALUES = (1, 2, 5)
DEFAULT_WEIGHT_PROBS = (1 / 2, 1 / 3, 1 / 6)


class GraphError(ValueError):
    """Invalid graph input: parse failure, bad edge, or disconnected graph."""


@dataclass(frozen=True)
class Graph:
    """Connected, simple, undirected graph on nodes ``0..n-1``.

    ``edges`` holds ``(u, v, w)`` with ``u < v`` and ``w`` in ticks, sorted.
    Build instances with :meth:`from_edges`, which validates.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]
    decimals: int = DEFAULT_DECIMALS
    name: str = field(default="", compare=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, int]],
        decimals: int = DEFAULT_DECIMALS,
        name: str = "",
    ) -> "Graph":
        if n < 1:
            raise GraphError("graph needs at least one node")
        seen: dict[tuple[int, int], int] = {}
        for u, v, w in edges:
            u, v, w = int(u), int(v), int(w)
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
            if w <= 0:
                raise GraphError(f"edge ({u}, {v}) has non-positive weight")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge ({key[0]}, {key[1]})")
            seen[key] = w
        g = cls(n, tuple(sorted((a, b, w) for (a, b), w in seen.items())), decimals, name)
        if not g.is_connected():
            raise GraphError("graph is disconnected")
        return g

    @property
    def scale(self) -> int:
        return 10**self.decimals

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per node, ``(neighbor, weight)`` pairs in ascending neighbor order."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return tuple(tuple(sorted(row)) for row in adj)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, indices, weights)``; arc ``j`` of node ``v`` is ``indptr[v] <= j < indptr[v+1]``."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indices, weights = [], []
        for v, row in enumerate(self.adjacency):
            indptr[v + 1] = indptr[v] + len(row)
            for u, w in row:
                indices.append(u)
                weights.append(w)
        return indptr, np.asarray(indices, dtype=np.int64), np.asarray(weights, dtype=np.int64)

    def neighbors(self, v: int) -> list[int]:
        return [u for u, _ in self.adjacency[v]]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def weight(self, u: int, v: int) -> int:
        for x, w in self.adjacency[u]:
            if x == v:
                return w
        raise KeyError((u, v))

    @property
    def is_unit_weight(self) -> bool:
        return all(w == self.scale for _, _, w in self.edges)

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y, _ in self.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_weighted_edges_from(self.edges)
        return g

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with node ``v`` renamed to ``perm[v]``."""
        return Graph.from_edges(
            self.n, ((perm[u], perm[v], w) for u, v, w in self.edges), self.decimals, self.name
        )

    def format_weight(self, ticks: int) -> str:
        return format_ticks(ticks, self.decimals)


def format_ticks(ticks: int, decimals: int) -> str:
    if ticks == INF:
        return "inf"
    return format(Decimal(int(ticks)).scaleb(-decimals).normalize(), "f")


def to_ticks(text: str, decimals: int) -> int:
    """Parse a decimal string into ticks; rejects values needing more than ``decimals`` digits."""
    try:
        q = Decimal(text)
    except InvalidOperation:
        raise GraphError(f"not a number: {text!r}") from None
    if not q.is_finite():
        raise GraphError(f"weight must be finite: {text!r}")
    scaled = q.scaleb(decimals)
    if scaled != scaled.to_integral_value():
        raise GraphError(f"weight {text} has more than {decimals} fractional digits")
    return int(scaled)


# --------------------------------------------------------------------------
# Edge-list I/O
# --------------------------------------------------------------------------


def load_edge_list(data: str | bytes, decimals: int = DEFAULT_DECIMALS, name: str = "") -> Graph:
    """Parse ``u v w`` lines (``#`` starts a comment) into a validated :class:`Graph`."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    edges = []
    max_id = -1
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"line {lineno}: expected 'u v w', got {raw.strip()!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: node ids must be integers") from None
        if u < 0 or v < 0:
            raise GraphError(f"line {lineno}: node ids must be non-negative")
        try:
            w = to_ticks(parts[2], decimals)
        except GraphError as exc:
            raise GraphError(f"line {lineno}: {exc}") from None
        if w <= 0:
            raise GraphError(f"line {lineno}: weight must be positive")
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at node {u}")
        edges.append((u, v, w))
        max_id = max(max_id, u, v)
    if not edges:
        raise GraphError("edge list is empty")
    return Graph.from_edges(max_id + 1, edges, decimals, name)


def read_edge_list(path: str | Path, decimals: int = DEFAULT_DECIMALS) -> Graph:
    path = Path(path)
    return load_edge_list(path.read_bytes(), decimals, name=path.stem)


def dump_edge_list(g: Graph) -> str:
    out = io.StringIO()
    if g.name:
        out.write(f"# {g.name}\n")
    for u, v, w in g.edges:
        out.write(f"{u} {v} {g.format_weight(w)}\n")
    return out.getvalue()


# --------------------------------------------------------------------------
# Generators
# --------------------------------------------------------------------------

FAMILIES = ("grid", "hypercube", "binary_tree", "cycle", "path", "star", "complete",
            "erdos_renyi", "barabasi_albert", "geometric")
RANDOM_FAMILIES = {"erdos_renyi", "barabasi_albert", "geometric"}


def sub_seed(*keys: int) -> int:
    """Derive a 32-bit seed from a tuple of integers (``SeedSequence`` entropy mixing)."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def _structure(family: str, params: dict, seed: int | None) -> nx.Graph:
    p = params
    if family == "grid":
        g = nx.grid_2d_graph(int(p["h"]), int(p["w"]))
        return nx.relabel_nodes(g, {(r, c): r * int(p["w"]) + c for r, c in g.nodes})
    if family == "hypercube":
        d = int(p["d"])
        g = nx.hypercube_graph(d)
        bits = {x: x if isinstance(x, (tuple, list)) else (x,) for x in g.nodes}
        return nx.relabel_nodes(g, {x: int("".join(map(str, b)), 2) for x, b in bits.items()})
    if family == "binary_tree":
        return nx.balanced_tree(2, int(p["h"]))
    if family == "cycle":
        return nx.cycle_graph(int(p["n"]))
    if family == "path":
        return nx.path_graph(int(p["n"]))
    if family == "star":
        return nx.star_graph(int(p["k"]))
    if family == "complete":
        return nx.complete_graph(int(p["n"]))
    if family == "erdos_renyi":
        return nx.gnp_random_graph(int(p["n"]), float(p["p"]), seed=seed)
    if family == "barabasi_albert":
        return nx.barabasi_albert_graph(int(p["n"]), int(p["m"]), seed=seed)
    if family == "geometric":
        return nx.random_geometric_graph(int(p["n"]), float(p["r"]), seed=seed)
    raise GraphError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def _draw_weights(k: int, values: Sequence[float], probs: Sequence[float] | None, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.choice(np.asarray(values, dtype=float), size=k, p=probs)


def generate(
    family: str,
    params: dict | None = None,
    weights: str = "unit",
    seed: int = 0,
    weight_values: Sequence[float] = DEFAULT_WEIGHT_VALUES,
    weight_probs: Sequence[float] | None = DEFAULT_WEIGHT_PROBS,
    decimals: int = DEFAULT_DECIMALS,
    max_retries: int = MAX_RETRIES,
) -> Graph:
    """Build a graph from a named family.

    Random families are redrawn with derived seeds until connected. ``weights``
    is ``"unit"`` or ``"random"`` (drawn from ``weight_values``).
    """
    params = dict(params or {})
    if any(isinstance(x, (int, float)) and x <= 0 for x in params.values()):
        raise GraphError("generator parameters must be positive")
    if weights not in ("unit", "random"):
        raise GraphError(f"unknown weight scheme {weights!r}")
    attempts = max_retries if family in RANDOM_FAMILIES else 1
    for attempt in range(attempts):
        g = _structure(family, params, sub_seed(seed, attempt, 0))
        n = g.number_of_nodes()
        if n == 0 or not nx.is_connected(g):
            continue
        edges = sorted((min(u, v), max(u, v)) for u, v in g.edges)
        if weights == "unit":
            ws = [10**decimals] * len(edges)
        else:
            drawn = _draw_weights(len(edges), weight_values, weight_probs, sub_seed(seed, attempt, 1))
            ws = [to_ticks(repr(float(x)), decimals) for x in drawn]
        label = "_".join(f"{k}{v}" for k, v in params.items())
        name = f"{family}_{label}_{weights}_s{seed}" if family in RANDOM_FAMILIES else f"{family}_{label}_{weights}"
        return Graph.from_edges(n, [(u, v, w) for (u, v), w in zip(edges, ws)], decimals, name)
    raise GraphError(f"{family} {params}: no connected instance within {attempts} attempts")


def parse_generator_spec(spec: str) -> tuple[str, dict]:
    """``"erdos_renyi:n=100,p=0.05"`` -> ``("erdos_renyi", {"n": 100, "p": 0.05})``."""
    family, _, rest = spec.partition(":")
    params: dict = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise GraphError(f"bad generator parameter {item!r}")
        try:
            num = float(val)
        except ValueError:
            raise GraphError(f"bad generator parameter {item!r}") from None
        params[key.strip()] = int(num) if num.is_integer() and "." not in val else num
    return family.strip(), params


# --------------------------------------------------------------------------
# Metrics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphMetrics:
    """All-pairs distances (ticks) and hop statistics over shortest paths."""

    dist: np.ndarray
    minhop: np.ndarray
    maxhop: np.ndarray
    sigma: np.ndarray  # number of shortest paths; object dtype (exact ints)

    @property
    def diam(self) -> int:
        return int(self.minhop.max())

    @property
    def Diam(self) -> int:
        return int(self.maxhop.max())

    @property
    def ecc_hop(self) -> np.ndarray:
        return self.minhop.max(axis=1)

    @property
    def ecc_maxhop(self) -> np.ndarray:
        return self.maxhop.max(axis=1)


def single_source(g: Graph, s: int) -> tuple[list[int], list[int]]:
    """Dijkstra from ``s``: ``(dist, settle_order)`` with exact tick distances."""
    dist = [INF] * g.n
    dist[s] = 0
    order: list[int] = []
    done = [False] * g.n
    heap = [(0, s)]
    adj = g.adjacency
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        order.append(x)
        for y, w in adj[x]:
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist, order


def compute_metrics(g: Graph) -> GraphMetrics:
    n = g.n
    dist = np.zeros((n, n), dtype=np.int64)
    minhop = np.zeros((n, n), dtype=np.int64)
    maxhop = np.zeros((n, n), dtype=np.int64)
    sigma = np.empty((n, n), dtype=object)
    adj = g.adjacency
    for s in range(n):
        d, order = single_source(g, s)
        lo = [0] * n
        hi = [0] * n
        sg = [0] * n
        sg[s] = 1
        for x in order[1:]:
            preds = [y for y, w in adj[x] if d[y] + w == d[x]]
            lo[x] = 1 + min(lo[y] for y in preds)
            hi[x] = 1 + max(hi[y] for y in preds)
            sg[x] = sum(sg[y] for y in preds)
        dist[s] = d
        minhop[s] = lo
        maxhop[s] = hi
        sigma[s] = sg
    return GraphMetrics(dist, minhop, maxhop, sigma)
