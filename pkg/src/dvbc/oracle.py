"""Centralized ground truth for betweenness centrality.

``brandes`` runs one Dijkstra per source over exact tick distances and
accumulates per-source contributions with the previous-hop recursion
``bc_v(s) = sigma_sv * sum_{u in PH_v(s)} (bc_u(s) + 1) / sigma_su``.
``brute_force`` enumerates every simple path (tiny graphs only) and shares no
code with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import Graph, GraphMetrics, single_source

BRUTE_FORCE_MAX_N = 10


@dataclass
class ExactCentrality:
    """``bc_contrib[v, s]`` is the contribution of source ``s`` to node ``v``.

    The diagonal holds the recursion's value at ``v == s`` (``n - 1``), which
    never enters ``bc_raw``.
    """

    n: int
    sigma: np.ndarray  # object ints
    bc_contrib: np.ndarray
    bc_raw: np.ndarray
    sigma_through: np.ndarray | None = None  # [s, t, v], brute force only
    sigma_arc: dict | None = field(default=None, repr=False)  # (s, t, u, v) -> count

    @property
    def bc(self) -> np.ndarray:
        if self.n < 3:
            raise ValueError("betweenness normalization needs n >= 3")
        return self.bc_raw / ((self.n - 1) * (self.n - 2))


def brandes(g: Graph, exact: bool = True) -> ExactCentrality:
    """Per-source shortest-path DAG, path counting, then reverse-distance accumulation."""
    n = g.n
    adj = g.adjacency
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    sigma = np.empty((n, n), dtype=object)
    contrib = np.empty((n, n), dtype=object if exact else np.float64)
    for s in range(n):
        dist, order = single_source(g, s)
        sg = [0] * n
        sg[s] = 1
        for x in order[1:]:
            sg[x] = sum(sg[y] for y, w in adj[x] if dist[y] + w == dist[x])
        dep = [zero] * n
        for v in reversed(order):
            acc = zero
            for u, w in adj[v]:
                if dist[u] == dist[v] + w:  # u is a previous hop of v w.r.t. source s
                    acc += (dep[u] + one) / sg[u]
            dep[v] = sg[v] * acc
        sigma[s] = sg
        for v in range(n):
            contrib[v, s] = dep[v]
    bc_raw = np.array(
        [sum((contrib[v, s] for s in range(n) if s != v), zero) for v in range(n)],
        dtype=object if exact else np.float64,
    )
    return ExactCentrality(n, sigma, contrib, bc_raw)


def _simple_paths(adj, s: int, t: int):
    """All simple ``s``-``t`` paths as ``(length, nodes)``."""
    out = []
    stack = [(s, 0, [s])]
    while stack:
        x, length, path = stack.pop()
        if x == t:
            out.append((length, path))
            continue
        for y, w in adj[x]:
            if y not in path:
                stack.append((y, length + w, path + [y]))
    return out


def brute_force(g: Graph) -> ExactCentrality:
    """Enumerate all simple paths between every ordered pair; exact rationals."""
    n = g.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}")
    if n < 3:
        raise ValueError("betweenness needs n >= 3")
    adj = g.adjacency
    sigma = np.zeros((n, n), dtype=object)
    through = np.zeros((n, n, n), dtype=object)
    arcs: dict[tuple[int, int, int, int], int] = {}
    for s in range(n):
        for t in range(n):
            if s == t:
                sigma[s, t] = 1
                through[s, t, s] = 1
                continue
            paths = _simple_paths(adj, s, t)
            best = min(length for length, _ in paths)
            shortest = [p for length, p in paths if length == best]
            sigma[s, t] = len(shortest)
            for p in shortest:
                for v in p:
                    through[s, t, v] += 1
                for a, b in zip(p, p[1:]):
                    arcs[(s, t, a, b)] = arcs.get((s, t, a, b), 0) + 1
    contrib = np.empty((n, n), dtype=object)
    for v in range(n):
        for s in range(n):
            contrib[v, s] = sum(
                (Fraction(through[s, t, v], sigma[s, t]) for t in range(n) if t != v),
                Fraction(0),
            )
    bc_raw = np.array(
        [sum((contrib[v, s] for s in range(n) if s != v), Fraction(0)) for v in range(n)],
        dtype=object,
    )
    return ExactCentrality(n, sigma, contrib, bc_raw, through, arcs)


@dataclass
class IdentityReport:
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, msg: str) -> None:
        self.violations.append(msg)


def check_identities(e: ExactCentrality, g: Graph, m: GraphMetrics) -> IdentityReport:
    """Product rule for paths through a node or an arc, next-hop and previous-hop
    path-count sums, and for unit weights the total-centrality identity."""
    if e.sigma_through is None or e.sigma_arc is None:
        raise ValueError("identity checks need brute-force output")
    n, rep = g.n, IdentityReport()
    sig, thr, dist = e.sigma, e.sigma_through, m.dist
    adj = g.adjacency
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            for v in range(n):
                if thr[s, t, v]:
                    rep.checked += 1
                    if thr[s, t, v] != sig[s, v] * sig[v, t]:
                        rep.fail(f"node product rule s={s} t={t} v={v}")
            for v in range(n):
                for u, _ in adj[v]:
                    c = e.sigma_arc.get((s, t, v, u), 0)
                    if c:
                        rep.checked += 1
                        if c != sig[s, v] * sig[u, t]:
                            rep.fail(f"arc product rule s={s} t={t} ({v},{u})")
    for v in range(n):
        for t in range(n):
            if t == v:
                continue
            nh = [u for u, w in adj[v] if w + dist[u, t] == dist[v, t]]
            rep.checked += 1
            if sig[v, t] != sum(sig[u, t] for u in nh):
                rep.fail(f"next-hop sum v={v} t={t}")
            for s in range(n):
                if s in (v, t) or not thr[s, t, v]:
                    continue
                ph = [u for u, w in adj[v] if dist[s, u] == dist[s, v] + w]
                rep.checked += 1
                if sig[v, t] != sum(e.sigma_arc.get((v, t, v, u), 0) for u in ph):
                    rep.fail(f"previous-hop sum s={s} v={v} t={t}")
    if g.is_unit_weight:
        hops = dist // g.scale
        lhs = sum(e.bc_raw)
        rhs = sum(int(hops[s, t]) - 1 for s in range(n) for t in range(n) if s != t)
        rep.checked += 1
        if lhs != rhs:
            rep.fail(f"total centrality {lhs} != sum of (dist - 1) {rhs}")
    return rep


def optimal_frequency(deg: int, bc: float) -> float:
    """Link-sensing frequency ``sqrt(deg / bc)``; ``inf`` for a node of zero centrality."""
    if deg < 1:
        raise ValueError("degree must be positive")
    if bc == 0:
        return math.inf
    return math.sqrt(deg / float(bc))
