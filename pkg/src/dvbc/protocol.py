"""Per-node state machine of the distance-vector betweenness protocol.

Each node keeps a Bellman-Ford distance vector extended with next-hop and
previous-hop sets, shortest-path counts and per-source contributions. Three
receive handlers are provided:

* :func:`receive_bellman_ford` - distances only.
* :func:`receive_reference` - recomputes the path count, the contribution and
  the running centrality by full sums on every message.
* :func:`receive_fast` - maintains the same quantities incrementally, with a
  constant number of elementary operations per message.

Node ids are ``0..n-1``; distances are integer ticks with :data:`INF` as the
unreached sentinel. Contributions are ``float`` or :class:`fractions.Fraction`
depending on the ``arithmetic`` chosen at :func:`init`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

from .graph import INF, Graph, format_ticks

INT64_MAX = 2**63 - 1
MODES = ("bellman_ford", "reference", "fast")
ARITHMETICS = ("float", "rational")


class ProtocolError(RuntimeError):
    pass


class CountOverflowError(ProtocolError):
    """A shortest-path count left the signed 64-bit range."""


class Message(NamedTuple):
    target: int
    distance: int
    path_count: int
    contribution: float | Fraction


@dataclass
class OpCounter:
    """Elementary-operation instrumentation shared by the receive handlers."""

    messages: int = 0
    ops: int = 0

    @property
    def per_message(self) -> float:
        return self.ops / self.messages if self.messages else 0.0


@dataclass
class NodeState:
    node: int
    n: int
    neighbors: list[int]
    D: list[int]
    NH: list[set[int]]
    PH: list[set[int]]
    S: dict[int, list[int]]  # rows for every u in the closed neighborhood
    B: dict[int, list]
    A: dict[int, list]  # fast mode cache, neighbors only
    C: float | Fraction
    arithmetic: str = "float"
    bigint: bool = False
    counter: OpCounter = field(default_factory=OpCounter, repr=False, compare=False)

    @property
    def zero(self):
        return Fraction(0) if self.arithmetic == "rational" else 0.0

    def centrality(self) -> float | Fraction:
        """Normalized betweenness estimate (``C / ((n-1)(n-2))``)."""
        return normalized_centrality(self, self.n)

    def fingerprint(self) -> tuple:
        """Hashable image of every compared field (``A`` excluded)."""
        return (
            tuple(self.D),
            tuple(frozenset(x) for x in self.NH),
            tuple(frozenset(x) for x in self.PH),
            tuple((u, tuple(row)) for u, row in sorted(self.S.items())),
            tuple((u, tuple(row)) for u, row in sorted(self.B.items())),
            self.C,
        )

    def b_known(self, t: int) -> bool:
        """False while ``B[v,t]`` rests on an unset path count (rendered as infinity)."""
        v = self.node
        if t == v:
            return True
        if self.S[v][t] == 0:
            return False
        return all(self.S[x][t] != 0 for x in self.PH[t])

    def to_json(self, decimals: int = 3, render_unknown: bool = False) -> dict:
        """Debug view: ``D, NH, PH, S, B, C`` with distances in weight units."""

        def num(x):
            return float(x)

        b_self = [
            num(b) if not render_unknown or self.b_known(t) else "inf"
            for t, b in enumerate(self.B[self.node])
        ]
        return {
            "D": [format_ticks(d, decimals) if d != INF else "inf" for d in self.D],
            "NH": [sorted(x) for x in self.NH],
            "PH": [sorted(x) for x in self.PH],
            "S": {str(u): list(map(int, row)) for u, row in sorted(self.S.items())},
            "B": {
                str(u): (b_self if u == self.node else [num(b) for b in row])
                for u, row in sorted(self.B.items())
            },
            "C": num(self.C),
        }


def init(
    node: int,
    n: int,
    neighbors: Iterable[int],
    arithmetic: str = "float",
    bigint: bool = False,
) -> NodeState:
    """Initial state: only the node itself is at distance 0 with one path."""
    if arithmetic not in ARITHMETICS:
        raise ValueError(f"arithmetic must be one of {ARITHMETICS}")
    nbrs = sorted(neighbors)
    if not nbrs and n > 1:
        raise ProtocolError(f"node {node} has no neighbors")
    if node in nbrs or not (0 <= node < n):
        raise ProtocolError("bad neighborhood")
    zero = Fraction(0) if arithmetic == "rational" else 0.0
    D = [INF] * n
    D[node] = 0
    closed = [node, *nbrs]
    S = {u: [0] * n for u in closed}
    S[node][node] = 1
    B = {u: [zero] * n for u in closed}
    A = {u: [zero] * n for u in nbrs}
    return NodeState(
        node, n, nbrs, D,
        [set() for _ in range(n)], [set() for _ in range(n)],
        S, B, A, zero, arithmetic, bigint,
    )


def init_graph(g: Graph, arithmetic: str = "float", bigint: bool = False) -> list[NodeState]:
    return [init(v, g.n, g.neighbors(v), arithmetic, bigint) for v in range(g.n)]


def build_outbox(state: NodeState) -> list[Message]:
    """Messages ``(t, D[t], S[v,t], B[v,t])`` for every target, ascending ``t``.

    The same list is sent to every neighbor.
    """
    v = state.node
    S, B = state.S[v], state.B[v]
    return [Message(t, state.D[t], S[t], B[t]) for t in range(state.n)]


def _check(state: NodeState, x: int) -> int:
    if not state.bigint and x > INT64_MAX:
        raise CountOverflowError(f"path count overflow at node {state.node}")
    return x


def _contribution(state: NodeState, s_v: int, b, s_u: int):
    # S[v,t] * (B[u,t] + 1) / S[u,t], zero when the sender has no path yet
    if s_u == 0:
        return state.zero
    if state.arithmetic == "rational":
        return Fraction(s_v) * (b + 1) / s_u
    return float(s_v) * (b + 1.0) / float(s_u)


def receive_bellman_ford(state: NodeState, sender: int, msg: Message, w: int) -> None:
    t, d = msg.target, msg.distance
    state.counter.messages += 1
    state.counter.ops += 2
    if d != INF and d + w < state.D[t]:
        state.D[t] = d + w
        state.counter.ops += 1


def receive_reference(state: NodeState, sender: int, msg: Message, w: int, update_c: bool = True) -> None:
    """Full-recomputation receive.

    A previous hop whose stored path count is 0 contributes 0 to the sum.
    ``update_c=False`` leaves the centrality sum to :func:`recompute_centrality`
    (the simulator calls it once per inbox; the result is the same).
    """
    t, d, s, b = msg
    v, u = state.node, sender
    NH, PH, D = state.NH[t], state.PH[t], state.D
    ops = 7
    NH.discard(u)
    PH.discard(u)
    if d != INF:
        if d + w < D[t]:
            D[t] = d + w
        elif d + w == D[t]:
            NH.add(u)
        elif d - w == D[t]:
            PH.add(u)
    state.S[u][t] = s
    state.B[u][t] = b
    S_t = state.S
    if t != v:
        S_t[v][t] = _check(state, sum(S_t[x][t] for x in NH))
        ops += len(NH)
    sv = S_t[v][t]
    acc = state.zero
    for x in sorted(PH):
        sx = S_t[x][t]
        if sx != 0:
            acc = acc + (state.B[x][t] + 1) / (Fraction(sx) if state.arithmetic == "rational" else float(sx))
    ops += len(PH)
    state.B[v][t] = sv * acc if state.arithmetic == "rational" else float(sv) * acc
    if update_c:
        recompute_centrality(state)
    ops += state.n - 1
    state.counter.messages += 1
    state.counter.ops += ops


def recompute_centrality(state: NodeState) -> None:
    """``C = sum over x != v of B[v, x]``, ascending ``x``."""
    v, row = state.node, state.B[state.node]
    c = state.zero
    for x in range(state.n):
        if x != v:
            c = c + row[x]
    state.C = c


def receive_fast(state: NodeState, sender: int, msg: Message, w: int) -> None:
    """Incremental receive with a constant number of operations per message.

    Removing and re-adding the same neighbor is applied as one net update of
    ``B[v,t]`` and of ``C`` so an unchanged contribution leaves floats untouched.
    """
    t, d, s, b = msg
    v, u = state.node, sender
    NH, PH, D = state.NH[t], state.PH[t], state.D
    Sv, Bv, Su, Bu, Au = state.S[v], state.B[v], state.S[u], state.B[u], state.A[u]
    ops = 4
    b_old = Bv[t]
    removed = None
    if u in NH:
        NH.discard(u)
        if t != v:
            Sv[t] -= Su[t]
        ops += 2
    if u in PH:
        PH.discard(u)
        removed = Au[t]
        ops += 2
    Su[t] = s
    Bu[t] = b
    added = None
    if d != INF:
        ops += 1
        if d + w < D[t]:
            D[t] = d + w
            ops += 1
        elif d + w == D[t]:
            NH.add(u)
            if t != v:
                Sv[t] = _check(state, Sv[t] + s)
            ops += 3
        elif d - w == D[t]:
            PH.add(u)
            added = Au[t] = _contribution(state, Sv[t], b, s)
            ops += 5
    if removed is not None or added is not None:
        delta = (state.zero if added is None else added) - (state.zero if removed is None else removed)
        Bv[t] = Bv[t] + delta
        ops += 1
    if t != v:
        state.C = state.C + (Bv[t] - b_old)
        ops += 1
    state.counter.messages += 1
    state.counter.ops += ops


RECEIVERS = {
    "bellman_ford": receive_bellman_ford,
    "reference": receive_reference,
    "fast": receive_fast,
}


def normalized_centrality(state: NodeState, n: int):
    if n < 3:
        raise ValueError("betweenness normalization needs n >= 3")
    return state.C / ((n - 1) * (n - 2))
