"""Bulk-synchronous phase simulator.

A phase builds every node's outbox from the pre-phase states, then delivers
all messages and lets each node process its inbox (canonically by sender then
target, or in a seeded shuffle). Phase 1 is the first exchange; phase 0 is
the initial state. A run stops at the first phase in which nothing changed,
including the copies of neighbor values a node keeps from its last inbox.

``quiescence_phase`` is the last phase in which a node-computed value
(``D, NH, PH``, own path counts ``S[v, .]``, own contributions ``B[v, .]``,
``C``) changed. Stored neighbor copies lag that by one phase since they are
received one exchange after the sender settles; ``full_quiescence_phase``
includes them.

Two engines implement the same semantics:

``"python"``  drives :class:`dvbc.protocol.NodeState` objects; supports exact
              rational contributions and unbounded path counts.
``"compiled"`` runs a numba kernel over flat arrays; float contributions and
              checked int64 counts only. Bit-identical to ``"python"`` in
              float mode.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernel
from . import protocol as proto
from .graph import Graph

CH_D, CH_NH, CH_PH, CH_SNB, CH_S, CH_BNB, CH_B, CH_BSELF, CH_C = (
    _kernel.CH_D, _kernel.CH_NH, _kernel.CH_PH, _kernel.CH_SNB, _kernel.CH_S,
    _kernel.CH_BNB, _kernel.CH_B, _kernel.CH_BSELF, _kernel.CH_C,
)
FIELD_BITS = {
    "D": CH_D, "NH": CH_NH, "PH": CH_PH, "S_neighbor": CH_SNB, "S": CH_S,
    "B_neighbor": CH_BNB, "B": CH_B, "B_self": CH_BSELF, "C": CH_C,
}
NODE_FIELDS = ("D", "NH", "PH", "S", "B", "B_self", "C")


class NonConvergenceError(RuntimeError):
    def __init__(self, run: "SimulationRun"):
        super().__init__(
            f"{run.graph.name or 'graph'}: no quiescence within {run.schedule.max_phases} phases"
        )
        self.run = run


@dataclass(frozen=True)
class Schedule:
    """Within-phase delivery order and the phase cap (``None`` means ``4 n + 4``)."""

    order: str = "canonical"
    seed: int = 0
    max_phases: int | None = None

    def __post_init__(self):
        if self.order not in ("canonical", "shuffle"):
            raise ValueError("order must be 'canonical' or 'shuffle'")

    @classmethod
    def shuffled(cls, seed: int, max_phases: int | None = None) -> "Schedule":
        return cls("shuffle", seed, max_phases)

    def cap(self, n: int) -> int:
        return self.max_phases if self.max_phases is not None else 4 * n + 4


# --------------------------------------------------------------------------
# Views handed to observers
# --------------------------------------------------------------------------


class PhaseView:
    """Whole-network state after a phase, arc-aligned with ``graph.csr``.

    Attributes ``D, S, B`` are ``(n, n)`` self rows, ``C`` is ``(n,)`` and
    ``NH, PH, S_neighbor, B_neighbor`` are ``(arcs, n)``. Arrays may be live
    engine buffers: copy what you keep.
    """

    phase: int
    changes: np.ndarray

    def node_state(self, v: int) -> proto.NodeState:
        """Node ``v`` as a :class:`NodeState` (live object for the Python engine)."""
        return self._engine.node_state(v)


class _ArrayView(PhaseView):
    def __init__(self, phase, engine, changes):
        self.phase = phase
        self.changes = changes
        self._engine = e = engine
        self.D, self.S, self.B, self.C = e.D, e.Sself, e.Bself, e.C
        self.NH, self.PH, self.S_neighbor, self.B_neighbor = e.NH, e.PH, e.Snb, e.Bnb


class _StateView(PhaseView):
    def __init__(self, phase, engine, changes):
        self.phase = phase
        self.changes = changes
        self._engine = engine
        self._states = engine.states
        self._g = engine.g

    def _arcs(self, attr: str, dtype) -> np.ndarray:
        indptr, indices, _ = self._g.csr
        n = self._g.n
        out = np.zeros((len(indices), n), dtype=dtype)
        for v, st in enumerate(self._states):
            for j in range(indptr[v], indptr[v + 1]):
                u = int(indices[j])
                if attr in ("NH", "PH"):
                    sets = getattr(st, attr)
                    out[j] = [u in sets[t] for t in range(n)]
                else:
                    out[j] = getattr(st, attr)[u]
        return out

    def _dtype(self):
        return object if self._states[0].arithmetic == "rational" else np.float64

    @cached_property
    def D(self):
        return np.array([st.D for st in self._states], dtype=np.int64)

    @cached_property
    def S(self):
        return np.array([st.S[st.node] for st in self._states], dtype=object)

    @cached_property
    def B(self):
        rows = [st.B[st.node] for st in self._states]
        return np.array(rows, dtype=self._dtype())

    @cached_property
    def C(self):
        return np.array([st.C for st in self._states], dtype=self._dtype())

    @cached_property
    def NH(self):
        return self._arcs("NH", bool)

    @cached_property
    def PH(self):
        return self._arcs("PH", bool)

    @cached_property
    def S_neighbor(self):
        return self._arcs("S", object)

    @cached_property
    def B_neighbor(self):
        return self._arcs("B", self._dtype())


Observer = Callable[[PhaseView], None]


# --------------------------------------------------------------------------
# Engines
# --------------------------------------------------------------------------


class _PythonEngine:
    view_cls = _StateView

    def __init__(self, g: Graph, mode: str, arithmetic: str, bigint: bool):
        self.g = g
        self.mode = mode
        self.receive = proto.RECEIVERS[mode]
        self.states = proto.init_graph(g, arithmetic, bigint)

    def step(self, schedule: Schedule, phase: int) -> np.ndarray:
        g, n = self.g, self.g.n
        outboxes = [proto.build_outbox(st) for st in self.states]
        changes = np.zeros(n, dtype=np.int64)
        for v, st in enumerate(self.states):
            before = st.fingerprint()
            adj = g.adjacency[v]
            total = len(adj) * n
            if schedule.order == "shuffle":
                order: Iterable[int] = _kernel.message_order(schedule.seed, phase, v, total).tolist()
            else:
                order = range(total)
            if self.mode == "reference":
                for m in order:
                    u, w = adj[m // n]
                    proto.receive_reference(st, u, outboxes[u][m % n], w, update_c=False)
                proto.recompute_centrality(st)
            else:
                receive = self.receive
                for m in order:
                    u, w = adj[m // n]
                    receive(st, u, outboxes[u][m % n], w)
            changes[v] = _diff_mask(before, st.fingerprint(), v)
        return changes

    @property
    def counters(self) -> tuple[int, int]:
        return (sum(st.counter.messages for st in self.states),
                sum(st.counter.ops for st in self.states))

    def node_state(self, v: int) -> proto.NodeState:
        return self.states[v]


def _diff_mask(a: tuple, b: tuple, v: int) -> int:
    mask = 0
    if a[0] != b[0]:
        mask |= CH_D
    if a[1] != b[1]:
        mask |= CH_NH
    if a[2] != b[2]:
        mask |= CH_PH
    for (u, ra), (_, rb) in zip(a[3], b[3]):
        if ra != rb:
            mask |= CH_S if u == v else CH_SNB
    for (u, ra), (_, rb) in zip(a[4], b[4]):
        if ra == rb:
            continue
        if u != v:
            mask |= CH_BNB
            continue
        if ra[v] != rb[v]:
            mask |= CH_BSELF
        if ra[:v] != rb[:v] or ra[v + 1:] != rb[v + 1:]:
            mask |= CH_B
    if a[5] != b[5]:
        mask |= CH_C
    return mask


class _CompiledEngine:
    view_cls = _ArrayView

    def __init__(self, g: Graph, mode: str):
        self.g = g
        self.mode = mode
        self.code = {"bellman_ford": _kernel.MODE_BF, "reference": _kernel.MODE_REF,
                     "fast": _kernel.MODE_FAST}[mode]
        n = g.n
        self.indptr, self.indices, self.weights = g.csr
        arcs = len(self.indices)
        self.D = np.full((n, n), _kernel.INF, dtype=np.int64)
        np.fill_diagonal(self.D, 0)
        self.Sself = np.zeros((n, n), dtype=np.int64)
        np.fill_diagonal(self.Sself, 1)
        self.Bself = np.zeros((n, n))
        self.C = np.zeros(n)
        self.NH = np.zeros((arcs, n), dtype=np.bool_)
        self.PH = np.zeros((arcs, n), dtype=np.bool_)
        self.Snb = np.zeros((arcs, n), dtype=np.int64)
        self.Bnb = np.zeros((arcs, n))
        self.A = np.zeros((arcs, n))
        self.msgs = np.zeros(n, dtype=np.int64)
        self.ops = np.zeros(n, dtype=np.int64)

    def step(self, schedule: Schedule, phase: int) -> np.ndarray:
        changes = np.zeros(self.g.n, dtype=np.int64)
        status = _kernel.run_phase(
            self.code, self.indptr, self.indices, self.weights,
            self.D, self.NH, self.PH, self.Snb, self.Sself, self.Bnb, self.Bself, self.A, self.C,
            schedule.order == "shuffle", schedule.seed, phase, changes, self.msgs, self.ops,
        )
        if status < 0:
            raise proto.CountOverflowError(f"path count overflow at node {-status - 1}")
        return changes

    @property
    def counters(self) -> tuple[int, int]:
        return int(self.msgs.sum()), int(self.ops.sum())

    def node_state(self, v: int) -> proto.NodeState:
        """Materialize node ``v`` as a :class:`NodeState` (for inspection and traces)."""
        g, n = self.g, self.g.n
        st = proto.init(v, n, g.neighbors(v))
        st.D = [int(x) for x in self.D[v]]
        st.S[v] = [int(x) for x in self.Sself[v]]
        st.B[v] = [float(x) for x in self.Bself[v]]
        st.C = float(self.C[v])
        for j in range(self.indptr[v], self.indptr[v + 1]):
            u = int(self.indices[j])
            st.S[u] = [int(x) for x in self.Snb[j]]
            st.B[u] = [float(x) for x in self.Bnb[j]]
            st.A[u] = [float(x) for x in self.A[j]]
            for t in np.flatnonzero(self.NH[j]):
                st.NH[t].add(u)
            for t in np.flatnonzero(self.PH[j]):
                st.PH[t].add(u)
        st.counter.messages = int(self.msgs[v])
        st.counter.ops = int(self.ops[v])
        return st


# --------------------------------------------------------------------------
# Runs
# --------------------------------------------------------------------------


@dataclass
class SimulationRun:
    graph: Graph
    mode: str
    arithmetic: str
    schedule: Schedule
    engine_name: str
    phases_run: int = 0
    converged: bool = False
    quiescence_phase: int = 0
    last_change: dict[str, int] = field(default_factory=dict)
    T_D: np.ndarray | None = None
    T_S: np.ndarray | None = None
    T_C: np.ndarray | None = None
    C_history: list[np.ndarray] = field(default_factory=list)
    digests: list[str] = field(default_factory=list)
    snapshots: list[dict] = field(default_factory=list)
    messages: int = 0
    ops: int = 0
    _engine: object = field(default=None, repr=False)

    @property
    def full_quiescence_phase(self) -> int:
        """Last phase in which anything changed, neighbor copies included."""
        return max(self.last_change.values())

    @property
    def c_quiescence_phase(self) -> int:
        return self.last_change["C"]

    @property
    def C(self) -> np.ndarray:
        return self.C_history[-1]

    def centrality(self) -> np.ndarray:
        n = self.graph.n
        if n < 3:
            raise ValueError("betweenness normalization needs n >= 3")
        return self.C / ((n - 1) * (n - 2))

    def node_state(self, v: int) -> proto.NodeState:
        return self._engine.node_state(v)

    def view(self) -> PhaseView:
        return self._engine.view_cls(self.phases_run, self._engine, np.zeros(self.graph.n, dtype=np.int64))

    @property
    def ops_per_message(self) -> float:
        return self.ops / self.messages if self.messages else 0.0


def _digest(view: PhaseView) -> str:
    h = hashlib.sha256()
    for name in ("D", "S", "B", "C", "NH", "PH", "S_neighbor", "B_neighbor"):
        arr = getattr(view, name)
        if arr.dtype == object:
            h.update(repr(arr.tolist()).encode())
        else:
            h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


def _snapshot(view: PhaseView) -> dict:
    return {name: np.array(getattr(view, name), copy=True)
            for name in ("D", "S", "B", "C", "NH", "PH", "S_neighbor", "B_neighbor")}


def _pick_engine(engine: str, arithmetic: str, bigint: bool) -> str:
    if engine == "auto":
        return "python" if arithmetic == "rational" or bigint else "compiled"
    if engine == "compiled" and (arithmetic == "rational" or bigint):
        raise ValueError("the compiled engine supports float arithmetic with int64 counts only")
    if engine not in ("python", "compiled"):
        raise ValueError(f"unknown engine {engine!r}")
    return engine


def run(
    g: Graph,
    mode: str = "fast",
    schedule: Schedule | None = None,
    observers: Sequence[Observer] = (),
    arithmetic: str = "float",
    bigint: bool = False,
    engine: str = "auto",
    keep_snapshots: bool = False,
    digests: bool = False,
    strict: bool = True,
) -> SimulationRun:
    """Simulate ``mode`` on ``g`` until nothing changes for a whole phase.

    Raises
    :class:`NonConvergenceError` when the cap is hit (unless ``strict=False``).
    """
    if mode not in proto.MODES:
        raise ValueError(f"mode must be one of {proto.MODES}")
    if arithmetic not in proto.ARITHMETICS:
        raise ValueError(f"arithmetic must be one of {proto.ARITHMETICS}")
    schedule = schedule or Schedule()
    name = _pick_engine(engine, arithmetic, bigint)
    eng = _PythonEngine(g, mode, arithmetic, bigint) if name == "python" else _CompiledEngine(g, mode)
    n = g.n
    result = SimulationRun(g, mode, arithmetic, schedule, name, _engine=eng)
    result.last_change = {k: 0 for k in FIELD_BITS}
    T_D = np.zeros(n, dtype=np.int64)
    T_S = np.zeros(n, dtype=np.int64)
    T_C = np.zeros(n, dtype=np.int64)

    def observe(phase: int, changes: np.ndarray) -> None:
        view = eng.view_cls(phase, eng, changes)
        result.C_history.append(np.array(view.C, copy=True))
        if digests:
            result.digests.append(_digest(view))
        if keep_snapshots:
            result.snapshots.append(_snapshot(view))
        for obs in observers:
            obs(view)

    observe(0, np.zeros(n, dtype=np.int64))
    cap = schedule.cap(n)
    for phase in range(1, cap + 1):
        changes = eng.step(schedule, phase)
        result.phases_run = phase
        for key, bit in FIELD_BITS.items():
            if np.any(changes & bit):
                result.last_change[key] = phase
        T_D[(changes & CH_D) != 0] = phase
        T_S[(changes & CH_S) != 0] = phase
        T_C[(changes & CH_C) != 0] = phase
        observe(phase, changes)
        if not changes.any():
            result.converged = True
            break
    result.T_D, result.T_S, result.T_C = T_D, T_S, T_C
    result.messages, result.ops = eng.counters
    result.quiescence_phase = max(result.last_change[k] for k in NODE_FIELDS)
    if not result.converged:
        if strict:
            raise NonConvergenceError(result)
    return result


def record_local_convergence(run_: SimulationRun, oracle_bc_raw: Sequence | None = None,
                             rel_tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Per-node ``(T_D, T_C)``: last phase at which the distance row / the centrality changed.

    With ``oracle_bc_raw`` the final centralities are checked against it first.
    """
    if not run_.converged:
        raise NonConvergenceError(run_)
    if oracle_bc_raw is not None:
        truth = np.asarray([float(x) for x in oracle_bc_raw])
        got = np.asarray([float(x) for x in run_.C])
        scale = max(float(np.abs(truth).max()), 1.0)
        if np.any(np.abs(got - truth) > rel_tol * scale):
            raise ValueError("run did not converge to the oracle centralities")
    return run_.T_D.copy(), run_.T_C.copy()
