"""Experimental quantities computed from simulation runs."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import GraphMetrics
from .simulator import NonConvergenceError, SimulationRun


class UndefinedMetricError(ValueError):
    pass


def global_error(current_C: Sequence, oracle_bc_raw: Sequence) -> float:
    """Relative l2 distance between the running and the true (unnormalized) centralities.

    Normalization by ``(n-1)(n-2)`` cancels, so raw values are used on both sides.
    Exact inputs (``Fraction``) are evaluated exactly up to the final square root.
    """
    diff2 = sum((b - c) * (b - c) for b, c in zip(oracle_bc_raw, current_C))
    norm2 = sum(b * b for b in oracle_bc_raw)
    if norm2 == 0:
        raise UndefinedMetricError("every node has zero centrality; global error undefined")
    return math.sqrt(diff2 / norm2)


def error_curve(run: SimulationRun, oracle_bc_raw: Sequence) -> list[float]:
    """Global error after every phase ``0..phases_run``."""
    return [global_error(C, oracle_bc_raw) for C in run.C_history]


@dataclass
class ConvergenceRecord:
    errors: list[float]
    T_D: np.ndarray
    T_C: np.ndarray
    bc: np.ndarray
    ecc_hop: np.ndarray
    quiescence_phase: int
    Diam: int
    diam: int

    @classmethod
    def from_run(cls, run: SimulationRun, oracle_bc_raw: Sequence, m: GraphMetrics) -> "ConvergenceRecord":
        if not run.converged:
            raise NonConvergenceError(run)
        n = run.graph.n
        raw = np.asarray([float(x) for x in oracle_bc_raw])
        return cls(
            errors=error_curve(run, oracle_bc_raw),
            T_D=run.T_D.copy(),
            T_C=run.T_C.copy(),
            bc=raw / ((n - 1) * (n - 2)),
            ecc_hop=m.ecc_hop.copy(),
            quiescence_phase=run.quiescence_phase,
            Diam=m.Diam,
            diam=m.diam,
        )

    def increases_after(self, phase: int, tol: float = 1e-12) -> list[int]:
        """Phases ``p >= phase`` where the error went up (``e[p] > e[p-1] + tol``)."""
        e = self.errors
        return [p for p in range(max(phase, 1), len(e)) if e[p] > e[p - 1] + tol]


def convergence_histogram(record: ConvergenceRecord) -> tuple[dict[int, int], int]:
    """Counts of nodes whose centrality last changed at each phase ``>= 1``, plus the ``T_C == 0`` count."""
    counts = Counter(int(x) for x in record.T_C)
    zero = counts.pop(0, 0)
    return dict(sorted(counts.items())), zero


def eccentricity_report(record: ConvergenceRecord, top_k: int = 10) -> dict[str, float]:
    order = np.argsort(-record.bc, kind="stable")[:top_k]
    return {
        "mean_ecc": float(record.ecc_hop.mean()),
        "top_k": int(min(top_k, len(order))),
        "top_k_mean_ecc": float(record.ecc_hop[order].mean()),
    }


# CSV writers -------------------------------------------------------------


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def errors_csv(record: ConvergenceRecord) -> str:
    return _csv(("phase", "global_error"), ((p, repr(e)) for p, e in enumerate(record.errors)))


def nodes_csv(record: ConvergenceRecord) -> str:
    return _csv(
        ("node", "bc", "ecc", "T_D", "T_C"),
        ((v, repr(float(record.bc[v])), int(record.ecc_hop[v]), int(record.T_D[v]), int(record.T_C[v]))
         for v in range(len(record.bc))),
    )


def histogram_csv(record: ConvergenceRecord) -> str:
    counts, zero = convergence_histogram(record)
    return _csv(("phase", "count"), [(0, zero), *counts.items()])
