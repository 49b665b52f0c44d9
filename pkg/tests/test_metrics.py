import csv
import io
from fractions import Fraction

import numpy as np
import pytest

from dvbc.graph import compute_metrics, generate
from dvbc.metrics import (
    ConvergenceRecord,
    UndefinedMetricError,
    convergence_histogram,
    eccentricity_report,
    error_curve,
    errors_csv,
    global_error,
    histogram_csv,
    nodes_csv,
)
from dvbc.oracle import brandes
from dvbc.simulator import NonConvergenceError, Schedule, run


def record_for(g, arithmetic="float"):
    r = run(g, "fast", arithmetic=arithmetic)
    e = brandes(g, exact=arithmetic == "rational")
    return ConvergenceRecord.from_run(r, e.bc_raw, compute_metrics(g))


def test_global_error_endpoints():
    truth = [4.0, 4.0, 0.0]
    assert global_error([0, 0, 0], truth) == 1.0
    assert global_error(truth, truth) == 0.0
    assert global_error([3.0, 4.0, 0.0], truth) == pytest.approx(1 / np.sqrt(32))


def test_global_error_undefined_for_complete_graphs():
    with pytest.raises(UndefinedMetricError):
        global_error([0, 0, 0], [0, 0, 0])


def test_global_error_exact_inputs():
    truth = [Fraction(1, 2), Fraction(3, 2)]
    assert global_error([Fraction(1, 2), Fraction(3, 2)], truth) == 0.0


def test_c6_curve_from_the_trace():
    g = generate("cycle", {"n": 6})
    r = run(g, "fast", arithmetic="rational")
    errs = error_curve(r, brandes(g).bc_raw)
    assert errs[0] == 1.0 and errs[-1] == 0.0
    C5 = r.C_history[5]
    assert errs[5] == pytest.approx(global_error(C5, [4] * 6))
    assert all(a >= b for a, b in zip(errs, errs[1:]))


def test_record_c6_histogram_symmetric():
    rec = record_for(generate("cycle", {"n": 6}), "rational")
    counts, zero = convergence_histogram(rec)
    assert zero == 0 and list(counts.values()) == [6]
    assert rec.errors[-1] == 0.0
    assert rec.T_D.max() <= rec.quiescence_phase and rec.T_C.max() <= rec.quiescence_phase


def test_star_histogram_and_eccentricity():
    rec = record_for(generate("star", {"k": 5}))
    counts, zero = convergence_histogram(rec)
    assert zero == 5 and sum(counts.values()) == 1
    rep = eccentricity_report(rec, top_k=1)
    assert rep["top_k_mean_ecc"] == 1.0
    assert rep["mean_ecc"] == pytest.approx((1 + 5 * 2) / 6)


def test_c6_eccentricity_report():
    rep = eccentricity_report(record_for(generate("cycle", {"n": 6})), top_k=3)
    assert rep["mean_ecc"] == rep["top_k_mean_ecc"] == 3.0


def test_scale_free_hubs_are_central():
    worse = []
    for seed in range(5):
        rec = record_for(generate("barabasi_albert", {"n": 200, "m": 2}, "unit", seed))
        rep = eccentricity_report(rec, top_k=10)
        worse.append(rep["top_k_mean_ecc"] < rep["mean_ecc"])
    assert all(worse)


def test_histogram_partitions_nodes():
    rec = record_for(generate("erdos_renyi", {"n": 60, "p": 0.08}, "random", 1))
    counts, zero = convergence_histogram(rec)
    assert zero + sum(counts.values()) == 60
    assert min(counts) >= 1


def test_increases_after():
    rec = ConvergenceRecord([1.0, 0.5, 0.7, 0.4, 0.45, 0.0], np.zeros(2), np.zeros(2), np.zeros(2),
                            np.zeros(2), 5, 3, 2)
    assert rec.increases_after(0) == [2, 4]
    assert rec.increases_after(3) == [4]


def test_nonconvergent_run_rejected():
    g = generate("cycle", {"n": 8})
    r = run(g, "fast", Schedule(max_phases=2), strict=False)
    with pytest.raises(NonConvergenceError):
        ConvergenceRecord.from_run(r, brandes(g).bc_raw, compute_metrics(g))


def test_csv_schemas():
    rec = record_for(generate("grid", {"w": 3, "h": 3}))
    rows = list(csv.reader(io.StringIO(errors_csv(rec))))
    assert rows[0] == ["phase", "global_error"] and len(rows) == len(rec.errors) + 1
    rows = list(csv.reader(io.StringIO(nodes_csv(rec))))
    assert rows[0] == ["node", "bc", "ecc", "T_D", "T_C"] and len(rows) == 10
    rows = list(csv.reader(io.StringIO(histogram_csv(rec))))
    assert rows[0] == ["phase", "count"]
    assert sum(int(c) for _, c in rows[1:]) == 9
    assert errors_csv(rec) == errors_csv(record_for(generate("grid", {"w": 3, "h": 3})))
