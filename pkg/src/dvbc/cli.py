"""Command-line experiment driver.

Subcommands::

    dvbc gen SPEC [--weights unit|random] [--seed N] [-o FILE]
    dvbc run [--config FILE] [--graph FILE | --generate SPEC] [...] [--out DIR]
    dvbc sweep --generate SPEC --samples K --seed N [...] [--out DIR]
    dvbc oracle GRAPH [-o FILE]
    dvbc trace GRAPH [--mode M] [--phases P] [-o FILE]

Exit status: 0 success, 1 bound or assertion failure, 2 input error,
3 non-convergence. Failures print one JSON object to stderr.

Seeds: a sweep with global seed ``G`` uses ``sub_seed(G, i, 0)`` for the
graph of sample ``i`` and ``sub_seed(G, i, 1)`` for its shuffle schedule.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import metrics as met
from . import oracle as orc
from .graph import (
    DEFAULT_DECIMALS,
    Graph,
    GraphError,
    compute_metrics,
    dump_edge_list,
    generate,
    parse_generator_spec,
    read_edge_list,
    sub_seed,
)
from .protocol import ARITHMETICS, MODES, ProtocolError
from .simulator import NonConvergenceError, Schedule, run

EXIT_OK, EXIT_BOUND, EXIT_INPUT, EXIT_NONCONVERGENCE = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Everything that pins a run. Serialized as a flat JSON object."""

    graph: str | None = None  # edge-list path
    generator: str | None = None  # e.g. "erdos_renyi:n=100,p=0.05"
    weights: str = "unit"
    seed: int = 0
    decimals: int = DEFAULT_DECIMALS
    mode: str = "fast"
    arithmetic: str = "float"
    order: str = "canonical"
    shuffle_seed: int = 0
    max_phases: int | None = None
    bigint: bool = False
    out: str = "out"
    outputs: list[str] = field(default_factory=lambda: ["errors", "nodes", "histogram"])
    samples: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise InputError(f"unknown config keys: {sorted(extra)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise InputError("config must be a JSON object")
        return cls.from_dict(data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def validate(self) -> None:
        if (self.graph is None) == (self.generator is None):
            raise InputError("give exactly one of 'graph' or 'generator'")
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}")
        if self.arithmetic not in ARITHMETICS:
            raise InputError(f"arithmetic must be one of {ARITHMETICS}")
        if self.order not in ("canonical", "shuffle"):
            raise InputError("order must be 'canonical' or 'shuffle'")
        if self.samples < 1:
            raise InputError("samples must be positive")

    def load_graph(self, seed: int | None = None) -> Graph:
        if self.graph is not None:
            try:
                return read_edge_list(self.graph, self.decimals)
            except OSError as exc:
                raise InputError(f"{self.graph}: {exc.strerror or exc}") from None
        family, params = parse_generator_spec(self.generator)
        return generate(family, params, self.weights, self.seed if seed is None else seed,
                        decimals=self.decimals)

    def schedule(self, seed: int | None = None) -> Schedule:
        return Schedule(self.order, self.shuffle_seed if seed is None else seed, self.max_phases)


# --------------------------------------------------------------------------
# Core
# --------------------------------------------------------------------------


def simulate(cfg: ExperimentConfig, g: Graph, schedule: Schedule) -> tuple[dict, met.ConvergenceRecord | None]:
    """One run plus oracle comparison. Returns the summary and the record (None when the error is undefined)."""
    exact = cfg.arithmetic == "rational"
    m = compute_metrics(g)
    truth = orc.brandes(g, exact=exact)
    r = run(g, cfg.mode, schedule, arithmetic=cfg.arithmetic, bigint=cfg.bigint)
    bound = 2 * m.Diam + 1
    summary = {
        "graph": g.name,
        "n": g.n,
        "m": g.m,
        "mode": cfg.mode,
        "arithmetic": cfg.arithmetic,
        "order": schedule.order,
        "shuffle_seed": schedule.seed,
        "phases_run": r.phases_run,
        "quiescence_phase": r.quiescence_phase,
        "full_quiescence_phase": r.full_quiescence_phase,
        "c_quiescence_phase": r.c_quiescence_phase,
        "diam": m.diam,
        "Diam": m.Diam,
        "bound": bound,
        "bound_ok": r.quiescence_phase <= bound if cfg.mode != "bellman_ford" else r.quiescence_phase <= m.diam,
        "messages": r.messages,
        "ops_per_message": r.ops_per_message,
    }
    record = None
    if cfg.mode != "bellman_ford" and g.n >= 3:
        try:
            record = met.ConvergenceRecord.from_run(r, truth.bc_raw, m)
            summary["final_error"] = record.errors[-1]
        except met.UndefinedMetricError:
            summary["final_error"] = None
        got = np.asarray([float(x) for x in r.C])
        want = np.asarray([float(x) for x in truth.bc_raw])
        scale = max(float(np.abs(want).max()), 1.0)
        summary["oracle_max_abs_error"] = float(np.abs(got - want).max()) / ((g.n - 1) * (g.n - 2))
        summary["oracle_ok"] = bool(np.all(np.abs(got - want) <= 1e-9 * scale))
        if exact:
            summary["oracle_ok"] = all(a == b for a, b in zip(r.C, truth.bc_raw))
    return summary, record


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def write_outputs(out: Path, cfg: ExperimentConfig, summary: dict, record) -> None:
    if record is not None:
        writers = {"errors": met.errors_csv, "nodes": met.nodes_csv, "histogram": met.histogram_csv}
        for name in cfg.outputs:
            if name not in writers:
                raise InputError(f"unknown output {name!r}")
            _write(out / f"{name}.csv", writers[name](record))
    _write(out / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write(out / "config.json", cfg.to_json() + "\n")


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def _config_from_args(args) -> ExperimentConfig:
    base = asdict(ExperimentConfig.load(args.config)) if args.config else {}
    for key in ("graph", "generator", "weights", "seed", "mode", "arithmetic", "order",
                "shuffle_seed", "max_phases", "out", "samples"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    if args.graph is not None:
        base["generator"] = None
    elif args.generator is not None:
        base["graph"] = None
    return ExperimentConfig.from_dict(base)


def cmd_gen(args) -> int:
    family, params = parse_generator_spec(args.spec)
    g = generate(family, params, args.weights, args.seed)
    text = dump_edge_list(g)
    if args.output:
        _write(Path(args.output), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    g = cfg.load_graph()
    summary, record = simulate(cfg, g, cfg.schedule())
    write_outputs(Path(cfg.out), cfg, summary, record)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK if summary["bound_ok"] and summary.get("oracle_ok", True) else EXIT_BOUND


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    if cfg.generator is None:
        raise InputError("sweep needs a generator spec")
    out = Path(cfg.out)
    rows, curves = [], []
    ok = True
    for i in range(cfg.samples):
        g = cfg.load_graph(seed=sub_seed(cfg.seed, i, 0))
        summary, record = simulate(cfg, g, cfg.schedule(seed=sub_seed(cfg.seed, i, 1)))
        summary["sample"] = i
        rows.append(summary)
        ok &= summary["bound_ok"] and summary.get("oracle_ok", True)
        if record is not None:
            curves.append(record.errors)
            write_outputs(out / f"sample_{i:03d}", cfg, summary, record)
    keys = ["sample", "graph", "n", "diam", "Diam", "quiescence_phase", "bound", "bound_ok", "final_error"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    w.writerows([[r.get(k) for k in keys] for r in rows])
    _write(out / "sweep.csv", buf.getvalue())
    if curves:
        length = max(len(c) for c in curves)
        # a converged curve stays at its final value
        padded = np.array([c + [c[-1]] * (length - len(c)) for c in curves])
        mean = padded.mean(axis=0)
        _write(out / "mean_error.csv",
               "phase,mean_global_error\n" + "".join(f"{p},{e!r}\n" for p, e in enumerate(mean.tolist())))
    _write(out / "config.json", cfg.to_json() + "\n")
    print(json.dumps({"samples": len(rows), "bound_ok": ok}))
    return EXIT_OK if ok else EXIT_BOUND


def oracle_csv(g: Graph) -> str:
    m = compute_metrics(g)
    e = orc.brandes(g, exact=True)
    bc = e.bc
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node_id", "degree", "ecc_hop", "bc_raw", "bc", "f_v"])
    for v in range(g.n):
        f = orc.optimal_frequency(g.degree(v), bc[v])
        w.writerow([v, g.degree(v), int(m.ecc_hop[v]), repr(float(e.bc_raw[v])), repr(float(bc[v])), repr(f)])
    return buf.getvalue()


def cmd_oracle(args) -> int:
    g = read_edge_list(args.graph)
    if g.n < 3:
        raise InputError("betweenness needs at least 3 nodes")
    text = oracle_csv(g)
    if args.output:
        _write(Path(args.output), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def trace_lines(g: Graph, mode: str = "fast", phases: int | None = None, arithmetic: str = "rational"):
    """JSON-lines records ``{"phase", "node", "state"}`` for phases ``0..`` up to quiescence or ``phases``."""
    lines: list[str] = []

    def observer(view) -> None:
        for v in range(g.n):
            st = view.node_state(v)
            rec = {"phase": view.phase, "node": v, "state": st.to_json(g.decimals, render_unknown=True)}
            lines.append(json.dumps(rec, sort_keys=True))

    run(g, mode, Schedule(max_phases=phases), observers=[observer], arithmetic=arithmetic,
        engine="python", strict=False)
    return lines


def cmd_trace(args) -> int:
    g = read_edge_list(args.graph)
    text = "".join(line + "\n" for line in trace_lines(g, args.mode, args.phases, args.arithmetic))
    if args.output:
        _write(Path(args.output), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its keys")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--graph", help="edge-list file")
    src.add_argument("--generate", dest="generator", metavar="SPEC", help="generator spec, e.g. cycle:n=6")
    p.add_argument("--weights", choices=("unit", "random"))
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--arithmetic", choices=ARITHMETICS)
    p.add_argument("--order", choices=("canonical", "shuffle"))
    p.add_argument("--shuffle-seed", type=int)
    p.add_argument("--max-phases", type=int)
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dvbc", description="Distance-vector betweenness centrality experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a generated graph as an edge list")
    p.add_argument("spec")
    p.add_argument("--weights", choices=("unit", "random"), default="unit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="simulate one graph and write CSV artifacts")
    _add_run_options(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="seeded samples of a generator")
    _add_run_options(p)
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="centralized betweenness as CSV")
    p.add_argument("graph")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("trace", help="per-phase node states as JSON lines")
    p.add_argument("graph")
    p.add_argument("--mode", choices=MODES, default="fast")
    p.add_argument("--arithmetic", choices=ARITHMETICS, default="rational")
    p.add_argument("--phases", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_trace)
    return parser


def _fail(code: int, kind: str, exc: BaseException) -> int:
    print(json.dumps({"error": kind, "message": str(exc), "exit_code": code}), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NonConvergenceError as exc:
        return _fail(EXIT_NONCONVERGENCE, "non_convergence", exc)
    except (GraphError, InputError) as exc:
        return _fail(EXIT_INPUT, "input", exc)
    except ProtocolError as exc:
        return _fail(EXIT_BOUND, "protocol", exc)
    except OSError as exc:
        return _fail(EXIT_INPUT, "io", exc)
    except ValueError as exc:
        return _fail(EXIT_INPUT, "input", exc)


if __name__ == "__main__":
    sys.exit(main())
