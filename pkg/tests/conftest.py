import numpy as np
import pytest

from dvbc.graph import Graph, compute_metrics, generate, load_edge_list


def c6() -> Graph:
    return generate("cycle", {"n": 6})


def p3() -> Graph:
    return load_edge_list("0 1 1\n1 2 1")


def four_cycle_weighted() -> Graph:
    # the weight-3 edge ties with the three-hop detour
    return load_edge_list("0 1 1\n1 2 1\n2 3 1\n0 3 3")


def small_named() -> list[Graph]:
    out = [p3(), four_cycle_weighted(), c6()]
    for n in range(3, 9):
        out.append(generate("path", {"n": n}))
        out.append(generate("cycle", {"n": n}))
    for k in range(2, 7):
        out.append(generate("star", {"k": k}))
    for n in range(3, 6):
        out.append(generate("complete", {"n": n}))
    out += [generate("grid", {"w": 3, "h": 2}), generate("hypercube", {"d": 3}),
            generate("binary_tree", {"h": 2})]
    return out


def random_small(seed: int, n_max: int = 8) -> Graph:
    """Connected graph with 3..n_max nodes; half of them get {1,2,5} weights."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, n_max + 1))
    p = float(rng.uniform(0.25, 0.6))
    weights = "random" if seed % 2 else "unit"
    return generate("erdos_renyi", {"n": n, "p": p}, weights, seed)


@pytest.fixture(scope="session")
def c6_graph():
    return c6()


@pytest.fixture(scope="session")
def c6_metrics():
    return compute_metrics(c6())


# one line per acceptance criterion, printed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
