"""Named, seeded collections of test graphs."""

from __future__ import annotations

from typing import Iterator

from .graph import Graph, compute_metrics, generate, sub_seed

ER_DENSITY = {10: 0.4, 20: 0.25, 30: 0.18, 50: 0.12, 80: 0.07, 120: 0.05, 200: 0.035, 500: 0.012}
GEO_RADIUS = {10: 0.5, 20: 0.4, 50: 0.27, 100: 0.19, 200: 0.14}


def lattice_graphs() -> Iterator[Graph]:
    for w, h in [(2, 2), (3, 2), (3, 3), (4, 3), (5, 5), (7, 6), (8, 8), (10, 10), (12, 9), (15, 15), (20, 20)]:
        yield generate("grid", {"w": w, "h": h})
    for w, h in [(3, 3), (5, 4), (7, 6)]:
        yield generate("grid", {"w": w, "h": h}, weights="random", seed=w * h)
    for d in range(1, 9):
        yield generate("hypercube", {"d": d})
    for d in range(2, 7):
        yield generate("hypercube", {"d": d}, weights="random", seed=d)
    for h in range(1, 9):
        yield generate("binary_tree", {"h": h})
    for h in range(2, 6):
        yield generate("binary_tree", {"h": h}, weights="random", seed=h)
    for n in (3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20, 25, 30, 40):
        yield generate("cycle", {"n": n})
    for n in (5, 6, 9, 12, 20, 30):
        yield generate("cycle", {"n": n}, weights="random", seed=n)
    for n in (3, 5, 8):
        yield generate("path", {"n": n})
    for k in (3, 6):
        yield generate("star", {"k": k})
    for n in (3, 4, 5):
        yield generate("complete", {"n": n})


def random_graphs(seed: int = 2024) -> Iterator[Graph]:
    for n in (10, 20, 30, 50, 80, 120, 200):
        for i in range(6):
            for weights in ("unit", "random"):
                yield generate("erdos_renyi", {"n": n, "p": ER_DENSITY[n]}, weights, sub_seed(seed, 1, n, i))
    for n in (10, 20, 50, 100, 200):
        for m in (1, 2, 3):
            for i in range(2):
                yield generate("barabasi_albert", {"n": n, "m": m}, "unit", sub_seed(seed, 2, n, m, i))
        yield generate("barabasi_albert", {"n": n, "m": 2}, "random", sub_seed(seed, 3, n))
        yield generate("barabasi_albert", {"n": n, "m": 3}, "random", sub_seed(seed, 4, n))
    for n in (10, 20, 50, 100, 200):
        for i in range(5):
            yield generate("geometric", {"n": n, "r": GEO_RADIUS[n]}, "unit", sub_seed(seed, 5, n, i))
        for i in range(2):
            yield generate("geometric", {"n": n, "r": GEO_RADIUS[n]}, "random", sub_seed(seed, 6, n, i))


def theorem_suite(seed: int = 2024) -> list[Graph]:
    """Lattices, trees, cycles and random families (226 graphs, n <= 511)."""
    return [*lattice_graphs(), *random_graphs(seed)]


def weighted_er_suite(n: int = 100, samples: int = 20, seed: int = 7) -> list[Graph]:
    """Erdos-Renyi graphs with weights drawn from {1, 2, 5}."""
    p = ER_DENSITY.get(n, min(1.0, 3.0 / n))
    return [generate("erdos_renyi", {"n": n, "p": p}, "random", sub_seed(seed, n, i)) for i in range(samples)]


def er_with_diameter(n: int, p: float, diameter: int, samples: int, seed: int = 0,
                     weights: str = "unit", max_draws: int = 2000) -> list[Graph]:
    """Draw ER graphs until ``samples`` of them have the requested unweighted hop-diameter."""
    out: list[Graph] = []
    for i in range(max_draws):
        g = generate("erdos_renyi", {"n": n, "p": p}, "unit", sub_seed(seed, i))
        if compute_metrics(g).diam != diameter:
            continue
        if weights != "unit":
            g = generate("erdos_renyi", {"n": n, "p": p}, weights, sub_seed(seed, i))
        out.append(g)
        if len(out) == samples:
            return out
    raise RuntimeError(f"only {len(out)} ER({n}, {p}) graphs with diameter {diameter} in {max_draws} draws")
