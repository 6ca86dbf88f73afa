"""Random model builders and brute-force oracles shared by the tests."""

import itertools

import numpy as np

from symve import CompactFactor, DenseFactor, FactorGraph, decode
from symve.graph import run_elimination
from symve.symmetry import compact_domain_size

SYM3_TABLE = [1, 2, 2, 3, 2, 3, 3, 4]


def sym3_factor(scope=(1, 2, 3)):
    return DenseFactor(scope, (2, 2, 2), SYM3_TABLE)


def rel_close(a, b, tol):
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def random_partition(rng, scope, cards):
    """Random disjoint groups of equal-cardinality variables (may be empty)."""
    by_card = {}
    for v, c in zip(scope, cards):
        by_card.setdefault(c, []).append(v)
    groups = []
    for vs in by_card.values():
        vs = list(rng.permutation(vs))
        while len(vs) >= 2 and rng.random() < 0.7:
            size = int(rng.integers(2, len(vs) + 1))
            groups.append(tuple(int(v) for v in vs[:size]))
            vs = vs[size:]
    return groups


def random_compact(rng, scope, cards, groups, integer=False):
    cm = dict(zip(scope, cards))
    grouped = {v for g in groups for v in g}
    free = [v for v in scope if v not in grouped]
    size = int(np.prod([cm[v] for v in free])) if free else 1
    for g in groups:
        size *= compact_domain_size(len(g), cm[g[0]])
    values = rng.integers(0, 10, size).astype(float) if integer else rng.uniform(0.1, 2.0, size)
    return CompactFactor(free, [cm[v] for v in free], groups, [cm[g[0]] for g in groups], values)


def random_dense(rng, scope, cards):
    size = int(np.prod(cards)) if cards else 1
    return DenseFactor(scope, cards, rng.uniform(0.1, 2.0, size))


def random_graph(rng, n, k, max_arity=4, card=2, sym_prob=0.5, cards=None):
    """Graph with ``k`` factors, a mix of symmetric (compact) and plain dense ones."""
    cards = cards or {v: card for v in range(n)}
    factors = []
    for _ in range(k):
        arity = int(rng.integers(1, min(max_arity, n) + 1))
        scope = sorted(int(v) for v in rng.choice(n, size=arity, replace=False))
        fc = [cards[v] for v in scope]
        if rng.random() < sym_prob:
            groups = random_partition(rng, scope, fc) or ([tuple(scope)] if len(set(fc)) == 1 else [])
            factors.append(random_compact(rng, scope, fc, groups))
        else:
            factors.append(random_dense(rng, scope, fc))
    return FactorGraph(cards, factors)


def densify(graph):
    """Same graph with every compact factor decoded (declared symmetries dropped)."""
    return FactorGraph(
        graph.variables,
        [decode(f) if isinstance(f, CompactFactor) else f for f in graph.factors],
    )


def enumerate_orders(graph, cost_model="dense", totals="full"):
    """Optimal total and lexicographically first optimal order, no pruning."""
    best = None
    for order in itertools.permutations(sorted(graph.variables)):
        _, ledger = run_elimination(graph.structural(), order, "cost_only")
        total = ledger.total(cost_model, totals)
        if best is None or total < best[1]:
            best = (order, total)
    return best


def brute_force_histograms(n, d):
    """Distinct histograms seen when enumerating all ``d**n`` assignments."""
    seen = set()
    for a in itertools.product(range(d), repeat=n):
        seen.add(tuple(a.count(v) for v in range(d)))
    return sorted(seen)
