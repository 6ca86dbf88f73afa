from pathlib import Path

import numpy as np
import pytest

from helpers import enumerate_orders, random_graph
from symve import FactorGraph
from symve.errors import InvalidConfig, TooLarge
from symve.fgsym import load_model
from symve.graph import run_elimination
from symve.search import (
    OrderEnv,
    anneal_order,
    exhaustive_optimal,
    find_order,
    greedy_order,
    min_degree_order,
    random_order,
)

MODELS = Path(__file__).resolve().parent.parent / "models"


def chain4():
    return load_model(MODELS / "chain4.fgsym").graph


def test_greedy_chain():
    order, ledger = greedy_order(chain4())
    assert order == (0, 1, 2, 3)
    assert [s.dense_cost for s in ledger.steps] == [4, 4, 4, 2]
    assert exhaustive_optimal(chain4()) == ((0, 1, 2, 3), 14)


def test_greedy_ties_go_to_smallest_id():
    g = load_model(MODELS / "triangle.fgsym").graph
    order, ledger = greedy_order(g)
    assert order[0] == 0
    assert ledger.steps[0].dense_cost == 8


def test_min_degree_is_a_permutation():
    g = chain4()
    order, _ = min_degree_order(g)
    assert order[0] in (0, 3) and sorted(order) == [0, 1, 2, 3]


def test_env_totals_telescope():
    rng = np.random.default_rng(3)
    for _ in range(10):
        g = random_graph(rng, 7, 5)
        env = OrderEnv(g, "compact")
        state = env.reset()
        spent = 0
        for v in rng.permutation(7):
            state, cost = env.step(state, int(v))
            spent += cost
        assert state.done and state.actions == ()
        _, ledger = run_elimination(g, state.eliminated, "cost_only")
        assert spent == ledger.total("compact") == state.compact_total
        assert state.dense_total == ledger.total("dense")


def test_exhaustive_matches_enumeration():
    rng = np.random.default_rng(9)
    for _ in range(15):
        g = random_graph(rng, int(rng.integers(1, 7)), int(rng.integers(1, 6)), sym_prob=0.8)
        for cost in ("dense", "compact"):
            for totals in ("full", "paper"):
                ref_order, ref_total = enumerate_orders(g, cost, totals)
                order, total = exhaustive_optimal(g, cost, totals)
                assert total == ref_total
                assert order == ref_order


def test_greedy_and_anneal_bounded_below_by_exhaustive():
    rng = np.random.default_rng(17)
    for _ in range(20):
        g = random_graph(rng, int(rng.integers(2, 9)), int(rng.integers(2, 7)), max_arity=5, sym_prob=0.8)
        for cost in ("dense", "compact"):
            _, opt = exhaustive_optimal(g, cost)
            _, gl = greedy_order(g)
            _, al = anneal_order(g, cost, seed=1, budget=200)
            assert opt <= al.total(cost) <= gl.total(cost)


def test_anneal_budget_one_is_greedy_and_deterministic():
    rng = np.random.default_rng(23)
    g = random_graph(rng, 9, 6, sym_prob=0.8)
    assert anneal_order(g, budget=1)[0] == greedy_order(g)[0]
    assert anneal_order(g, "compact", seed=5, budget=300) == anneal_order(g, "compact", seed=5, budget=300)
    with pytest.raises(InvalidConfig):
        anneal_order(g, budget=0)


def test_random_order_deterministic():
    g = FactorGraph({v: 2 for v in range(12)})
    a, _ = random_order(g, 7)
    assert a == random_order(g, 7)[0]
    assert sorted(a) == list(range(12))
    assert a != random_order(g, 8)[0]


def test_exhaustive_limit():
    g = FactorGraph({v: 2 for v in range(11)})
    with pytest.raises(TooLarge):
        exhaustive_optimal(g)
    assert exhaustive_optimal(g, limit=11)[1] == 22


def test_find_order_dispatch():
    g = chain4()
    for kind in ("greedy_min_size", "min_degree", "random", "anneal", "exhaustive"):
        order, ledger = find_order(g, kind, budget=20)
        assert sorted(order) == [0, 1, 2, 3] and ledger.order == order
    with pytest.raises(InvalidConfig):
        find_order(g, "best")
    with pytest.raises(InvalidConfig):
        find_order(g, cost_model="fast")


def test_compact_optimum_differs_on_shipped_model():
    g = load_model(MODELS / "new_orders.fgsym").graph
    oc, tc = exhaustive_optimal(g, "compact")
    od, td = exhaustive_optimal(g, "dense")
    assert oc != od
    _, ledger = run_elimination(g, od, "cost_only")
    assert ledger.total("compact") > tc
