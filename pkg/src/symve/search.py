"""Elimination-order search as a sequential decision process.

States are cost-only factor graphs, actions are the remaining variables, the
transition is :func:`symve.graph.eliminate` and the immediate cost is the
size of the created intermediate under the chosen cost model. Step-wise
policies are plain callables ``state -> variable`` driven by :func:`rollout`;
a learned policy would plug in the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InvalidConfig, TooLarge
from .graph import COST_MODELS, TOTALS, CostLedger, EliminationStep, FactorGraph, check_order, eliminate
from .rng import ROLE_ANNEAL, ROLE_RANDOM_POLICY, Xoshiro256

POLICY_KINDS = ("greedy_min_size", "min_degree", "random", "anneal", "exhaustive")
DEFAULT_EXHAUSTIVE_LIMIT = 10


@dataclass(frozen=True)
class SearchState:
    graph: FactorGraph
    steps: tuple[EliminationStep, ...] = ()

    @property
    def eliminated(self) -> tuple[int, ...]:
        return tuple(s.variable for s in self.steps)

    @property
    def actions(self) -> tuple[int, ...]:
        return tuple(self.graph.variables)

    @property
    def done(self) -> bool:
        return not self.graph.variables

    @property
    def dense_total(self) -> int:
        return sum(s.dense_cost for s in self.steps)

    @property
    def compact_total(self) -> int:
        return sum(s.compact_cost for s in self.steps)

    def ledger(self) -> CostLedger:
        return CostLedger(self.eliminated, self.steps)


def _check_cost_model(cost_model: str, totals: str = "full") -> None:
    if cost_model not in COST_MODELS:
        raise InvalidConfig(f"cost model must be one of {COST_MODELS}, got {cost_model!r}")
    if totals not in TOTALS:
        raise InvalidConfig(f"totals convention must be one of {TOTALS}, got {totals!r}")


class OrderEnv:
    """Episode driver; the cost model is fixed at construction."""

    def __init__(self, graph: FactorGraph, cost_model: str = "dense"):
        _check_cost_model(cost_model)
        self.graph = graph.structural()
        self.cost_model = cost_model

    def reset(self) -> SearchState:
        return SearchState(self.graph)

    def step(self, state: SearchState, var: int) -> tuple[SearchState, int]:
        return env_step(state, var, self.cost_model)


def env_step(state: SearchState, var: int, cost_model: str = "dense") -> tuple[SearchState, int]:
    graph, step = eliminate(state.graph, var, mode="cost_only")
    cost = step.dense_cost if cost_model == "dense" else step.compact_cost
    return SearchState(graph, state.steps + (step,)), cost


def rollout(graph: FactorGraph, choose: Callable[[SearchState], int]) -> tuple[tuple[int, ...], CostLedger]:
    """Run one episode, asking ``choose`` for every action."""
    env = OrderEnv(graph)
    state = env.reset()
    while not state.done:
        state, _ = env.step(state, choose(state))
    return state.eliminated, state.ledger()


def _joint_scope(graph: FactorGraph, var: int) -> set[int]:
    scope = {var}
    for f in graph.factors:
        if var in f.scope:
            scope.update(f.scope)
    return scope


def choose_min_size(state: SearchState) -> int:
    """Variable whose factor product has the fewest variables; ties to smallest id."""
    return min(state.actions, key=lambda v: (len(_joint_scope(state.graph, v)), v))


def choose_min_degree(state: SearchState) -> int:
    """Min-degree on the interaction graph, then fewest fill-in edges, then id."""
    g = state.graph
    nbrs = {v: g.neighbors(v) for v in state.actions}

    def fill(v):
        ns = sorted(nbrs[v])
        return sum(1 for i, a in enumerate(ns) for b in ns[i + 1:] if b not in nbrs[a])

    return min(state.actions, key=lambda v: (len(nbrs[v]), fill(v), v))


def greedy_order(graph: FactorGraph) -> tuple[tuple[int, ...], CostLedger]:
    return rollout(graph, choose_min_size)


def min_degree_order(graph: FactorGraph) -> tuple[tuple[int, ...], CostLedger]:
    return rollout(graph, choose_min_degree)


def random_order(graph: FactorGraph, seed: int = 0) -> tuple[tuple[int, ...], CostLedger]:
    rng = Xoshiro256.for_role(seed, ROLE_RANDOM_POLICY)
    order = list(graph.variables)
    rng.shuffle(order)
    return order_ledger(graph, order)


def order_ledger(graph: FactorGraph, order: Sequence[int]) -> tuple[tuple[int, ...], CostLedger]:
    order = check_order(graph, order)
    state = SearchState(graph.structural())
    for v in order:
        state, _ = env_step(state, v)
    return order, state.ledger()


def _objective(steps: Sequence[EliminationStep], cost_model: str, totals: str) -> int:
    attr = "dense_cost" if cost_model == "dense" else "compact_cost"
    counted = steps if totals == "full" else steps[: max(len(steps) - 1, 0)]
    return sum(getattr(s, attr) for s in counted)


def anneal_order(
    graph: FactorGraph,
    cost_model: str = "dense",
    seed: int = 0,
    budget: int = 1000,
    totals: str = "full",
    t_start: float = 0.1,
    t_end: float = 1e-4,
) -> tuple[tuple[int, ...], CostLedger]:
    """Simulated annealing over orders, started from the greedy order.

    ``budget`` counts order evaluations including the starting one, so a
    budget of 1 returns the greedy order. Neighbours swap two adjacent
    positions; a worse order is accepted with probability
    ``exp(-relative_increase / T)`` and ``T`` cools geometrically from
    ``t_start`` to ``t_end``. The best order seen is returned.
    """
    _check_cost_model(cost_model, totals)
    if budget < 1:
        raise InvalidConfig("budget must be >= 1")
    rng = Xoshiro256.for_role(seed, ROLE_ANNEAL)
    base = graph.structural()
    order, _ = greedy_order(base)
    order = list(order)
    n = len(order)

    # states[k] is the graph before eliminating order[k]
    def roll(order, states, steps, start):
        states = states[: start + 1]
        steps = steps[:start]
        g = states[start]
        for v in order[start:]:
            g, step = eliminate(g, v, mode="cost_only")
            states.append(g)
            steps.append(step)
        return states, steps

    states, steps = roll(order, [base], [], 0)
    cur = _objective(steps, cost_model, totals)
    best, best_order, best_steps = cur, list(order), list(steps)
    iters = budget - 1
    if n < 2 or iters == 0:
        return tuple(best_order), CostLedger(tuple(best_order), tuple(best_steps))
    ratio = t_end / t_start
    for k in range(iters):
        temp = t_start * ratio ** (k / max(iters - 1, 1))
        i = rng.randbelow(n - 1)
        cand = list(order)
        cand[i], cand[i + 1] = cand[i + 1], cand[i]
        c_states, c_steps = roll(cand, states, steps, i)
        new = _objective(c_steps, cost_model, totals)
        u = rng.random()
        if new <= cur or u < math.exp(-(new - cur) / (temp * max(cur, 1))):
            order, states, steps, cur = cand, c_states, c_steps, new
            if cur < best:
                best, best_order, best_steps = cur, list(order), list(steps)
    return tuple(best_order), CostLedger(tuple(best_order), tuple(best_steps))


def exhaustive_optimal(
    graph: FactorGraph,
    cost_model: str = "dense",
    totals: str = "full",
    limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> tuple[tuple[int, ...], int]:
    """Minimum-cost order by depth-first branch and bound.

    Children are visited in ascending variable id, so among optimal orders
    the lexicographically smallest one is returned. Each step costs at least
    the cardinality of the eliminated variable, which gives the lower bound.
    """
    _check_cost_model(cost_model, totals)
    n = graph.n
    if n > limit:
        raise TooLarge(f"exhaustive search over {n} variables exceeds the limit of {limit}")
    base = graph.structural()
    if n == 0:
        return (), 0
    _, ledger = greedy_order(base)
    best = [ledger.total(cost_model, totals), None]
    attr = "dense_cost" if cost_model == "dense" else "compact_cost"
    paper = totals == "paper"

    def lower_bound(g: FactorGraph) -> int:
        cards = list(g.variables.values())
        lb = sum(cards)
        if paper and cards:
            lb -= max(cards)
        return lb

    def dfs(g: FactorGraph, prefix: list[int], acc: int):
        if not g.variables:
            if acc < best[0] or (best[1] is None and acc == best[0]):
                best[0], best[1] = acc, tuple(prefix)
            return
        bound = acc + lower_bound(g)
        if bound > best[0] or (best[1] is not None and bound >= best[0]):
            return
        last = len(g.variables) == 1
        for v in list(g.variables):
            nxt, step = eliminate(g, v, mode="cost_only")
            cost = 0 if (paper and last) else getattr(step, attr)
            prefix.append(v)
            dfs(nxt, prefix, acc + cost)
            prefix.pop()

    dfs(base, [], 0)
    return best[1], best[0]


def find_order(
    graph: FactorGraph,
    kind: str = "greedy_min_size",
    cost_model: str = "dense",
    totals: str = "full",
    seed: int = 0,
    budget: int = 1000,
    limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> tuple[tuple[int, ...], CostLedger]:
    """Dispatch to a policy by name; returns the order and its ledger."""
    _check_cost_model(cost_model, totals)
    if kind == "greedy_min_size":
        return greedy_order(graph)
    if kind == "min_degree":
        return min_degree_order(graph)
    if kind == "random":
        return random_order(graph, seed)
    if kind == "anneal":
        return anneal_order(graph, cost_model, seed=seed, budget=budget, totals=totals)
    if kind == "exhaustive":
        order, _ = exhaustive_optimal(graph, cost_model, totals, limit=limit)
        return order_ledger(graph, order)
    raise InvalidConfig(f"unknown policy {kind!r}; expected one of {POLICY_KINDS}")
