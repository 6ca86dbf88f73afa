"""Factor graphs, the elimination transition and its two cost models.

Eliminating ``X`` multiplies the factors that mention ``X`` into an
intermediate over ``X*`` (their joint scope, including ``X``), sums ``X`` out
and puts the result back. The dense cost of the step is ``|Dom(X*)|``; the
compact cost is the size of the histogram encoding of that intermediate under
the symmetries guaranteed by propagation from the input factors.

Three modes share one code path for scopes and symmetry partitions:
``dense`` and ``compact`` additionally carry potential tables, ``cost_only``
carries nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .errors import AlreadyEliminated, CardinalityMismatch, NotAPermutation, UnknownVariable
from .factors import DenseFactor, Variable, multiply, sum_out
from .symmetry import (
    CompactFactor,
    FactorStructure,
    compact_multiply,
    compact_sum_out,
    decode,
    detect_symmetries,
    encode,
    propagate_multiply,
    propagate_sum_out,
)

MODES = ("dense", "compact", "cost_only")
COST_MODELS = ("dense", "compact")
TOTALS = ("paper", "full")

Factor = Union[DenseFactor, CompactFactor, FactorStructure]


def structure_of(factor: Factor) -> FactorStructure:
    """Scope plus symmetry partition; dense tables get their symmetries detected."""
    if isinstance(factor, DenseFactor):
        return FactorStructure(factor.scope, factor.cards, detect_symmetries(factor))
    return factor.structure


class FactorGraph:
    """Variables (id -> cardinality) plus a list of factors over them.

    ``structures`` may be passed to avoid symmetry detection on dense
    factors; otherwise it is computed on first use.
    """

    def __init__(
        self,
        variables: Mapping[int, int] | Iterable[Variable],
        factors: Iterable[Factor] = (),
        structures: Sequence[FactorStructure] | None = None,
        eliminated: Sequence[int] = (),
    ):
        if isinstance(variables, Mapping):
            cards = {int(v): int(c) for v, c in variables.items()}
        else:
            cards = {var.id: var.cardinality for var in variables}
        for v, c in cards.items():
            Variable(v, c)
        self.variables: dict[int, int] = dict(sorted(cards.items()))
        self.factors: tuple[Factor, ...] = tuple(factors)
        self.eliminated: tuple[int, ...] = tuple(eliminated)
        for i, f in enumerate(self.factors):
            for v, c in zip(f.scope, f.cards):
                if v not in self.variables:
                    raise UnknownVariable(f"factor {i} uses X{v}, which is not a graph variable")
                if self.variables[v] != c:
                    raise CardinalityMismatch(
                        f"factor {i} gives X{v} cardinality {c}, graph says {self.variables[v]}"
                    )
        if structures is not None:
            structures = tuple(structures)
            if len(structures) != len(self.factors):
                raise ValueError("one structure per factor is required")
        self._structures = structures

    @property
    def structures(self) -> tuple[FactorStructure, ...]:
        if self._structures is None:
            self._structures = tuple(structure_of(f) for f in self.factors)
        return self._structures

    @property
    def n(self) -> int:
        return len(self.variables)

    def structural(self) -> "FactorGraph":
        """Cost-only view: the same graph with tables dropped."""
        return FactorGraph(self.variables, self.structures, self.structures, self.eliminated)

    def factors_of(self, var: int) -> list[int]:
        return [i for i, f in enumerate(self.factors) if var in f.scope]

    def neighbors(self, var: int) -> set[int]:
        out: set[int] = set()
        for f in self.factors:
            if var in f.scope:
                out.update(f.scope)
        out.discard(var)
        return out

    def _check_live(self, var: int) -> None:
        if var not in self.variables:
            if var in self.eliminated:
                raise AlreadyEliminated(f"X{var} was already eliminated")
            raise UnknownVariable(var)

    def __eq__(self, other):
        if not isinstance(other, FactorGraph):
            return NotImplemented
        return self.variables == other.variables and self.factors == other.factors

    __hash__ = None

    def __repr__(self):
        return f"FactorGraph(variables={self.variables}, factors={len(self.factors)})"


@dataclass(frozen=True)
class EliminationStep:
    variable: int
    touched: tuple[tuple[int, ...], ...]
    new_scope: tuple[int, ...]
    dense_cost: int
    compact_cost: int
    groups: tuple[tuple[int, ...], ...] = ()


@dataclass(frozen=True)
class CostLedger:
    order: tuple[int, ...]
    steps: tuple[EliminationStep, ...] = field(default=())

    def _sum(self, attr: str, upto: int) -> int:
        return sum(getattr(s, attr) for s in self.steps[:upto])

    @property
    def dense_full(self) -> int:
        return self._sum("dense_cost", len(self.steps))

    @property
    def compact_full(self) -> int:
        return self._sum("compact_cost", len(self.steps))

    @property
    def dense_paper(self) -> int:
        # sum over steps 1..n-1: the final sum-out is not counted
        return self._sum("dense_cost", max(len(self.steps) - 1, 0))

    @property
    def compact_paper(self) -> int:
        return self._sum("compact_cost", max(len(self.steps) - 1, 0))

    def total(self, cost_model: str = "dense", totals: str = "full") -> int:
        if cost_model not in COST_MODELS:
            raise ValueError(f"unknown cost model {cost_model!r}")
        if totals not in TOTALS:
            raise ValueError(f"unknown totals convention {totals!r}")
        return getattr(self, f"{cost_model}_{totals}")


def _product_structure(graph: FactorGraph, var: int, touched: list[int]) -> FactorStructure:
    product = FactorStructure((), ())
    for i in touched:
        product = propagate_multiply(product, graph.structures[i])
    if var not in product.scope:
        product = FactorStructure((var,), (graph.variables[var],))
    return product


def step_costs(graph: FactorGraph, var: int) -> tuple[int, int]:
    """(dense, compact) size of the intermediate created by eliminating ``var``."""
    graph._check_live(var)
    product = _product_structure(graph, var, graph.factors_of(var))
    return product.dense_size, product.compact_size


def eliminate(
    graph: FactorGraph, var: int, mode: str = "dense", redetect: bool = False
) -> tuple[FactorGraph, EliminationStep]:
    """Sum ``var`` out of ``graph``; returns the successor graph and step costs."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    graph._check_live(var)
    touched = graph.factors_of(var)
    product = _product_structure(graph, var, touched)
    result_struct = propagate_sum_out(product, var)
    card = graph.variables[var]

    if mode == "cost_only":
        new_factor: Factor = result_struct
    elif mode == "dense":
        acc = None
        for i in touched:
            f = graph.factors[i]
            f = f if isinstance(f, DenseFactor) else decode(f)
            acc = f if acc is None else multiply(acc, f)
        if acc is None:
            acc = DenseFactor.ones((var,), (card,))
        new_factor = sum_out(acc, [var])
    else:
        # same multiplication sequence as _product_structure, so the
        # propagated partitions agree with the cost-only path
        acc = None
        for i in touched:
            f = graph.factors[i]
            if not isinstance(f, CompactFactor):
                f = encode(f, graph.structures[i].groups, check=False)
            acc = f if acc is None else compact_multiply(acc, f)
        if acc is None:
            acc = CompactFactor((var,), (card,), (), (), [1.0] * card)
        new_factor = compact_sum_out(acc, var)
        if redetect:
            dense = decode(new_factor)
            new_factor = encode(dense, detect_symmetries(dense), check=False)
            result_struct = new_factor.structure

    keep = [i for i in range(len(graph.factors)) if i not in set(touched)]
    variables = {v: c for v, c in graph.variables.items() if v != var}
    successor = FactorGraph(
        variables,
        [graph.factors[i] for i in keep] + [new_factor],
        [graph.structures[i] for i in keep] + [result_struct],
        graph.eliminated + (var,),
    )
    step = EliminationStep(
        variable=var,
        touched=tuple(graph.factors[i].scope for i in touched),
        new_scope=product.scope,
        dense_cost=product.dense_size,
        compact_cost=product.compact_size,
        groups=product.groups,
    )
    return successor, step


def check_order(graph: FactorGraph, order: Sequence[int]) -> tuple[int, ...]:
    order = tuple(int(v) for v in order)
    if len(order) != len(set(order)) or set(order) != set(graph.variables):
        raise NotAPermutation(f"{list(order)} is not a permutation of {list(graph.variables)}")
    return order


def run_elimination(
    graph: FactorGraph, order: Sequence[int], mode: str = "dense", redetect: bool = False
) -> tuple[float | None, CostLedger]:
    """Eliminate every variable in ``order``.

    Returns the partition function (``None`` in cost-only mode) and the ledger.
    """
    order = check_order(graph, order)
    steps = []
    for var in order:
        graph, step = eliminate(graph, var, mode, redetect=redetect)
        steps.append(step)
    ledger = CostLedger(order, tuple(steps))
    if mode == "cost_only":
        return None, ledger
    z = 1.0
    for f in graph.factors:
        z *= float(f.table[0])
    return z, ledger
