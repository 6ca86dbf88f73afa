"""Dense discrete factors: multiplication, sum-out and a brute-force oracle.

A factor stores its scope sorted ascending by variable id and its potentials
as a flat row-major table in which the last scope variable varies fastest.
Every operation returns a new factor in this canonical form, so two factors
are equal exactly when their scopes, cardinalities and tables agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import CardinalityMismatch, MissingVariable, TooLarge, UnknownVariable

DEFAULT_ENUMERATION_LIMIT = 2**20

Assignment = dict[int, int]


@dataclass(frozen=True)
class Variable:
    id: int
    cardinality: int

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"variable id must be non-negative, got {self.id}")
        if self.cardinality < 1:
            raise ValueError(f"cardinality of X{self.id} must be >= 1, got {self.cardinality}")


def project(a: Mapping[int, int], targets: Iterable[int]) -> Assignment:
    """Restrict an assignment to ``targets``, ordered by ascending id."""
    out = {}
    for v in sorted(set(targets)):
        if v not in a:
            raise MissingVariable(v)
        out[v] = a[v]
    return out


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class DenseFactor:
    """Explicit potential table over an ordered scope.

    ``scope`` and ``cards`` may be given in any order; the table is then read
    row-major in that order and transposed into ascending-id order.
    """

    __slots__ = ("scope", "cards", "table")

    def __init__(self, scope: Iterable[int], cards: Iterable[int], table):
        scope = tuple(int(v) for v in scope)
        cards = tuple(int(c) for c in cards)
        if len(scope) != len(cards):
            raise ValueError("scope and cards differ in length")
        if len(set(scope)) != len(scope):
            raise ValueError(f"duplicate variable in scope {scope}")
        if any(c < 1 for c in cards):
            raise ValueError(f"cardinalities must be >= 1, got {cards}")
        values = np.array(table, dtype=np.float64).ravel()
        size = int(np.prod(cards, dtype=np.int64)) if cards else 1
        if values.size != size:
            raise ValueError(f"table has {values.size} entries, scope needs {size}")
        if np.any(values < 0) or np.any(np.isnan(values)):
            raise ValueError("potentials must be non-negative")
        perm = sorted(range(len(scope)), key=scope.__getitem__)
        if perm != list(range(len(scope))):
            values = values.reshape(cards).transpose(perm).ravel()
            scope = tuple(scope[i] for i in perm)
            cards = tuple(cards[i] for i in perm)
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "cards", cards)
        object.__setattr__(self, "table", _readonly(np.ascontiguousarray(values)))

    def __setattr__(self, name, value):
        raise AttributeError("DenseFactor is immutable")

    @classmethod
    def scalar(cls, value: float) -> "DenseFactor":
        return cls((), (), [value])

    @classmethod
    def ones(cls, scope, cards) -> "DenseFactor":
        return cls(scope, cards, np.ones(int(np.prod(cards, dtype=np.int64))))

    @property
    def array(self) -> np.ndarray:
        """The table reshaped to one axis per scope variable."""
        return self.table.reshape(self.cards)

    @property
    def card_map(self) -> dict[int, int]:
        return dict(zip(self.scope, self.cards))

    @property
    def size(self) -> int:
        return self.table.size

    def value(self, a: Mapping[int, int]) -> float:
        idx = []
        for v, c in zip(self.scope, self.cards):
            if v not in a:
                raise MissingVariable(v)
            x = a[v]
            if not 0 <= x < c:
                raise ValueError(f"value {x} out of range for X{v} with cardinality {c}")
            idx.append(x)
        return float(self.array[tuple(idx)])

    def __eq__(self, other):
        if not isinstance(other, DenseFactor):
            return NotImplemented
        return (
            self.scope == other.scope
            and self.cards == other.cards
            and np.array_equal(self.table, other.table)
        )

    __hash__ = None

    def __repr__(self):
        return f"DenseFactor(scope={self.scope}, cards={self.cards}, table={self.table.tolist()})"


def _merge_cards(*card_maps: Mapping[int, int]) -> dict[int, int]:
    merged: dict[int, int] = {}
    for cm in card_maps:
        for v, c in cm.items():
            if merged.setdefault(v, c) != c:
                raise CardinalityMismatch(f"X{v} has cardinalities {merged[v]} and {c}")
    return dict(sorted(merged.items()))


def _broadcast(f: DenseFactor, scope: tuple[int, ...]) -> np.ndarray:
    # f.scope is sorted and a subsequence of the sorted target scope
    own = set(f.scope)
    shape = [c for v, c in zip(f.scope, f.cards)]
    it = iter(shape)
    return f.array.reshape([next(it) if v in own else 1 for v in scope])


def multiply(f: DenseFactor, g: DenseFactor) -> DenseFactor:
    cm = _merge_cards(f.card_map, g.card_map)
    scope = tuple(cm)
    prod = _broadcast(f, scope) * _broadcast(g, scope)
    return DenseFactor(scope, tuple(cm.values()), prod)


def sum_axis(arr: np.ndarray, axis: int) -> np.ndarray:
    """Sum over one axis, adding slices in index order 0, 1, ..., d-1.

    The fixed left-to-right order keeps dense and compact sum-outs bitwise
    identical.
    """
    acc = arr.take(0, axis=axis)
    for i in range(1, arr.shape[axis]):
        acc = acc + arr.take(i, axis=axis)
    return acc


def sum_out(f: DenseFactor, targets: Iterable[int]) -> DenseFactor:
    """Sum ``targets`` out of ``f``, one variable at a time in ascending id."""
    targets = set(targets)
    for v in targets:
        if v not in f.scope:
            raise UnknownVariable(v)
    arr = f.array
    scope = list(f.scope)
    cards = list(f.cards)
    for v in sorted(targets, reverse=True):
        # descending so that earlier axis positions stay valid
        axis = scope.index(v)
        arr = sum_axis(arr, axis)
        del scope[axis], cards[axis]
    return DenseFactor(scope, cards, np.asarray(arr).ravel())


def product_all(factors: Iterable[DenseFactor]) -> DenseFactor:
    result = DenseFactor.scalar(1.0)
    for f in factors:
        result = multiply(result, f)
    return result


def joint_oracle(graph, limit: int = DEFAULT_ENUMERATION_LIMIT) -> float:
    """Partition function by materializing the full joint table.

    Independent of the elimination code path: every factor is broadcast onto
    the joint space of all variables and the product is summed once.
    """
    cards = graph.variables
    n_states = 1
    for c in cards.values():
        n_states *= c
    if n_states > limit:
        raise TooLarge(f"joint space has {n_states} states, limit is {limit}")
    ids = sorted(cards)
    axis_of = {v: i for i, v in enumerate(ids)}
    joint = np.ones([cards[v] for v in ids], dtype=np.float64)
    for factor in graph.factors:
        dense = factor.to_dense() if hasattr(factor, "to_dense") else factor
        shape = [1] * len(ids)
        for v, c in zip(dense.scope, dense.cards):
            shape[axis_of[v]] = c
        joint = joint * dense.array.reshape(shape)
    return float(joint.sum())
