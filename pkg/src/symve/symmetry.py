"""Local symmetries and histogram-indexed compact factors.

A group of interchangeable variables (all with cardinality ``d``) is
represented by a single histogram-valued index: ``counts[v]`` is the number of
group variables assigned value ``v``. Histograms of ``n`` variables are
numbered in ascending lexicographic order of their count vectors, so for
three Boolean variables ``[0,3], [1,2], [2,1], [3,0]`` get ranks 0..3.

Compact tables put the free variables (ascending id) on the outer axes and
the groups (ordered by smallest member id) on the inner axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CardinalityMismatch, MissingVariable, NotSymmetric, OutOfRange, UnknownVariable
from .factors import DenseFactor, _merge_cards, sum_axis

Partition = tuple[tuple[int, ...], ...]


# --------------------------------------------------------------------------
# histograms


def _n_compositions(k: int, m: int) -> int:
    """Number of length-``k`` count vectors summing to ``m``."""
    if m < 0:
        return 0
    if k == 0:
        return 1 if m == 0 else 0
    return comb(m + k - 1, k - 1)


def compact_domain_size(n: int, d: int) -> int:
    """Number of histograms of ``n`` variables over ``d`` values, C(n+d-1, d-1).

    Python integers are unbounded, so the result is always exact.
    """
    if n < 0 or d < 1:
        raise ValueError(f"need n >= 0 and d >= 1, got n={n}, d={d}")
    return comb(n + d - 1, d - 1)


@lru_cache(maxsize=None)
def histograms(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """All histograms of ``n`` variables over ``d`` values, in rank order."""
    if d == 1:
        return ((n,),)
    out = []
    for first in range(n + 1):
        for rest in histograms(n - first, d - 1):
            out.append((first,) + rest)
    return tuple(out)


def hist_rank(counts: Sequence[int]) -> int:
    counts = [int(c) for c in counts]
    if not counts or any(c < 0 for c in counts):
        raise OutOfRange(f"invalid histogram {counts}")
    d = len(counts)
    rem = sum(counts)
    r = 0
    for i, h in enumerate(counts[:-1]):
        for c in range(h):
            r += _n_compositions(d - i - 1, rem - c)
        rem -= h
    return r


def hist_unrank(r: int, n: int, d: int) -> tuple[int, ...]:
    size = compact_domain_size(n, d)
    if not 0 <= r < size:
        raise OutOfRange(f"rank {r} outside [0, {size}) for n={n}, d={d}")
    out = []
    rem = n
    for i in range(d - 1):
        c = 0
        while True:
            cnt = _n_compositions(d - i - 1, rem - c)
            if r < cnt:
                break
            r -= cnt
            c += 1
        out.append(c)
        rem -= c
    out.append(rem)
    return tuple(out)


@lru_cache(maxsize=None)
def _rank_table(n: int, d: int) -> np.ndarray:
    # table[i, rem, h]: ranks skipped by putting h (instead of 0) at position i
    # when rem variables are still unplaced
    table = np.zeros((d, n + 1, n + 1), dtype=np.int64)
    for i in range(d - 1):
        for rem in range(n + 1):
            acc = 0
            for h in range(rem + 1):
                table[i, rem, h] = acc
                acc += _n_compositions(d - i - 1, rem - h)
    table.flags.writeable = False
    return table


def rank_counts(counts: np.ndarray, n: int, d: int) -> np.ndarray:
    """Vectorized :func:`hist_rank` over the last axis of ``counts``."""
    table = _rank_table(n, d)
    counts = np.asarray(counts, dtype=np.int64)
    rank = np.zeros(counts.shape[:-1], dtype=np.int64)
    rem = np.full(counts.shape[:-1], n, dtype=np.int64)
    for i in range(d - 1):
        h = counts[..., i]
        rank += table[i, rem, h]
        rem -= h
    return rank


@lru_cache(maxsize=None)
def canonical_assignments(n: int, d: int) -> np.ndarray:
    """Row ``r``: the nondecreasing value vector realizing histogram ``r``."""
    rows = [np.repeat(np.arange(d), h) for h in histograms(n, d)]
    out = np.array(rows, dtype=np.int64).reshape(len(rows), n)
    out.flags.writeable = False
    return out


def _group_ranks(values: Sequence[np.ndarray], d: int) -> np.ndarray:
    """Histogram rank of the group assignment given per-variable value arrays."""
    n = len(values)
    counts = np.stack([sum((np.asarray(x) == v).astype(np.int64) for x in values) for v in range(d)], axis=-1)
    return rank_counts(counts, n, d)


# --------------------------------------------------------------------------
# partitions and structure


def normalize_partition(groups: Iterable[Iterable[int]]) -> Partition:
    """Sort groups, drop those with fewer than two members, check disjointness."""
    seen: set[int] = set()
    out = []
    for g in groups:
        g = tuple(sorted(set(int(v) for v in g)))
        if seen.intersection(g):
            raise ValueError(f"groups overlap on {sorted(seen.intersection(g))}")
        seen.update(g)
        if len(g) >= 2:
            out.append(g)
    return tuple(sorted(out))


def refines(coarse: Partition, fine: Partition) -> bool:
    """True if every group of ``fine`` lies inside some group of ``coarse``."""
    return all(any(set(g) <= set(c) for c in coarse) for g in fine)


def partition_size(cards: Mapping[int, int], partition: Partition) -> int:
    grouped = {v for g in partition for v in g}
    size = 1
    for v, c in cards.items():
        if v not in grouped:
            size *= c
    for g in partition:
        size *= compact_domain_size(len(g), cards[g[0]])
    return size


@dataclass(frozen=True)
class FactorStructure:
    """Scope and symmetry partition of a factor without its potentials."""

    scope: tuple[int, ...]
    cards: tuple[int, ...]
    groups: Partition = ()

    def __post_init__(self):
        order = sorted(range(len(self.scope)), key=self.scope.__getitem__)
        object.__setattr__(self, "scope", tuple(self.scope[i] for i in order))
        object.__setattr__(self, "cards", tuple(self.cards[i] for i in order))
        object.__setattr__(self, "groups", normalize_partition(self.groups))
        cm = self.card_map
        for g in self.groups:
            if not set(g) <= cm.keys():
                raise UnknownVariable(f"group {g} not inside scope {self.scope}")
            if len({cm[v] for v in g}) != 1:
                raise CardinalityMismatch(f"group {g} mixes cardinalities")

    @property
    def card_map(self) -> dict[int, int]:
        return dict(zip(self.scope, self.cards))

    @property
    def structure(self) -> "FactorStructure":
        return self

    @property
    def dense_size(self) -> int:
        size = 1
        for c in self.cards:
            size *= c
        return size

    @property
    def compact_size(self) -> int:
        return partition_size(self.card_map, self.groups)


def propagate_multiply(a: FactorStructure, b: FactorStructure) -> FactorStructure:
    """Guaranteed symmetry structure of the product of two factors.

    Intersections of one group from each operand stay interchangeable, as do
    the parts of a group that the other operand does not touch. A variable
    that would land in two derived groups is made free.
    """
    cm = _merge_cards(a.card_map, b.card_map)
    scope_a, scope_b = set(a.scope), set(b.scope)
    candidates: list[set[int]] = []
    for ga in a.groups:
        for gb in b.groups:
            inter = set(ga) & set(gb)
            if inter:
                candidates.append(inter)
    candidates += [set(g) - scope_b for g in a.groups]
    candidates += [set(g) - scope_a for g in b.groups]
    owners: dict[int, int] = {}
    for g in candidates:
        for v in g:
            owners[v] = owners.get(v, 0) + 1
    groups = [{v for v in g if owners[v] == 1} for g in candidates]
    return FactorStructure(tuple(cm), tuple(cm.values()), normalize_partition(groups))


def propagate_sum_out(a: FactorStructure, var: int) -> FactorStructure:
    if var not in a.scope:
        raise UnknownVariable(var)
    keep = [i for i, v in enumerate(a.scope) if v != var]
    groups = [tuple(v for v in g if v != var) for g in a.groups]
    return FactorStructure(
        tuple(a.scope[i] for i in keep), tuple(a.cards[i] for i in keep), normalize_partition(groups)
    )


def propagate_symmetries_schematic(operands: Sequence[FactorStructure], op: str, variable: int | None = None) -> Partition:
    """Symmetry partition of a multiply or sum-out result, from structure alone."""
    if op == "multiply":
        result = FactorStructure((), ())
        for s in operands:
            result = propagate_multiply(result, s)
        return result.groups
    if op == "sumout":
        (s,) = operands
        return propagate_sum_out(s, variable).groups
    raise ValueError(f"unknown op {op!r}")


# --------------------------------------------------------------------------
# compact factors


class CompactFactor:
    """Potential table indexed by free assignments times per-group histograms."""

    __slots__ = ("free_scope", "free_cards", "groups", "group_cards", "table")

    def __init__(self, free_scope, free_cards, groups, group_cards, table):
        free_scope = tuple(int(v) for v in free_scope)
        free_cards = tuple(int(c) for c in free_cards)
        groups = tuple(tuple(int(v) for v in g) for g in groups)
        group_cards = tuple(int(c) for c in group_cards)
        if len(free_scope) != len(free_cards) or len(groups) != len(group_cards):
            raise ValueError("scope/cardinality length mismatch")
        all_vars = list(free_scope) + [v for g in groups for v in g]
        if len(set(all_vars)) != len(all_vars):
            raise ValueError("a variable appears twice in the compact scope")
        shape = list(free_cards) + [compact_domain_size(len(g), c) for g, c in zip(groups, group_cards)]
        arr = np.array(table, dtype=np.float64)
        if arr.size != int(np.prod(shape, dtype=np.int64)):
            raise ValueError(f"compact table has {arr.size} entries, layout needs {int(np.prod(shape))}")
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise ValueError("potentials must be non-negative")
        arr = arr.reshape(shape)
        axes = [("free", v, c) for v, c in zip(free_scope, free_cards)]
        axes += [("group", g, c) for g, c in zip(groups, group_cards)]
        fs, fc, gs, gc, arr = _canonical_layout(axes, arr)
        object.__setattr__(self, "free_scope", fs)
        object.__setattr__(self, "free_cards", fc)
        object.__setattr__(self, "groups", gs)
        object.__setattr__(self, "group_cards", gc)
        flat = np.ascontiguousarray(arr).ravel()
        flat.flags.writeable = False
        object.__setattr__(self, "table", flat)

    def __setattr__(self, name, value):
        raise AttributeError("CompactFactor is immutable")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.free_cards + tuple(
            compact_domain_size(len(g), c) for g, c in zip(self.groups, self.group_cards)
        )

    @property
    def array(self) -> np.ndarray:
        return self.table.reshape(self.shape)

    @property
    def card_map(self) -> dict[int, int]:
        cm = dict(zip(self.free_scope, self.free_cards))
        for g, c in zip(self.groups, self.group_cards):
            cm.update((v, c) for v in g)
        return dict(sorted(cm.items()))

    @property
    def scope(self) -> tuple[int, ...]:
        return tuple(self.card_map)

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(self.card_map.values())

    @property
    def structure(self) -> FactorStructure:
        return FactorStructure(self.scope, self.cards, self.groups)

    @property
    def size(self) -> int:
        return self.table.size

    def to_dense(self) -> DenseFactor:
        return decode(self)

    def value(self, a: Mapping[int, int]) -> float:
        return compact_lookup(self, a)

    def __eq__(self, other):
        if not isinstance(other, CompactFactor):
            return NotImplemented
        return (
            self.free_scope == other.free_scope
            and self.free_cards == other.free_cards
            and self.groups == other.groups
            and self.group_cards == other.group_cards
            and np.array_equal(self.table, other.table)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"CompactFactor(free={self.free_scope}, groups={self.groups}, "
            f"table={self.table.tolist()})"
        )


def _canonical_layout(axes, arr):
    """Normalize a labelled compact array into the canonical axis order.

    ``axes`` entries are ``("free", var, card)`` or ``("group", vars, card)``.
    Singleton groups become free variables and empty groups are dropped.
    """
    free, grouped, dropped = [], [], []
    for k, (kind, what, card) in enumerate(axes):
        if kind == "free":
            free.append((what, card, k))
        elif len(what) == 1:
            # one-variable histograms: value v sits at the rank of e_v
            order = [hist_rank([int(u == v) for u in range(card)]) for v in range(card)]
            arr = arr.take(order, axis=k)
            free.append((what[0], card, k))
        elif len(what) == 0:
            dropped.append(k)
        else:
            grouped.append((tuple(sorted(what)), card, k))
    free.sort()
    grouped.sort()
    perm = [k for _, _, k in free] + [k for _, _, k in grouped] + dropped
    arr = arr.transpose(perm)
    keep = len(free) + len(grouped)
    arr = arr.reshape(arr.shape[:keep])
    return (
        tuple(v for v, _, _ in free),
        tuple(c for _, c, _ in free),
        tuple(g for g, _, _ in grouped),
        tuple(c for _, c, _ in grouped),
        arr,
    )


def _gather(c: CompactFactor, values: Mapping[int, np.ndarray]) -> np.ndarray:
    """Read ``c`` at (broadcastable arrays of) full assignments."""
    idx = [np.asarray(values[v]) for v in c.free_scope]
    for g, d in zip(c.groups, c.group_cards):
        idx.append(_group_ranks([values[v] for v in g], d))
    if not idx:
        return c.array
    return c.array[tuple(idx)]


def _transposition_witness(f: DenseFactor, u: int, v: int):
    arr = f.array
    i, j = f.scope.index(u), f.scope.index(v)
    swapped = np.swapaxes(arr, i, j)
    diff = np.argwhere(arr != swapped)
    if diff.size == 0:
        return None
    x = [int(t) for t in diff[0]]
    y = list(x)
    y[i], y[j] = x[j], x[i]
    return dict(zip(f.scope, x)), dict(zip(f.scope, y))


def detect_symmetries(f: DenseFactor) -> Partition:
    """Maximal groups of variables whose transpositions leave ``f`` unchanged.

    Swap-invariance is an equivalence relation, so each variable is only
    compared against one representative per existing group.
    """
    arr = f.array
    groups: list[list[int]] = []
    for j, v in enumerate(f.scope):
        for g in groups:
            i = f.scope.index(g[0])
            if f.cards[i] == f.cards[j] and np.array_equal(arr, np.swapaxes(arr, i, j)):
                g.append(v)
                break
        else:
            groups.append([v])
    return normalize_partition(groups)


def check_partition(f: DenseFactor, partition: Partition) -> None:
    """Raise :class:`NotSymmetric` unless every group is interchangeable in ``f``."""
    for g in partition:
        for u, v in zip(g, g[1:]):
            witness = _transposition_witness(f, u, v)
            if witness is not None:
                raise NotSymmetric(g, witness)


def encode(f: DenseFactor, partition: Iterable[Iterable[int]], check: bool = True) -> CompactFactor:
    """Compact encoding of ``f`` under ``partition``.

    Each cell holds the potential of the canonical representative: within a
    group (ascending id) ``counts[0]`` zeros, then ``counts[1]`` ones, etc.
    """
    partition = normalize_partition(partition)
    cm = f.card_map
    for g in partition:
        missing = [v for v in g if v not in cm]
        if missing:
            raise UnknownVariable(f"group {g} has variables {missing} outside scope {f.scope}")
        if len({cm[v] for v in g}) != 1:
            raise CardinalityMismatch(f"group {g} mixes cardinalities")
    if check:
        check_partition(f, partition)
    grouped = {v for g in partition for v in g}
    free = [v for v in f.scope if v not in grouped]
    group_cards = [cm[g[0]] for g in partition]
    shape = [cm[v] for v in free] + [compact_domain_size(len(g), d) for g, d in zip(partition, group_cards)]
    nd = len(shape)
    idx: dict[int, np.ndarray] = {}
    for k, v in enumerate(free):
        idx[v] = np.arange(cm[v]).reshape([-1 if a == k else 1 for a in range(nd)])
    for gi, (g, d) in enumerate(zip(partition, group_cards)):
        reps = canonical_assignments(len(g), d)
        axis = len(free) + gi
        for pos, v in enumerate(g):
            idx[v] = reps[:, pos].reshape([-1 if a == axis else 1 for a in range(nd)])
    if f.scope:
        table = f.array[tuple(idx[v] for v in f.scope)]
    else:
        table = f.array
    return CompactFactor(free, [cm[v] for v in free], partition, group_cards, np.broadcast_to(table, shape))


def decode(c: CompactFactor) -> DenseFactor:
    scope, cards = c.scope, c.cards
    grid = np.indices(cards, sparse=True) if cards else []
    dense = _gather(c, dict(zip(scope, grid)))
    return DenseFactor(scope, cards, np.broadcast_to(dense, cards).ravel())


def compact_lookup(c: CompactFactor, a: Mapping[int, int]) -> float:
    values = {}
    for v, card in c.card_map.items():
        if v not in a:
            raise MissingVariable(v)
        if not 0 <= a[v] < card:
            raise ValueError(f"value {a[v]} out of range for X{v} with cardinality {card}")
        values[v] = np.asarray(a[v])
    return float(_gather(c, values))


def compact_sum_out(c: CompactFactor, var: int) -> CompactFactor:
    """Sum one variable out of a compact factor without decoding it.

    For a grouped variable, the cell of the shrunken group's histogram ``h``
    is the sum over ``v`` of the cells at ``h + e_v``.
    """
    arr = c.array
    axes = [("free", v, d) for v, d in zip(c.free_scope, c.free_cards)]
    axes += [("group", g, d) for g, d in zip(c.groups, c.group_cards)]
    if var in c.free_scope:
        k = c.free_scope.index(var)
        del axes[k]
        return _from_axes(axes, sum_axis(arr, k))
    for gi, g in enumerate(c.groups):
        if var in g:
            break
    else:
        raise UnknownVariable(var)
    n, d = len(g), c.group_cards[gi]
    k = len(c.free_scope) + gi
    smaller = histograms(n - 1, d)
    lifted = np.array(
        [[hist_rank([h[u] + (u == v) for u in range(d)]) for v in range(d)] for h in smaller],
        dtype=np.int64,
    ).reshape(len(smaller), d)
    acc = arr.take(lifted[:, 0], axis=k)
    for v in range(1, d):
        acc = acc + arr.take(lifted[:, v], axis=k)
    axes[k] = ("group", tuple(u for u in g if u != var), d)
    return _from_axes(axes, acc)


def _from_axes(axes, arr) -> CompactFactor:
    fs, fc, gs, gc, arr = _canonical_layout(axes, arr)
    return CompactFactor(fs, fc, gs, gc, arr)


def compact_multiply(c1: CompactFactor, c2: CompactFactor) -> CompactFactor:
    """Product of two compact factors, encoded under the propagated symmetries."""
    out = propagate_multiply(c1.structure, c2.structure)
    cm = out.card_map
    grouped = {v for g in out.groups for v in g}
    free = [v for v in out.scope if v not in grouped]
    group_cards = [cm[g[0]] for g in out.groups]
    shape = [cm[v] for v in free] + [compact_domain_size(len(g), d) for g, d in zip(out.groups, group_cards)]
    nd = len(shape)
    values: dict[int, np.ndarray] = {}
    for k, v in enumerate(free):
        values[v] = np.arange(cm[v]).reshape([-1 if a == k else 1 for a in range(nd)])
    for gi, (g, d) in enumerate(zip(out.groups, group_cards)):
        reps = canonical_assignments(len(g), d)
        axis = len(free) + gi
        for pos, v in enumerate(g):
            values[v] = reps[:, pos].reshape([-1 if a == axis else 1 for a in range(nd)])
    prod = _gather(c1, values) * _gather(c2, values)
    return CompactFactor(free, [cm[v] for v in free], out.groups, group_cards, np.broadcast_to(prod, shape))


def as_compact(factor, partition: Partition | None = None, check: bool = True) -> CompactFactor:
    """Coerce a dense or compact factor to compact form.

    Dense factors are encoded under ``partition`` or, when omitted, under the
    detected maximal symmetries.
    """
    if isinstance(factor, CompactFactor):
        return factor
    if partition is None:
        partition = detect_symmetries(factor)
        check = False
    return encode(factor, partition, check=check)
