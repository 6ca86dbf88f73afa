"""FGSYM model files (factor graphs with symmetry annotations) and UAI import.

Format, line oriented, ``#`` starts a comment::

    FGSYM 1
    vars <n>
    card <c_0> ... <c_{n-1}>
    factor <k> <v_1> ... <v_k>
    sym { <ids> } { <ids> }      optional
    table <values>               dense, row-major over the factor line's order
    ctable <values>              compact: free variables (factor line order)
                                 outer, groups (sym order) inner, histograms
                                 in ascending lexicographic order

Value lists may continue on following lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import NotSymmetric, ParseError, ValidationError
from .factors import DenseFactor
from .graph import FactorGraph, structure_of
from .symmetry import CompactFactor, FactorStructure, Partition, check_partition, compact_domain_size, normalize_partition

MAGIC = "FGSYM"
VERSION = "1"


@dataclass(eq=False)
class ModelFile:
    graph: FactorGraph
    declared: tuple[Partition | None, ...]

    def verify(self) -> None:
        """Check every declared partition against its dense table."""
        for i, (f, p) in enumerate(zip(self.graph.factors, self.declared)):
            if p is not None and isinstance(f, DenseFactor):
                try:
                    check_partition(f, p)
                except NotSymmetric as exc:
                    raise ValidationError(i, str(exc)) from exc

    def __eq__(self, other):
        if not isinstance(other, ModelFile):
            return NotImplemented
        return self.graph == other.graph and self.declared == other.declared


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].replace("{", " { ").replace("}", " } ")
        tokens = line.split()
        if tokens:
            yield no, tokens


_NUMBER = re.compile(r"^[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$|^[-+]?(inf|nan)$", re.IGNORECASE)


def _ints(tokens, no, what):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(no, f"expected integers for {what}, got {' '.join(tokens)}") from None


def _parse_groups(tokens, no) -> list[list[int]]:
    groups, current = [], None
    for t in tokens:
        if t == "{":
            if current is not None:
                raise ParseError(no, "nested '{' in sym")
            current = []
        elif t == "}":
            if current is None:
                raise ParseError(no, "unmatched '}' in sym")
            groups.append(current)
            current = None
        elif current is None:
            raise ParseError(no, f"token {t!r} outside braces in sym")
        else:
            current.extend(_ints([t], no, "sym group"))
    if current is not None:
        raise ParseError(no, "unterminated '{' in sym")
    return groups


def parse_model(text: str, validate: bool = True) -> ModelFile:
    """Parse FGSYM text.

    With ``validate`` every declared group is checked for interchangeability
    against a dense ``table`` at load time; otherwise use :meth:`ModelFile.verify`.
    """
    lines = list(_lines(text))
    if not lines:
        raise ParseError(1, "empty input")
    no, toks = lines[0]
    if toks[0] != MAGIC or len(toks) != 2:
        raise ParseError(no, f"expected header '{MAGIC} {VERSION}'")
    if toks[1] != VERSION:
        raise ParseError(no, f"unsupported version {toks[1]}")

    n = None
    cards: list[int] | None = None
    blocks: list[dict] = []
    pending_values: tuple[dict, str] | None = None

    for no, toks in lines[1:]:
        key = toks[0]
        if pending_values is not None and _NUMBER.match(key):
            block, kind = pending_values
            block[kind].extend(toks)
            continue
        pending_values = None
        if key == "vars":
            if n is not None or len(toks) != 2:
                raise ParseError(no, "expected a single 'vars <n>' line")
            (n,) = _ints(toks[1:], no, "vars")
            if n < 0:
                raise ParseError(no, "number of variables must be >= 0")
        elif key == "card":
            if n is None:
                raise ParseError(no, "'card' before 'vars'")
            cards = _ints(toks[1:], no, "card")
            if len(cards) != n:
                raise ParseError(no, f"expected {n} cardinalities, got {len(cards)}")
        elif key == "factor":
            if n is None:
                raise ParseError(no, "'factor' before 'vars'")
            ints = _ints(toks[1:], no, "factor")
            if not ints or len(ints) != ints[0] + 1:
                raise ParseError(no, "expected 'factor <k> <v_1> ... <v_k>'")
            blocks.append({"line": no, "scope": ints[1:], "sym": None, "table": None, "ctable": None})
        elif key in ("sym", "table", "ctable"):
            if not blocks:
                raise ParseError(no, f"'{key}' outside a factor block")
            block = blocks[-1]
            if block[key] is not None:
                raise ParseError(no, f"duplicate '{key}' in factor block")
            if key == "sym":
                block["sym"] = _parse_groups(toks[1:], no)
            else:
                block[key] = list(toks[1:])
                pending_values = (block, key)
        else:
            raise ParseError(no, f"unknown directive {key!r}")

    if n is None:
        raise ParseError(lines[-1][0], "missing 'vars' line")
    if cards is None:
        if n:
            raise ParseError(lines[-1][0], "missing 'card' line")
        cards = []
    variables = dict(enumerate(cards))
    for v, c in variables.items():
        if c < 1:
            raise ValidationError(None, f"X{v} has cardinality {c} < 1")

    factors, structures, declared = [], [], []
    for i, block in enumerate(blocks):
        f, structure, partition = _build_factor(i, block, variables, validate)
        factors.append(f)
        structures.append(structure)
        declared.append(partition)
    structures = [s if s is not None else structure_of(f) for f, s in zip(factors, structures)]
    graph = FactorGraph(variables, factors, structures)
    return ModelFile(graph, tuple(declared))


def _values(i, tokens) -> np.ndarray:
    try:
        vals = np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError:
        raise ValidationError(i, "table contains a non-numeric value") from None
    if np.any(np.isnan(vals)) or np.any(vals < 0):
        raise ValidationError(i, "potentials must be non-negative numbers")
    return vals


def _build_factor(i, block, variables, validate):
    scope = block["scope"]
    if len(set(scope)) != len(scope):
        raise ValidationError(i, f"duplicate variable in scope {scope}")
    for v in scope:
        if v not in variables:
            raise ValidationError(i, f"unknown variable {v}")
    cards = [variables[v] for v in scope]
    has_table, has_ctable = block["table"] is not None, block["ctable"] is not None
    if has_table == has_ctable:
        raise ValidationError(i, "exactly one of 'table' or 'ctable' is required")
    partition = None
    if block["sym"] is not None:
        raw = block["sym"]
        for g in raw:
            for v in g:
                if v not in scope:
                    raise ValidationError(i, f"sym group {g} uses X{v} outside the scope")
        flat = [v for g in raw for v in g]
        if len(flat) != len(set(flat)):
            raise ValidationError(i, "sym groups are not disjoint")
        for g in raw:
            if len({variables[v] for v in g}) > 1:
                raise ValidationError(i, f"sym group {g} mixes cardinalities")
        partition = normalize_partition(raw)
    elif has_ctable:
        raise ValidationError(i, "'ctable' requires a 'sym' line")

    if has_table:
        vals = _values(i, block["table"])
        expected = int(np.prod(cards, dtype=np.int64)) if cards else 1
        if vals.size != expected:
            raise ValidationError(i, f"table has {vals.size} values, scope needs {expected}")
        f = DenseFactor(scope, cards, vals)
        if partition is None:
            return f, None, None
        if validate:
            try:
                check_partition(f, partition)
            except NotSymmetric as exc:
                raise ValidationError(i, str(exc)) from exc
        return f, FactorStructure(f.scope, f.cards, partition), partition

    raw = block["sym"]
    grouped = {v for g in raw for v in g}
    free = [v for v in scope if v not in grouped]
    groups = [g for g in raw if g]
    group_cards = [variables[g[0]] for g in groups]
    expected = int(np.prod([variables[v] for v in free], dtype=np.int64)) if free else 1
    for g, d in zip(groups, group_cards):
        expected *= compact_domain_size(len(g), d)
    vals = _values(i, block["ctable"])
    if vals.size != expected:
        raise ValidationError(i, f"ctable has {vals.size} values, the declared groups need {expected}")
    c = CompactFactor(free, [variables[v] for v in free], groups, group_cards, vals)
    return c, c.structure, partition


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def _fmt_sym(groups) -> str:
    return " ".join(["sym"] + ["{ " + " ".join(map(str, g)) + " }" for g in groups])


def format_model(model: ModelFile | FactorGraph) -> str:
    """Canonical FGSYM text; scopes are written in ascending id order."""
    if isinstance(model, FactorGraph):
        model = ModelFile(model, tuple(None for _ in model.factors))
    g = model.graph
    ids = list(g.variables)
    if ids != list(range(len(ids))):
        raise ValidationError(None, "FGSYM needs variable ids 0..n-1")
    out = [f"{MAGIC} {VERSION}", f"vars {len(ids)}", "card " + " ".join(str(c) for c in g.variables.values())]
    for f, p in zip(g.factors, model.declared):
        out.append(" ".join(["factor", str(len(f.scope))] + [str(v) for v in f.scope]))
        if isinstance(f, CompactFactor):
            out.append(_fmt_sym(f.groups))
            out.append("ctable " + _fmt(f.table))
        elif isinstance(f, DenseFactor):
            if p is not None:
                out.append(_fmt_sym(p))
            out.append("table " + _fmt(f.table))
        else:
            raise ValidationError(None, "cost-only factors have no potentials to write")
    return "\n".join(out) + "\n"


def parse_uai(text: str) -> FactorGraph:
    """Read a UAI MARKOV/BAYES network; factors carry no declared symmetries."""
    tokens = [t for line in text.splitlines() for t in line.split("#", 1)[0].split()]
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError(0, f"unexpected end of UAI input while reading {what}")
        pos += 1
        return tokens[pos - 1]

    def take_int(what):
        t = take(what)
        try:
            return int(t)
        except ValueError:
            raise ParseError(0, f"expected integer for {what}, got {t!r}") from None

    kind = take("header").upper()
    if kind not in ("MARKOV", "BAYES"):
        raise ParseError(1, f"unsupported UAI network type {kind!r}")
    n = take_int("variable count")
    cards = [take_int("cardinality") for _ in range(n)]
    m = take_int("factor count")
    scopes = []
    for _ in range(m):
        k = take_int("scope size")
        scopes.append([take_int("scope variable") for _ in range(k)])
    factors = []
    for i, scope in enumerate(scopes):
        count = take_int("table size")
        vals = [float(take("table entry")) for _ in range(count)]
        try:
            factors.append(DenseFactor(scope, [cards[v] for v in scope], vals))
        except (ValueError, IndexError) as exc:
            raise ValidationError(i, str(exc)) from exc
    return FactorGraph(dict(enumerate(cards)), factors)


def load_model(path, validate: bool = True) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), validate=validate)

