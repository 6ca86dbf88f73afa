from pathlib import Path

import numpy as np
import pytest

from helpers import random_graph
from symve import (
    CompactFactor,
    DenseFactor,
    ParseError,
    ValidationError,
    decode,
    format_model,
    joint_oracle,
    load_model,
    parse_model,
    parse_uai,
    run_elimination,
)

MODELS = Path(__file__).resolve().parent.parent / "models"
FGSYM_FILES = sorted(MODELS.glob("*.fgsym"))


def test_sym3_dense_and_compact_files_agree():
    dense = load_model(MODELS / "sym3.fgsym")
    compact = load_model(MODELS / "sym3_compact.fgsym")
    (fd,), (fc,) = dense.graph.factors, compact.graph.factors
    assert isinstance(fd, DenseFactor) and isinstance(fc, CompactFactor)
    assert fc.table.tolist() == [4, 3, 2, 1]
    assert decode(fc) == fd
    assert dense.declared == compact.declared == (((0, 1, 2),),)


@pytest.mark.parametrize("path", FGSYM_FILES, ids=lambda p: p.name)
def test_round_trip(path):
    model = load_model(path)
    text = format_model(model)
    again = parse_model(text)
    assert again == model
    assert format_model(again) == text


@pytest.mark.parametrize("path", FGSYM_FILES, ids=lambda p: p.name)
def test_shipped_models_z(path):
    g = load_model(path).graph
    zd, _ = run_elimination(g, sorted(g.variables), "dense")
    zc, _ = run_elimination(g, sorted(g.variables), "compact")
    assert zd == pytest.approx(joint_oracle(g), rel=1e-12)
    assert zc == pytest.approx(zd, rel=1e-12)


def test_mixed_ctable_layout():
    g = load_model(MODELS / "mixed.fgsym").graph
    f = g.factors[0]
    assert f.free_scope == (3,) and f.groups == ((0, 1, 2),)
    assert f.value({3: 1, 0: 0, 1: 1, 2: 1}) == 2.0
    assert f.value({3: 2, 0: 1, 1: 1, 2: 1}) == 5.0


def test_random_graphs_round_trip():
    rng = np.random.default_rng(6)
    for _ in range(10):
        g = random_graph(rng, 6, 5, cards={v: int(rng.integers(1, 4)) for v in range(6)})
        assert parse_model(format_model(g)).graph == g


def test_empty_model():
    m = parse_model("FGSYM 1\nvars 0\n")
    assert m.graph.n == 0 and m.graph.factors == ()
    assert run_elimination(m.graph, [])[0] == 1.0


def test_continuation_lines_and_comments():
    text = "FGSYM 1 # header\nvars 2\ncard 2 2\nfactor 2 0 1\ntable 1 2\n  3 4 # more\n"
    f = parse_model(text).graph.factors[0]
    assert f.table.tolist() == [1, 2, 3, 4]


def test_unsorted_scope_is_canonicalized():
    text = "FGSYM 1\nvars 2\ncard 2 3\nfactor 2 1 0\ntable 1 2 3 4 5 6\n"
    f = parse_model(text).graph.factors[0]
    assert f.scope == (0, 1)
    assert f.value({1: 2, 0: 0}) == 5


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("FGSYM 2\n", 1),
        ("FGSYM 1\nvars x\n", 2),
        ("FGSYM 1\nvars 2\ncard 2\n", 3),
        ("FGSYM 1\nvars 2\ncard 2 2\nfactor 3 0 1\n", 4),
        ("FGSYM 1\nvars 2\ncard 2 2\ntable 1 2\n", 4),
        ("FGSYM 1\nvars 2\ncard 2 2\nfactor 2 0 1\nsym { 0 1\ntable 1 2 2 3\n", 5),
        ("FGSYM 1\nvars 2\ncard 2 2\nfactor 2 0 1\nweights 1\n", 5),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_model(text)
    assert info.value.line == line


@pytest.mark.parametrize(
    "body, index",
    [
        ("factor 2 0 1\ntable 1 2 3\n", 0),
        ("factor 1 0\ntable 1 1\nfactor 2 0 5\ntable 1 2 3 4\n", 1),
        ("factor 2 0 1\nsym { 0 1 }\nctable 1 2\n", 0),
        ("factor 2 0 1\nctable 1 2 3\n", 0),
        ("factor 2 0 1\ntable 1 -2 3 4\n", 0),
        ("factor 2 0 1\nsym { 0 1 }\ntable 1 2 3 4\n", 0),
        ("factor 2 0 2\nsym { 0 2 }\ntable 1 2 2 3 4 5\n", 0),
    ],
)
def test_validation_errors_carry_factor(body, index):
    text = "FGSYM 1\nvars 3\ncard 2 2 3\n" + body
    with pytest.raises(ValidationError) as info:
        parse_model(text)
    assert info.value.factor_index == index


def test_no_validate_defers_symmetry_check():
    text = "FGSYM 1\nvars 2\ncard 2 2\nfactor 2 0 1\nsym { 0 1 }\ntable 1 2 3 4\n"
    m = parse_model(text, validate=False)
    with pytest.raises(ValidationError):
        m.verify()
    parse_model(text.replace("1 2 3 4", "1 2 2 4")).verify()


def test_uai_import():
    g = parse_uai((MODELS / "small.uai").read_text())
    assert g.variables == {0: 2, 1: 2, 2: 3}
    assert [f.scope for f in g.factors] == [(0, 1), (1, 2)]
    z, _ = run_elimination(g, [0, 1, 2])
    assert z == pytest.approx(joint_oracle(g))
    assert parse_model(format_model(g)).graph == g
    with pytest.raises(ParseError):
        parse_uai("MARKOV\n2\n2")
    with pytest.raises(ParseError):
        parse_uai("FACTOR\n1\n2\n0\n")
