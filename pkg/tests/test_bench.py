from math import comb

import pytest

from symve import CompactFactor, decode, detect_symmetries, run_elimination
from symve.bench import (
    CSV_COLUMNS,
    BenchConfig,
    generate_random_fg,
    read_csv,
    run_benchmark,
    summarize,
    to_csv,
    to_svg,
)
from symve.errors import InvalidConfig

SMALL = BenchConfig(rv_counts=(12, 14), num_factors=4, arity_range=(3, 6), runs_per_setting=3)


def test_generator_is_deterministic():
    a = generate_random_fg(20, 5, (3, 7), 2, seed=11)
    b = generate_random_fg(20, 5, (3, 7), 2, seed=11)
    c = generate_random_fg(20, 5, (3, 7), 2, seed=12)
    assert a == b
    assert a != c


def test_generator_shapes():
    g = generate_random_fg(30, 8, (4, 9), 3, seed=2)
    assert len(g.factors) == 8
    for f in g.factors:
        assert isinstance(f, CompactFactor)
        assert 4 <= len(f.scope) <= 9
        assert len(f.groups) == 1 and f.free_scope == ()
        assert f.size == comb(len(f.scope) + 2, 2)
        assert len(set(f.table.tolist())) == f.size
        assert all(0.1 <= x <= 1.0 for x in f.table)
    with pytest.raises(InvalidConfig):
        generate_random_fg(5, 1, (2, 6))


def test_generated_factors_have_exactly_one_full_group():
    seen = 0
    for seed in range(25):
        for f in generate_random_fg(12, 4, (2, 8), 2, seed=seed).factors:
            assert detect_symmetries(decode(f)) == (f.scope,)
            seen += 1
    assert seen == 100


@pytest.mark.parametrize("d", [2, 3])
def test_single_full_factor_costs_closed_form(d):
    n = 12 if d == 2 else 8
    g = generate_random_fg(n, 1, (n, n), d, seed=4)
    _, ledger = run_elimination(g, list(range(n)), "cost_only")
    for j, s in enumerate(ledger.steps):
        m = n - j
        assert s.dense_cost == d**m
        assert s.compact_cost == (comb(m + d - 1, d - 1) if m >= 2 else d)


def test_config_validation():
    with pytest.raises(InvalidConfig):
        BenchConfig(rv_counts=(4,), arity_range=(5, 10))
    with pytest.raises(InvalidConfig):
        BenchConfig(arity_range=(3, 2))
    with pytest.raises(InvalidConfig):
        BenchConfig(totals_convention="half")


def test_small_benchmark_csv():
    res = run_benchmark(SMALL)
    assert len(res.records) == 6 and res.settings() == [12, 14]
    text = to_csv(res)
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS) and lines[-1] == ""
    rows = read_csv(text)
    assert len(rows) == 6
    for row, rec in zip(rows, res.records):
        assert row["dense_total"] == rec.dense_total == sum(d for d, _ in row["steps"])
        assert row["compact_total"] == rec.compact_total <= rec.dense_total
        assert row["order_policy"] == "greedy_min_size"
    assert to_csv(run_benchmark(SMALL)) == text
    assert len(summarize(res)) == 2


def test_parallel_matches_serial():
    assert to_csv(run_benchmark(SMALL, jobs=2)) == to_csv(run_benchmark(SMALL, jobs=1))


def test_paper_totals_drop_last_step():
    full = run_benchmark(SMALL)
    paper = run_benchmark(BenchConfig(**{**SMALL.__dict__, "totals_convention": "paper"}))
    for f, p in zip(full.records, paper.records):
        assert f.order == p.order
        assert p.dense_total == f.dense_total - f.steps[-1][0]
        assert p.compact_total == f.compact_total - f.steps[-1][1]


def test_svg_has_two_series_per_panel():
    svg = to_svg(run_benchmark(SMALL))
    assert svg.count('class="panel"') == 2
    assert svg.count('class="series dense"') == 2
    assert svg.count('class="series compact"') == 2
    assert svg.count('stroke-dasharray="6,4"') == 2


def test_cost_only_totals_match_materialized():
    for seed in range(5):
        g = generate_random_fg(14, 4, (3, 7), 2, seed=seed)
        order = list(range(14))
        _, lo = run_elimination(g, order, "cost_only")
        _, lc = run_elimination(g, order, "compact")
        _, ld = run_elimination(g, order, "dense")
        for ledger in (lc, ld):
            assert ledger.total("dense") == lo.total("dense")
            assert ledger.total("compact") == lo.total("compact")
