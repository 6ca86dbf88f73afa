"""Cumulative intermediate sizes of VE with and without compact encodings.

Random factor graphs made of fully symmetric factors are eliminated in the
greedy min-size order; each run records the dense and compact cost of every
step. Everything runs in cost-only mode, so no potential tables beyond the
(small) compact input factors are ever allocated.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import InvalidConfig
from .graph import TOTALS, FactorGraph
from .rng import ROLE_BENCH, ROLE_GENERATOR, Xoshiro256, mix_seed
from .search import greedy_order
from .symmetry import CompactFactor, compact_domain_size

CSV_COLUMNS = (
    "setting_rvs",
    "run",
    "seed",
    "order_policy",
    "totals_convention",
    "dense_total",
    "compact_total",
    "steps",
)


@dataclass(frozen=True)
class BenchConfig:
    rv_counts: tuple[int, ...] = (50, 55, 60, 65)
    num_factors: int = 10
    arity_range: tuple[int, int] = (5, 10)
    runs_per_setting: int = 10
    cardinality: int = 2
    seed: int = 0
    totals_convention: str = "full"

    def __post_init__(self):
        object.__setattr__(self, "rv_counts", tuple(self.rv_counts))
        object.__setattr__(self, "arity_range", tuple(self.arity_range))
        lo, hi = self.arity_range
        if not self.rv_counts or min(self.rv_counts) < 1:
            raise InvalidConfig("rv_counts must be non-empty and positive")
        if lo < 1 or hi < lo:
            raise InvalidConfig(f"bad arity range {self.arity_range}")
        if hi > min(self.rv_counts):
            raise InvalidConfig(f"max arity {hi} exceeds the smallest rv count {min(self.rv_counts)}")
        if self.num_factors < 1 or self.runs_per_setting < 1 or self.cardinality < 1:
            raise InvalidConfig("num_factors, runs_per_setting and cardinality must be >= 1")
        if self.totals_convention not in TOTALS:
            raise InvalidConfig(f"totals_convention must be one of {TOTALS}")


@dataclass(frozen=True)
class BenchRecord:
    setting_rvs: int
    run: int
    seed: int
    order: tuple[int, ...]
    dense_total: int
    compact_total: int
    steps: tuple[tuple[int, int], ...]
    order_policy: str = "greedy_min_size"
    totals_convention: str = "full"


@dataclass(frozen=True)
class BenchResult:
    config: BenchConfig
    records: tuple[BenchRecord, ...] = field(default=())

    def settings(self) -> list[int]:
        return sorted({r.setting_rvs for r in self.records})

    def strict_reductions(self) -> int:
        return sum(r.compact_total < r.dense_total for r in self.records)


def generate_random_fg(
    n: int,
    k: int,
    arity_range: tuple[int, int] = (5, 10),
    cardinality: int = 2,
    seed: int = 0,
) -> FactorGraph:
    """``k`` fully symmetric factors over random scopes of ``n`` variables.

    Each factor gets one potential per histogram, drawn from [0.1, 1.0]; the
    draw is repeated until all values are distinct, so the factor has no
    symmetry beyond the intended one.
    """
    lo, hi = arity_range
    if n < 1 or k < 0 or cardinality < 1 or lo < 1 or hi < lo or hi > n:
        raise InvalidConfig(f"invalid generator parameters n={n}, k={k}, arity={arity_range}, d={cardinality}")
    rng = Xoshiro256.for_role(seed, ROLE_GENERATOR)
    factors = []
    for _ in range(k):
        arity = rng.randint(lo, hi)
        scope = sorted(rng.sample(range(n), arity))
        size = compact_domain_size(arity, cardinality)
        while True:
            values = [rng.uniform(0.1, 1.0) for _ in range(size)]
            if len(set(values)) == size:
                break
        factors.append(CompactFactor((), (), [scope], [cardinality], values))
    return FactorGraph({v: cardinality for v in range(n)}, factors)


def run_seed(cfg: BenchConfig, setting_index: int, run: int) -> int:
    return mix_seed(cfg.seed ^ ROLE_BENCH, setting_index, run)


def _run_one(args) -> BenchRecord:
    cfg, si, run = args
    n = cfg.rv_counts[si]
    seed = run_seed(cfg, si, run)
    graph = generate_random_fg(n, cfg.num_factors, cfg.arity_range, cfg.cardinality, seed)
    order, ledger = greedy_order(graph)
    return BenchRecord(
        setting_rvs=n,
        run=run,
        seed=seed,
        order=order,
        dense_total=ledger.total("dense", cfg.totals_convention),
        compact_total=ledger.total("compact", cfg.totals_convention),
        steps=tuple((s.dense_cost, s.compact_cost) for s in ledger.steps),
        totals_convention=cfg.totals_convention,
    )


def run_benchmark(cfg: BenchConfig = BenchConfig(), jobs: int = 1) -> BenchResult:
    tasks = [(cfg, si, r) for si in range(len(cfg.rv_counts)) for r in range(cfg.runs_per_setting)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, tasks))
    else:
        records = [_run_one(t) for t in tasks]
    records.sort(key=lambda r: (r.setting_rvs, r.run))
    return BenchResult(cfg, tuple(records))


def to_csv(result: BenchResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in result.records:
        writer.writerow(
            [
                r.setting_rvs,
                r.run,
                r.seed,
                r.order_policy,
                r.totals_convention,
                r.dense_total,
                r.compact_total,
                ";".join(f"{d}:{c}" for d, c in r.steps),
            ]
        )
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        row["steps"] = [tuple(int(x) for x in p.split(":")) for p in row["steps"].split(";") if p]
        for key in ("setting_rvs", "run", "seed", "dense_total", "compact_total"):
            row[key] = int(row[key])
        rows.append(row)
    return rows


PANEL_W, PANEL_H, MARGIN = 280, 220, 45


def to_svg(result: BenchResult) -> str:
    """Line chart with one panel per setting: solid dense, dashed compact totals.

    The y axis is log10 of the cumulative size, shared by both series of a panel.
    """
    settings = result.settings()
    width = MARGIN + len(settings) * (PANEL_W + MARGIN)
    height = PANEL_H + 2 * MARGIN
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for p, n in enumerate(settings):
        recs = [r for r in result.records if r.setting_rvs == n]
        x0 = MARGIN + p * (PANEL_W + MARGIN)
        y0 = MARGIN
        logs = [math.log10(max(v, 1)) for r in recs for v in (r.dense_total, r.compact_total)]
        lo, hi = min(logs), max(logs)
        if hi - lo < 1e-9:
            lo, hi = lo - 0.5, hi + 0.5

        def px(i):
            return x0 + (PANEL_W * i / (len(recs) - 1) if len(recs) > 1 else PANEL_W / 2)

        def py(v):
            return y0 + PANEL_H * (hi - math.log10(max(v, 1))) / (hi - lo)

        out.append(f'<g class="panel" data-rvs="{n}">')
        out.append(
            f'<rect x="{x0}" y="{y0}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#888"/>'
        )
        out.append(f'<text x="{x0 + PANEL_W / 2:.1f}" y="{y0 - 12}" text-anchor="middle" font-size="13">{n} RVs</text>')
        out.append(f'<text x="{x0 - 4}" y="{y0 + 4}" text-anchor="end" font-size="9">1e{hi:.1f}</text>')
        out.append(f'<text x="{x0 - 4}" y="{y0 + PANEL_H}" text-anchor="end" font-size="9">1e{lo:.1f}</text>')
        out.append(f'<text x="{x0 + PANEL_W / 2:.1f}" y="{y0 + PANEL_H + 20}" text-anchor="middle" font-size="10">run</text>')
        for cls, attr, dash in (("dense", "dense_total", ""), ("compact", "compact_total", ' stroke-dasharray="6,4"')):
            pts = " ".join(f"{px(i):.2f},{py(getattr(r, attr)):.2f}" for i, r in enumerate(recs))
            out.append(f'<polyline class="series {cls}" fill="none" stroke="black" stroke-width="1.5"{dash} points="{pts}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_report(result: BenchResult, fmt: str, path: str | os.PathLike) -> None:
    if fmt == "csv":
        text = to_csv(result)
    elif fmt == "svg":
        text = to_svg(result)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def default_jobs() -> int:
    return os.cpu_count() or 1


def summarize(result: BenchResult) -> list[tuple[int, float, float]]:
    """Mean dense and compact totals per setting."""
    rows = []
    for n in result.settings():
        recs = [r for r in result.records if r.setting_rvs == n]
        rows.append(
            (n, sum(r.dense_total for r in recs) / len(recs), sum(r.compact_total for r in recs) / len(recs))
        )
    return rows
