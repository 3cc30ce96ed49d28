"""Metric-validation analytics: label/length differences, pair sampling, correlations."""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .embeddings import Embedder, SentenceVectorSource, WordVectorStore, as_embedder
from .errors import DegenerateSeries, EmptyCorpus
from .similarity import SentenceScorer, adjusted_score, report_bleu4, smas, wrs_full
from .text import Report

DEFAULT_PAIR_COUNT = 2500
METRIC_COLUMNS = ("info_diff", "len_diff", "wrs_full", "bleu4", "adj_bleu4", "smas")


@dataclass(frozen=True)
class AnnotatedReport:
    report: Report
    labels: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "labels", frozenset(self.labels))


def info_diff(a: AnnotatedReport, b: AnnotatedReport) -> int:
    return abs(len(a.labels) - len(b.labels))


def len_diff(a: AnnotatedReport | Report, b: AnnotatedReport | Report) -> int:
    ra = a.report if isinstance(a, AnnotatedReport) else a
    rb = b.report if isinstance(b, AnnotatedReport) else b
    return abs(len(ra) - len(rb))


def sample_pairs(corpus_size: int | Sequence, n: int, seed: int) -> list[tuple[int, int]]:
    """``n`` index pairs drawn uniformly with replacement (self-pairs allowed)."""
    size = corpus_size if isinstance(corpus_size, int) else len(corpus_size)
    if size < 1:
        raise EmptyCorpus("cannot sample pairs from an empty corpus")
    if n < 0:
        raise ValueError("pair count must be non-negative")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, size, size=(n, 2))
    return [(int(a), int(b)) for a, b in idx]


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("series must be one-dimensional and of equal length")
    if x.size < 2:
        raise ValueError("need at least two observations")
    for name, s in (("x", x), ("y", y)):
        if np.all(s == s[0]):
            raise DegenerateSeries(f"series {name} has zero variance", column=name)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(np.dot(dx, dx)) * float(np.dot(dy, dy)))
    if denom == 0.0:
        # spread too small to represent once squared
        raise DegenerateSeries("series variance underflows to zero")
    r = float(np.dot(dx, dy)) / denom
    return max(-1.0, min(1.0, r))


@dataclass
class MetricTable:
    columns: dict[str, list[float]] = field(default_factory=dict)
    pairs: list[tuple[int, int]] = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return len(self.pairs)

    def add_column(self, name: str, values: Sequence[float]) -> None:
        if name in self.columns:
            raise ValueError(f"duplicate column {name!r}")
        if len(values) != self.n_rows:
            raise ValueError(f"column {name!r} has {len(values)} rows, table has {self.n_rows}")
        self.columns[name] = list(values)

    def to_csv(self, fmt: Callable[[float], str] = repr) -> str:
        buf = io.StringIO()
        names = list(self.columns)
        buf.write(",".join(["a", "b"] + names) + "\n")
        for r, (a, b) in enumerate(self.pairs):
            cells = [str(a), str(b)] + [_cell(self.columns[c][r], fmt) for c in names]
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()


def _cell(v, fmt) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return fmt(float(v))


@dataclass
class CorrelationMatrix:
    names: list[str]
    values: np.ndarray

    def __getitem__(self, key: tuple[str, str]) -> float:
        a, b = key
        return float(self.values[self.names.index(a), self.names.index(b)])

    def to_csv(self, fmt: Callable[[float], str] = repr) -> str:
        buf = io.StringIO()
        buf.write("," + ",".join(self.names) + "\n")
        for i, name in enumerate(self.names):
            buf.write(name + "," + ",".join(fmt(float(v)) for v in self.values[i]) + "\n")
        return buf.getvalue()


def correlation_matrix(table: MetricTable) -> CorrelationMatrix:
    names = list(table.columns)
    if table.n_rows < 2:
        raise ValueError("need at least two rows to correlate")
    series = {n: np.asarray(table.columns[n], dtype=np.float64) for n in names}
    for n, s in series.items():
        if np.all(s == s[0]):
            raise DegenerateSeries(f"metric column {n!r} has zero variance", column=n)
    k = len(names)
    values = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            values[i, j] = values[j, i] = pearson(series[names[i]], series[names[j]])
    return CorrelationMatrix(names, values)


def metric_row(a: AnnotatedReport, b: AnnotatedReport, emb: Embedder, match_by: str = "cosine") -> dict[str, float]:
    """All validation metrics for one (generated=a, reference=b) pair."""
    bleu = SentenceScorer("bleu4")
    return {
        "info_diff": info_diff(a, b),
        "len_diff": len_diff(a, b),
        "wrs_full": wrs_full(a.report, b.report, emb),
        "bleu4": report_bleu4(a.report, b.report),
        "adj_bleu4": adjusted_score(a.report, b.report, bleu, emb, match_by=match_by),
        "smas": smas(a.report, b.report, emb, match_by=match_by),
    }


def build_metric_table(corpus: Sequence[AnnotatedReport], pairs: Sequence[tuple[int, int]],
                       store: WordVectorStore | Embedder, src: SentenceVectorSource | None = None,
                       workers: int = 1, match_by: str = "cosine") -> MetricTable:
    emb = as_embedder(store, src)

    def row(pair):
        a, b = pair
        return metric_row(corpus[a], corpus[b], emb, match_by)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, pairs))
    else:
        rows = [row(p) for p in pairs]
    table = MetricTable(pairs=list(pairs))
    for name in METRIC_COLUMNS:
        table.add_column(name, [r[name] for r in rows])
    return table
