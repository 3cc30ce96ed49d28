"""Report-, sentence- and visual-level uncertainty from Monte-Carlo samples."""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .embeddings import Embedder, SentenceVectorSource, WordVectorStore, as_embedder
from .errors import BadMagic, DegenerateSamples, ShapeMismatch, StackFormatError
from .similarity import match_sentences, smas, wrs_sentences
from .text import Report, Sentence

STACK_MAGIC = b"VSTK"
STACK_VERSION = 1
_HEADER = struct.Struct("<4sH4I")


@dataclass(frozen=True)
class McSampleSet:
    case_id: str
    samples: tuple[Report, ...]
    ground_truth: Report | None = None
    annotations: frozenset[str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))

    @property
    def T(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class PairwiseSimilarityMatrix:
    values: np.ndarray

    @property
    def T(self) -> int:
        return self.values.shape[0]

    def pair_values(self) -> np.ndarray:
        """Upper-triangle entries, row-major (i < j)."""
        iu = np.triu_indices(self.T, k=1)
        return self.values[iu]


@dataclass(frozen=True)
class SentenceUncertainty:
    index: int
    sentence: Sentence
    value: float
    supported: bool = True  # False: no other sample had a matched sentence

    @property
    def variance(self) -> float:
        return self.value * self.value


@dataclass
class UncertaintyReport:
    case_id: str
    reference_index: int
    smasvar: float
    sentence_vars: list[SentenceUncertainty] = field(default_factory=list)
    visvar: float | None = None
    vis_mu_mean: float | None = None
    vis_var_mean: float | None = None

    @property
    def smasvar_sq(self) -> float:
        return self.smasvar * self.smasvar


def _pop_var(x: np.ndarray, axis: int = 0) -> np.ndarray:
    """Population variance, shifted by the first sample so equal inputs give exactly 0."""
    d = x - np.take(x, [0], axis=axis)
    return np.mean((d - d.mean(axis=axis, keepdims=True)) ** 2, axis=axis)


def _require_two(T: int) -> None:
    if T < 2:
        raise DegenerateSamples(f"need at least 2 MC samples, got {T}")


def pairwise_smas(samples: McSampleSet | Sequence[Report], store: WordVectorStore | Embedder,
                  src: SentenceVectorSource | None = None, match_by: str = "cosine") -> PairwiseSimilarityMatrix:
    reports = samples.samples if isinstance(samples, McSampleSet) else tuple(samples)
    T = len(reports)
    _require_two(T)
    emb = as_embedder(store, src)
    keys = [_content_key(r) for r in reports]
    memo: dict[tuple, float] = {}
    values = np.eye(T)
    for i in range(T):
        for j in range(i + 1, T):
            # canonical argument order: textually identical samples get bit-identical rows
            a, b = (i, j) if keys[i] <= keys[j] else (j, i)
            pair = (keys[a], keys[b])
            if pair not in memo:
                memo[pair] = smas(reports[a], reports[b], emb, match_by=match_by)
            values[i, j] = values[j, i] = memo[pair]
    return PairwiseSimilarityMatrix(values)


def _content_key(r: Report) -> tuple:
    return tuple((s.tokens, s.raw) for s in r)


def smasvar(m: PairwiseSimilarityMatrix) -> float:
    """Standard deviation of the T(T-1)/2 pairwise SMAS values (population form)."""
    _require_two(m.T)
    return math.sqrt(float(_pop_var(m.pair_values())))


def reference_report(m: PairwiseSimilarityMatrix) -> int:
    """Sample with the smallest summed SMAS distance to the others; lowest index on ties."""
    _require_two(m.T)
    dist = 1.0 - m.values
    np.fill_diagonal(dist, 0.0)
    # sorted rows: samples with the same distances get bit-identical totals
    return int(np.argmin(np.sort(dist, axis=1).sum(axis=1)))


def smasvar_l(samples: McSampleSet | Sequence[Report], ref_index: int, store: WordVectorStore | Embedder,
              src: SentenceVectorSource | None = None, match_by: str = "cosine") -> list[SentenceUncertainty]:
    """Per-sentence uncertainty of the reference sample.

    For every other sample the sentence matched to reference sentence l is
    scored with WRS; a sample with no matched sentence contributes 0.  The
    value is the population standard deviation over the T-1 samples.
    """
    reports = samples.samples if isinstance(samples, McSampleSet) else tuple(samples)
    T = len(reports)
    _require_two(T)
    emb = as_embedder(store, src)
    ref = reports[ref_index]
    scores = np.zeros((len(ref), T - 1))
    matched = np.zeros((len(ref), T - 1), dtype=bool)
    col = 0
    for j, other in enumerate(reports):
        if j == ref_index:
            continue
        pairing = match_sentences(ref, other, emb, by=match_by)
        for l, k in pairing.pairs:
            scores[l, col] = wrs_sentences(ref[l], other[k], emb)
            matched[l, col] = True
        col += 1
    out = []
    for l, sentence in enumerate(ref):
        var = float(_pop_var(scores[l]))
        out.append(SentenceUncertainty(l, sentence, math.sqrt(var), bool(matched[l].any())))
    return out


# ---------------------------------------------------------------- visual


@dataclass(frozen=True)
class ReconstructionStack:
    data: np.ndarray  # (T, C, H, W)

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 4:
            raise ShapeMismatch(f"expected a (T, C, H, W) array, got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ShapeMismatch(f"all stack dimensions must be positive, got {arr.shape}")
        object.__setattr__(self, "data", arr)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return tuple(self.data.shape)

    @classmethod
    def from_samples(cls, samples: Sequence[np.ndarray]) -> "ReconstructionStack":
        arrays = [np.asarray(s) for s in samples]
        if not arrays:
            raise DegenerateSamples("empty reconstruction stack")
        first = arrays[0].shape
        for t, a in enumerate(arrays):
            if a.shape != first:
                raise ShapeMismatch(f"sample {t} has shape {a.shape}, expected {first}")
        stacked = np.stack(arrays)
        while stacked.ndim < 4:
            stacked = stacked[:, None]
        return cls(stacked)


def vis_stats(stack: ReconstructionStack | Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel MC mean and population variance."""
    if not isinstance(stack, ReconstructionStack):
        stack = ReconstructionStack.from_samples(stack)
    data = stack.data.astype(np.float64)
    _require_two(data.shape[0])
    base = data[0]
    shift = (data - base).mean(axis=0)
    mu = base + shift
    var = _pop_var(data, axis=0)
    return mu, var


def visvar(var_map: np.ndarray) -> float:
    """Mean over pixels of the per-pixel standard deviation."""
    var_map = np.asarray(var_map, dtype=np.float64)
    if np.any(var_map < 0):
        raise ValueError("variances must be non-negative")
    return float(np.mean(np.sqrt(var_map)))


def write_stack(path: str | os.PathLike, stack: ReconstructionStack | np.ndarray) -> None:
    data = stack.data if isinstance(stack, ReconstructionStack) else ReconstructionStack(stack).data
    T, C, H, W = data.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(STACK_MAGIC, STACK_VERSION, T, C, H, W))
        fh.write(np.ascontiguousarray(data, dtype="<f4").tobytes())


def read_stack(path: str | os.PathLike) -> ReconstructionStack:
    with open(path, "rb") as fh:
        blob = fh.read()
    return parse_stack(blob)


def parse_stack(blob: bytes) -> ReconstructionStack:
    if len(blob) < 4 or blob[:4] != STACK_MAGIC:
        raise BadMagic(f"bad magic {blob[:4]!r}, expected {STACK_MAGIC!r}")
    if len(blob) < _HEADER.size:
        raise StackFormatError(f"truncated header: {len(blob)} bytes")
    _, version, T, C, H, W = _HEADER.unpack_from(blob)
    if version != STACK_VERSION:
        raise StackFormatError(f"unsupported stack version {version}")
    if min(T, C, H, W) < 1:
        raise ShapeMismatch(f"non-positive shape ({T}, {C}, {H}, {W})")
    expected = T * C * H * W * 4
    payload = len(blob) - _HEADER.size
    if payload != expected:
        raise ShapeMismatch(f"shape ({T}, {C}, {H}, {W}) needs {expected} data bytes, file has {payload}")
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).reshape(T, C, H, W)
    return ReconstructionStack(data.astype(np.float32))


# ---------------------------------------------------------------- pipeline


def estimate(samples: McSampleSet, store: WordVectorStore | Embedder, src: SentenceVectorSource | None = None,
             stack: ReconstructionStack | None = None, match_by: str = "cosine") -> tuple[UncertaintyReport, PairwiseSimilarityMatrix]:
    """Full per-case pipeline: pairwise SMAS, SMASVar, reference report, SMASVar-l, VISVar."""
    emb = as_embedder(store, src)
    m = pairwise_smas(samples, emb, match_by=match_by)
    ref = reference_report(m)
    report = UncertaintyReport(
        case_id=samples.case_id,
        reference_index=ref,
        smasvar=smasvar(m),
        sentence_vars=smasvar_l(samples, ref, emb, match_by=match_by),
    )
    if stack is not None:
        mu, var = vis_stats(stack)
        report.visvar = visvar(var)
        report.vis_mu_mean = float(mu.mean())
        report.vis_var_mean = float(var.mean())
    return report, m
