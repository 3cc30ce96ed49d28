"""Sentence matching and report-level similarity (SMS, SMAS, adjusted BLEU)."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .embeddings import Embedder, SentenceVectorSource, WordVectorStore, as_embedder
from .text import Report, Sentence
from .transport import wrs as _wrs

SCORER_KINDS = ("wrs", "bleu4", "embedding-cosine")
MATCH_MODES = ("cosine", "wrs")


@dataclass(frozen=True)
class SentencePairing:
    pairs: tuple[tuple[int, int], ...]
    scores: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def partner_of(self, i: int) -> int | None:
        """Index in the second report matched to sentence ``i`` of the first."""
        for a, b in self.pairs:
            if a == i:
                return b
        return None


def greedy_match(table) -> SentencePairing:
    """Repeatedly take the best remaining (i, j) and drop its row and column.

    Ties are broken by lowest (i, j).  This is greedy, not an optimal
    assignment.
    """
    table = np.asarray(table, dtype=np.float64)
    if table.ndim != 2 or table.size == 0:
        return SentencePairing((), ())
    n_rows, n_cols = table.shape
    order = sorted(((-table[i, j], i, j) for i in range(n_rows) for j in range(n_cols)))
    used_i, used_j = set(), set()
    pairs, scores = [], []
    limit = min(n_rows, n_cols)
    for neg, i, j in order:
        if i in used_i or j in used_j:
            continue
        pairs.append((i, j))
        scores.append(-neg)
        used_i.add(i)
        used_j.add(j)
        if len(pairs) == limit:
            break
    return SentencePairing(tuple(pairs), tuple(scores))


def _cosine(a: np.ndarray | None, b: np.ndarray | None) -> float:
    if a is None or b is None:
        return 0.0
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b)) / (na * nb)


def similarity_table(r: Report, r2: Report, emb: Embedder, by: str = "cosine") -> np.ndarray:
    """L x L' table of sentence similarities used for matching.

    A sentence without a usable vector scores 0 against everything.
    """
    if by not in MATCH_MODES:
        raise ValueError(f"unknown match mode {by!r}")
    table = np.zeros((len(r), len(r2)))
    if by == "wrs":
        for i, s in enumerate(r):
            for j, s2 in enumerate(r2):
                table[i, j] = wrs_sentences(s, s2, emb)
        return table
    vecs = [emb.sentence_vector(s) for s in r]
    vecs2 = [emb.sentence_vector(s) for s in r2]
    for i, a in enumerate(vecs):
        for j, b in enumerate(vecs2):
            table[i, j] = _cosine(a, b)
    return table


def match_sentences(r: Report, r2: Report, store: WordVectorStore | Embedder,
                    src: SentenceVectorSource | None = None, by: str = "cosine") -> SentencePairing:
    if len(r) == 0 or len(r2) == 0:
        return SentencePairing((), ())
    emb = as_embedder(store, src)
    return greedy_match(similarity_table(r, r2, emb, by))


def wrs_sentences(s: Sentence, s2: Sentence, emb: Embedder) -> float:
    key = (s.tokens, s2.tokens)
    val = emb.pair_cache.get(key)
    if val is None:
        val = emb.pair_cache[key] = _wrs(emb.words(s), emb.words(s2))
    return val


# ---------------------------------------------------------------- BLEU


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[k:k + n]) for k in range(len(tokens) - n + 1))


def sentence_bleu4(hyp: Sentence | Sequence[str], ref: Sentence | Sequence[str]) -> float:
    """BLEU-4 of one hypothesis against one reference.

    Smoothing: an order n >= 2 with n-grams in the hypothesis but no match
    gets +1 on numerator and denominator.  Orders longer than the
    hypothesis are left out of the geometric mean, so identical short
    sentences still score 1.  No unigram overlap scores 0.
    """
    h = hyp.tokens if isinstance(hyp, Sentence) else tuple(hyp)
    r = ref.tokens if isinstance(ref, Sentence) else tuple(ref)
    c, rl = len(h), len(r)
    if c == 0 or rl == 0:
        return 0.0
    log_sum = 0.0
    orders = 0
    for n in range(1, 5):
        total = c - n + 1
        if total <= 0:
            break
        hyp_counts = _ngram_counts(h, n)
        ref_counts = _ngram_counts(r, n)
        matches = sum(min(cnt, ref_counts[g]) for g, cnt in hyp_counts.items())
        if matches == 0:
            if n == 1:
                return 0.0
            matches, total = 1, total + 1
        log_sum += math.log(matches / total)
        orders += 1
    bp = 1.0 if c > rl else math.exp(1.0 - rl / c)
    return bp * math.exp(log_sum / orders)


def report_bleu4(r: Report, r2: Report) -> float:
    """BLEU-4 with each whole report flattened into one sentence."""
    return sentence_bleu4(r.tokens, r2.tokens)


# ---------------------------------------------------------------- scorers


@dataclass
class SentenceScorer:
    """Sentence-level similarity plugged into SMS.

    ``bleu4`` is directional: it is called as score(generated, reference).
    """

    kind: str
    embedder: Embedder | None = None

    def __post_init__(self):
        if self.kind not in SCORER_KINDS:
            raise ValueError(f"unknown scorer {self.kind!r}; expected one of {SCORER_KINDS}")
        if self.kind != "bleu4" and self.embedder is None:
            raise ValueError(f"scorer {self.kind!r} needs word vectors")

    @property
    def symmetric(self) -> bool:
        return self.kind != "bleu4"

    def __call__(self, s: Sentence, s2: Sentence) -> float:
        if self.kind == "bleu4":
            return sentence_bleu4(s, s2)
        if self.kind == "wrs":
            return wrs_sentences(s, s2, self.embedder)
        a = self.embedder.sentence_vector(s)
        b = self.embedder.sentence_vector(s2)
        if a is None and b is None:
            return 1.0
        return _cosine(a, b)


def make_scorer(kind: str, store: WordVectorStore | Embedder | None = None,
                src: SentenceVectorSource | None = None) -> SentenceScorer:
    emb = as_embedder(store, src) if store is not None else None
    return SentenceScorer(kind, emb)


def sms(r: Report, r2: Report, pairing: SentencePairing,
        scorer: Callable[[Sentence, Sentence], float]) -> float:
    """Matched-pair similarity sum scaled by 2 / (L + L')."""
    total_len = len(r) + len(r2)
    if total_len == 0:
        return 1.0
    total = sum(scorer(r[i], r2[j]) for i, j in pairing.pairs)
    return 2.0 * total / total_len


def length_penalty(n: int, n2: int) -> float:
    """1 - |n - n2| / max(n, n2), written as min/max so it rounds only once."""
    longest = max(n, n2)
    if longest == 0:
        return 1.0
    return min(n, n2) / longest


def adjusted_score(r: Report, r2: Report, scorer: Callable[[Sentence, Sentence], float],
                   store: WordVectorStore | Embedder, src: SentenceVectorSource | None = None,
                   match_by: str = "cosine") -> float:
    """MATCH, then SMS with ``scorer`` on the matched pairs, then the length penalty."""
    if max(len(r), len(r2)) == 0:
        return 1.0
    emb = as_embedder(store, src)
    pairing = match_sentences(r, r2, emb, by=match_by)
    return sms(r, r2, pairing, scorer) * length_penalty(len(r), len(r2))


def smas(r: Report, r2: Report, store: WordVectorStore | Embedder,
         src: SentenceVectorSource | None = None, match_by: str = "cosine") -> float:
    """Sentence-Matched Adjusted Similarity with WRS on matched sentence pairs."""
    emb = as_embedder(store, src)
    return adjusted_score(r, r2, SentenceScorer("wrs", emb), emb, match_by=match_by)


def wrs_full(r: Report, r2: Report, store: WordVectorStore | Embedder,
             src: SentenceVectorSource | None = None) -> float:
    """WRS with each whole report treated as one sentence."""
    emb = as_embedder(store, src)
    a = _flatten(r)
    b = _flatten(r2)
    if a is None and b is None:
        return 1.0
    if a is None or b is None:
        return 0.0
    return wrs_sentences(a, b, emb)


def _flatten(r: Report) -> Sentence | None:
    if len(r) == 0:
        return None
    return Sentence(r.tokens, r.source)
