"""Word-vector loading, norm-based word mass, and sentence vectors for MATCH."""

from __future__ import annotations

import logging
import os
import threading
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionMismatch, MissingSentenceVector, NoEmbeddableTokens, ParseError
from .text import Sentence

logger = logging.getLogger(__name__)


class WordVectorStore:
    """Immutable token -> vector map.

    The only mutable part is ``oov_count``, which is guarded by a lock so
    one store can be shared by a thread pool.
    """

    def __init__(self, entries: Mapping[str, Iterable[float]], dimension: int | None = None):
        if not entries:
            raise ValueError("a word vector store needs at least one entry")
        vecs = {tok: np.asarray(v, dtype=np.float64) for tok, v in entries.items()}
        if dimension is None:
            dimension = len(next(iter(vecs.values())))
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        for tok, v in vecs.items():
            if v.shape != (dimension,):
                raise DimensionMismatch(f"vector for {tok!r} has shape {v.shape}, expected ({dimension},)")
            v.setflags(write=False)
        self.dimension = dimension
        self._entries = vecs
        self._oov = 0
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, token: str) -> bool:
        return token in self._entries

    def __getitem__(self, token: str) -> np.ndarray:
        return self._entries[token]

    def tokens(self) -> list[str]:
        return list(self._entries)

    @property
    def oov_count(self) -> int:
        return self._oov

    def lookup(self, token: str) -> np.ndarray | None:
        """Vector for ``token`` or None; a miss bumps ``oov_count``."""
        vec = self._entries.get(token)
        if vec is None:
            with self._lock:
                self._oov += 1
        return vec

    def reset_oov(self) -> None:
        with self._lock:
            self._oov = 0

    def scaled(self, factor: float) -> "WordVectorStore":
        return WordVectorStore({t: v * factor for t, v in self._entries.items()}, self.dimension)


def _parse_vector_file(path: str | os.PathLike) -> tuple[int, dict[str, np.ndarray]]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise ParseError("header must be '<count> <dimension>'", line=1)
        try:
            count, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer header {header.strip()!r}", line=1) from None
        if count < 1 or dim < 1:
            raise ParseError("count and dimension must be positive", line=1)

        entries: dict[str, np.ndarray] = {}
        n_lines = 0
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            n_lines += 1
            fields = line.rstrip("\n").split()
            if len(fields) - 1 != dim:
                raise DimensionMismatch(f"expected {dim} components, found {len(fields) - 1}", line=lineno)
            try:
                vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
            except ValueError:
                raise ParseError("non-numeric vector component", line=lineno) from None
            if not np.all(np.isfinite(vec)):
                raise ParseError("non-finite vector component", line=lineno)
            # first occurrence wins
            entries.setdefault(fields[0], vec)
    if n_lines != count:
        raise ParseError(f"header announces {count} vectors, file has {n_lines}")
    return dim, entries


def load_word_vectors(path: str | os.PathLike) -> WordVectorStore:
    """Load a text-format embedding file (``<count> <dim>`` header)."""
    dim, entries = _parse_vector_file(path)
    logger.info("loaded %d word vectors (dim %d) from %s", len(entries), dim, path)
    return WordVectorStore(entries, dim)


def write_word_vectors(path: str | os.PathLike, entries: Mapping[str, Iterable[float]]) -> None:
    """Write vectors in the text format; ``repr`` keeps floats round-trip exact."""
    items = [(tok, [float(x) for x in vec]) for tok, vec in entries.items()]
    if not items:
        raise ValueError("nothing to write")
    dim = len(items[0][1])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(items)} {dim}\n")
        for tok, vec in items:
            if len(vec) != dim:
                raise DimensionMismatch(f"vector for {tok!r} has {len(vec)} components, expected {dim}")
            fh.write(tok + " " + " ".join(repr(x) for x in vec) + "\n")


@dataclass(frozen=True)
class EmbeddedSentence:
    vectors: np.ndarray  # (k, dim); OOV tokens omitted
    norms: np.ndarray
    total_mass: float

    def __len__(self) -> int:
        return len(self.norms)

    @property
    def is_empty(self) -> bool:
        return len(self.norms) == 0

    def mass(self) -> np.ndarray:
        """Normalised word masses; each word weighs in by its vector norm."""
        if self.total_mass <= 0:
            raise ValueError("empty sentence has no mass distribution")
        return self.norms / self.total_mass

    @classmethod
    def from_vectors(cls, vectors) -> "EmbeddedSentence":
        vecs = np.asarray(vectors, dtype=np.float64)
        if vecs.size == 0:
            return cls(np.zeros((0, vecs.shape[-1] if vecs.ndim == 2 else 0)), np.zeros(0), 0.0)
        vecs = np.atleast_2d(vecs)
        norms = np.sqrt(np.einsum("ij,ij->i", vecs, vecs))
        # builtin sum: left-to-right, same order as norms
        return cls(vecs, norms, float(sum(norms.tolist())))


def embed_words(sentence: Sentence, store: WordVectorStore) -> EmbeddedSentence:
    vecs = [v for v in (store.lookup(tok) for tok in sentence.tokens) if v is not None]
    if not vecs:
        return EmbeddedSentence(np.zeros((0, store.dimension)), np.zeros(0), 0.0)
    return EmbeddedSentence.from_vectors(np.vstack(vecs))


def table_key(text: str) -> str:
    """Sentence-vector table key: whitespace runs become underscores."""
    return "_".join(text.split())


@dataclass
class SentenceVectorSource:
    """Where MATCH gets sentence vectors from.

    ``derived-mean`` averages the in-vocabulary word vectors;
    ``external-table`` looks up precomputed vectors keyed by sentence text.
    """

    mode: str = "derived-mean"
    table: dict[str, np.ndarray] | None = None
    dimension: int | None = None

    def __post_init__(self):
        if self.mode not in ("derived-mean", "external-table"):
            raise ValueError(f"unknown sentence vector mode {self.mode!r}")
        if self.mode == "external-table":
            if not self.table:
                raise ValueError("external-table mode needs a non-empty table")
            self.table = {k: np.asarray(v, dtype=np.float64) for k, v in self.table.items()}
            if self.dimension is None:
                self.dimension = len(next(iter(self.table.values())))

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "SentenceVectorSource":
        dim, entries = _parse_vector_file(path)
        return cls("external-table", entries, dim)

    def lookup(self, sentence: Sentence) -> np.ndarray:
        assert self.table is not None
        raw = sentence.raw.strip()
        candidates = [table_key(raw)]
        trimmed = raw.rstrip(".!?。 \t")
        if trimmed != raw:
            candidates.append(table_key(trimmed))
        candidates.append("_".join(sentence.tokens))
        for key in candidates:
            vec = self.table.get(key)
            if vec is not None:
                return vec
        raise MissingSentenceVector(f"no sentence vector for {raw!r}")


DERIVED_MEAN = SentenceVectorSource()


def embed_sentence(sentence: Sentence, store: WordVectorStore,
                   src: SentenceVectorSource = DERIVED_MEAN) -> np.ndarray:
    if src.mode == "external-table":
        return src.lookup(sentence)
    emb = embed_words(sentence, store)
    if emb.is_empty:
        raise NoEmbeddableTokens(f"every token of {sentence.raw!r} is out of vocabulary")
    return emb.vectors.mean(axis=0)


class Embedder:
    """Store + sentence-vector source with per-sentence memoisation.

    Meant to live for one report pair or one MC case; the caches are keyed
    by Sentence so repeated sentences across samples are embedded once.
    """

    def __init__(self, store: WordVectorStore, src: SentenceVectorSource | None = None):
        self.store = store
        self.src = src or DERIVED_MEAN
        self._words: dict[Sentence, EmbeddedSentence] = {}
        self._sent: dict[Sentence, np.ndarray | None] = {}
        self.pair_cache: dict[tuple, float] = {}

    def words(self, sentence: Sentence) -> EmbeddedSentence:
        emb = self._words.get(sentence)
        if emb is None:
            emb = self._words[sentence] = embed_words(sentence, self.store)
        return emb

    def sentence_vector(self, sentence: Sentence) -> np.ndarray | None:
        """Sentence vector, or None when the derived mean has no tokens to average."""
        if sentence in self._sent:
            return self._sent[sentence]
        if self.src.mode == "external-table":
            vec = self.src.lookup(sentence)
        else:
            emb = self.words(sentence)
            vec = None if emb.is_empty else emb.vectors.mean(axis=0)
        self._sent[sentence] = vec
        return vec


def as_embedder(store: "WordVectorStore | Embedder", src: SentenceVectorSource | None = None) -> Embedder:
    if isinstance(store, Embedder):
        return store
    return Embedder(store, src)
