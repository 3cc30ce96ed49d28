"""Sentence segmentation and tokenization of raw report strings."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EmptySentence

DEFAULT_DELIMITERS = frozenset(".!?。")

# alphanumeric runs; underscore and every other non-word character separate tokens
_TOKEN_RE = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class SegmentationConfig:
    sentence_delimiters: frozenset[str] = DEFAULT_DELIMITERS
    lowercase: bool = True

    def __post_init__(self):
        delims = frozenset(self.sentence_delimiters)
        if not delims:
            raise ValueError("sentence_delimiters must be non-empty")
        if any(len(d) != 1 for d in delims):
            raise ValueError("each sentence delimiter must be a single character")
        object.__setattr__(self, "sentence_delimiters", delims)

    @classmethod
    def from_string(cls, delimiters: str, lowercase: bool = True) -> "SegmentationConfig":
        return cls(frozenset(delimiters), lowercase)


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[str, ...]
    raw: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise EmptySentence("sentence has no tokens")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class Report:
    sentences: tuple[Sentence, ...] = ()
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i: int) -> Sentence:
        return self.sentences[i]

    @property
    def tokens(self) -> tuple[str, ...]:
        """All tokens of the report in reading order."""
        return tuple(tok for s in self.sentences for tok in s.tokens)


DEFAULT_CONFIG = SegmentationConfig()


def tokenize_sentence(raw: str, cfg: SegmentationConfig = DEFAULT_CONFIG) -> Sentence:
    """Split one sentence into lowercase alphanumeric tokens.

    Anonymisation placeholders such as ``XXXX`` are kept as ordinary tokens.
    Raises EmptySentence when nothing survives.
    """
    text = raw.lower() if cfg.lowercase else raw
    tokens = _TOKEN_RE.findall(text)
    if not tokens:
        raise EmptySentence(f"no tokens in {raw!r}")
    return Sentence(tuple(tokens), raw.strip())


def _split_segments(raw: str, delimiters: frozenset[str]) -> list[str]:
    segments = []
    start = 0
    for pos, ch in enumerate(raw):
        if ch in delimiters:
            segments.append(raw[start:pos + 1])
            start = pos + 1
    if start < len(raw):
        segments.append(raw[start:])
    return segments


def segment_report(raw: str, cfg: SegmentationConfig = DEFAULT_CONFIG) -> Report:
    """Split raw report text into sentences; empty segments are dropped.

    Each sentence keeps its terminating delimiter in ``raw`` so that
    concatenating the raw sentences re-segments to the same tokens.
    """
    sentences = []
    for seg in _split_segments(raw, cfg.sentence_delimiters):
        try:
            sentences.append(tokenize_sentence(seg, cfg))
        except EmptySentence:
            continue
    return Report(tuple(sentences), raw)


def report_from_tokens(sentences: list[list[str]]) -> Report:
    """Build a Report directly from token lists (no segmentation)."""
    sents = tuple(Sentence(tuple(toks), " ".join(toks) + ".") for toks in sentences)
    return Report(sents, " ".join(s.raw for s in sents))
