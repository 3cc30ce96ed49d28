"""Semantic similarity and Monte-Carlo uncertainty for diagnostic reports."""

from .embeddings import (
    EmbeddedSentence,
    Embedder,
    SentenceVectorSource,
    WordVectorStore,
    embed_sentence,
    embed_words,
    load_word_vectors,
)
from .errors import ReportCertError
from .similarity import (
    SentencePairing,
    SentenceScorer,
    adjusted_score,
    greedy_match,
    match_sentences,
    report_bleu4,
    sentence_bleu4,
    smas,
    sms,
)
from .text import Report, SegmentationConfig, Sentence, segment_report, tokenize_sentence
from .transport import TransportInstance, TransportPlan, cosine_distance, solve_transport, wrd, wrs
from .uncertainty import (
    McSampleSet,
    ReconstructionStack,
    UncertaintyReport,
    pairwise_smas,
    read_stack,
    reference_report,
    smasvar,
    smasvar_l,
    vis_stats,
    visvar,
    write_stack,
)
from .weighting import WeightConfig, rep_weight, sen_weight, weighted_batch_loss

__version__ = "0.1.0"

__all__ = [
    "adjusted_score",
    "cosine_distance",
    "embed_sentence",
    "embed_words",
    "EmbeddedSentence",
    "Embedder",
    "greedy_match",
    "load_word_vectors",
    "match_sentences",
    "McSampleSet",
    "pairwise_smas",
    "read_stack",
    "ReconstructionStack",
    "reference_report",
    "rep_weight",
    "Report",
    "report_bleu4",
    "ReportCertError",
    "segment_report",
    "SegmentationConfig",
    "sen_weight",
    "Sentence",
    "sentence_bleu4",
    "SentencePairing",
    "SentenceScorer",
    "SentenceVectorSource",
    "smas",
    "smasvar",
    "smasvar_l",
    "sms",
    "solve_transport",
    "tokenize_sentence",
    "TransportInstance",
    "TransportPlan",
    "UncertaintyReport",
    "vis_stats",
    "visvar",
    "WeightConfig",
    "weighted_batch_loss",
    "WordVectorStore",
    "wrd",
    "write_stack",
    "wrs",
]
