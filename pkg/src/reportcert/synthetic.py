"""Seeded synthetic radiology-style corpora with matching word vectors.

Each generated report sentence describes one organ with one finding and
carries exactly one ``organ:finding`` label, so key-information content is
proportional to sentence count.  Paraphrase noise comes from synonym
choice, sentence templates and sentence order.  Synonyms sit close to a
shared concept direction in the vector space; function words get small
norms so they carry little transport mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import AnnotatedReport
from .embeddings import WordVectorStore
from .text import segment_report

ORGANS = {
    "heart": ("heart", "cardiac", "cardiomediastinal"),
    "lungs": ("lungs", "pulmonary", "lung"),
    "pleura": ("pleura", "pleural"),
    "spine": ("spine", "vertebral", "thoracic"),
    "mediastinum": ("mediastinum", "mediastinal"),
    "aorta": ("aorta", "aortic"),
    "diaphragm": ("diaphragm", "hemidiaphragm"),
    "bones": ("bones", "osseous", "skeletal"),
    "trachea": ("trachea", "airway"),
    "hilum": ("hilum", "hilar"),
}

FINDINGS = {
    "normal": ("normal", "unremarkable", "stable"),
    "large": ("enlarged", "large", "cardiomegaly"),
    "opacity": ("opacity", "consolidation", "airspace"),
    "effusion": ("effusion", "fluid"),
    "degenerative": ("degenerative", "arthritic", "spondylosis"),
    "calcified": ("calcified", "calcification"),
    "tortuous": ("tortuous", "ectatic"),
    "nodule": ("nodule", "mass", "lesion"),
}

FUNCTION_WORDS = ("the", "is", "are", "there", "of", "noted", "seen", "within", "limits", "in", "a", "with")

TEMPLATES = (
    "the {o} is {f}",
    "{o} {f}",
    "there is {f} of the {o}",
    "{f} {o} noted",
    "the {o} are {f} in appearance",
    "{o} within limits {f}",
)

DIM = 32


@dataclass
class SyntheticCorpus:
    reports: list[AnnotatedReport]
    raw: list[str]
    vectors: dict[str, np.ndarray]

    def store(self) -> WordVectorStore:
        return WordVectorStore(self.vectors, DIM)


def synthetic_vectors(seed: int = 0, dim: int = DIM) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    vectors: dict[str, np.ndarray] = {}

    def concept(words, norm_lo, norm_hi, spread):
        center = rng.standard_normal(dim)
        center /= np.linalg.norm(center)
        for w in words:
            v = center + spread * rng.standard_normal(dim) / np.sqrt(dim)
            v *= rng.uniform(norm_lo, norm_hi) / np.linalg.norm(v)
            vectors.setdefault(w, v)

    for words in ORGANS.values():
        concept(words, 3.0, 5.0, 0.35)
    for words in FINDINGS.values():
        concept(words, 3.0, 5.0, 0.35)
    for w in FUNCTION_WORDS:
        concept((w,), 0.5, 1.0, 0.0)
    return vectors


def _sentence(rng: np.random.Generator, organ: str, finding: str) -> str:
    template = TEMPLATES[rng.integers(len(TEMPLATES))]
    o = ORGANS[organ][rng.integers(len(ORGANS[organ]))]
    f = FINDINGS[finding][rng.integers(len(FINDINGS[finding]))]
    text = template.format(o=o, f=f)
    return text[0].upper() + text[1:] + "."


def _labels(rng: np.random.Generator, k: int) -> list[tuple[str, str]]:
    organs = list(ORGANS)
    chosen = rng.choice(len(organs), size=k, replace=False)
    findings = list(FINDINGS)
    return [(organs[i], findings[rng.integers(len(findings))]) for i in chosen]


def synthetic_corpus(n_reports: int = 240, seed: int = 0, max_sentences: int = 6) -> SyntheticCorpus:
    rng = np.random.default_rng(seed)
    vectors = synthetic_vectors(seed)
    reports, raws = [], []
    for _ in range(n_reports):
        k = int(rng.integers(1, max_sentences + 1))
        labels = _labels(rng, k)
        raw = " ".join(_sentence(rng, o, f) for o, f in labels)
        raws.append(raw)
        reports.append(AnnotatedReport(segment_report(raw), frozenset(f"{o}:{f}" for o, f in labels)))
    return SyntheticCorpus(reports, raws, vectors)


def synthetic_mc_cases(n_cases: int = 20, T: int = 10, seed: int = 0, max_sentences: int = 5) -> list[dict]:
    """Case records whose T samples are noisy copies of one base report.

    Each case draws its own noise level, so SMASVar varies across cases.
    """
    rng = np.random.default_rng(seed)
    cases = []
    for c in range(n_cases):
        k = int(rng.integers(1, max_sentences + 1))
        base = _labels(rng, k)
        noise = float(rng.uniform(0.0, 0.5))
        samples = []
        for _ in range(T):
            labels = []
            for organ, finding in base:
                u = rng.random()
                if u < noise / 3:
                    continue  # dropped sentence
                if u < 2 * noise / 3:
                    finding = list(FINDINGS)[rng.integers(len(FINDINGS))]
                labels.append((organ, finding))
            if rng.random() < noise / 2:
                labels.extend(_labels(rng, 1))
            if not labels:
                labels = base[:1]
            samples.append(" ".join(_sentence(rng, o, f) for o, f in labels))
        truth = " ".join(_sentence(rng, o, f) for o, f in base)
        cases.append({
            "case_id": f"case-{c:04d}",
            "samples": samples,
            "ground_truth": truth,
            "labels": sorted(f"{o}:{f}" for o, f in base),
        })
    return cases
