"""Uncertainty-based loss weights and the weighted batch loss.

Weights are plain floats: the training loop multiplies its own per-sentence
losses by them and does not backpropagate through the weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import LengthMismatch


@dataclass(frozen=True)
class WeightConfig:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    lambda_autoen: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "lambda_autoen"):
            val = getattr(self, name)
            if not math.isfinite(val) or val < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {val!r}")


@dataclass
class ReportLossInput:
    sentence_losses: Sequence[float]
    smas_var: float  # squared SMASVar
    sentence_vars: Sequence[float]  # squared SMASVar-l, one per sentence
    vis_mu_mean: float = 0.0
    vis_var_mean: float = 0.0
    case_id: str = ""


@dataclass
class BatchLossInput:
    reports: list[ReportLossInput]
    autoen_loss: float = 0.0

    def validate(self) -> None:
        for r, rep in enumerate(self.reports):
            label = rep.case_id or f"report {r}"
            n_loss, n_var = len(rep.sentence_losses), len(rep.sentence_vars)
            if n_loss != n_var:
                raise LengthMismatch(
                    f"{label}: {n_loss} sentence losses but {n_var} sentence variances "
                    f"(first unpaired sentence index {min(n_loss, n_var)})"
                )
            if rep.smas_var < 0 or rep.vis_var_mean < 0 or any(v < 0 for v in rep.sentence_vars):
                raise ValueError(f"{label}: variances must be non-negative")
            for l, loss in enumerate(rep.sentence_losses):
                if loss < 0:
                    raise ValueError(f"{label}: sentence {l} has negative loss {loss!r}")


def rep_weight(smas_var: float, vis_mu_mean: float, vis_var_mean: float, cfg: WeightConfig) -> float:
    """exp(-(alpha * smas_var + beta * (exp(vis_mu_mean) + vis_var_mean)))."""
    visual = cfg.beta * (math.exp(vis_mu_mean) + vis_var_mean) if cfg.beta else 0.0
    return math.exp(-(cfg.alpha * smas_var + visual))


def sen_weight(sentence_var: float, cfg: WeightConfig) -> float:
    return math.exp(-cfg.gamma * sentence_var)


@dataclass
class ReportBreakdown:
    case_id: str
    rep_weight: float
    sen_weights: list[float]
    sentence_terms: list[float]  # sen_weight * loss
    sentence_sum: float
    contribution: float  # rep_weight * sentence_sum


@dataclass
class LossBreakdown:
    reports: list[ReportBreakdown] = field(default_factory=list)
    rep_loss: float = 0.0
    autoen_term: float = 0.0
    total: float = 0.0


def weighted_batch_loss(batch: BatchLossInput, cfg: WeightConfig) -> tuple[float, LossBreakdown]:
    batch.validate()
    out = LossBreakdown()
    for r, rep in enumerate(batch.reports):
        wr = rep_weight(rep.smas_var, rep.vis_mu_mean, rep.vis_var_mean, cfg)
        ws = [sen_weight(v, cfg) for v in rep.sentence_vars]
        terms = [w * loss for w, loss in zip(ws, rep.sentence_losses)]
        s = sum(terms)
        out.reports.append(ReportBreakdown(rep.case_id or str(r), wr, ws, terms, s, wr * s))
    out.rep_loss = sum(b.contribution for b in out.reports)
    out.autoen_term = cfg.lambda_autoen * batch.autoen_loss
    out.total = out.autoen_term + out.rep_loss
    return out.total, out
