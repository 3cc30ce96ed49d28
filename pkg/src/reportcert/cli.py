"""Command-line interface: batch scoring, matching, uncertainty, weights, correlation."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from . import analysis, similarity, synthetic, uncertainty, weighting
from .embeddings import Embedder, SentenceVectorSource, WordVectorStore, load_word_vectors, write_word_vectors
from .errors import DegenerateSeries, LengthMismatch, ReportCertError
from .text import DEFAULT_DELIMITERS, Report, SegmentationConfig, segment_report

logger = logging.getLogger("reportcert")

ENV_EMBEDDINGS = "REPORTCERT_EMBEDDINGS"
SCORE_METRICS = ("smas", "wrs", "bleu4", "adj-bleu4", "sent-cosine")
NEEDS_VECTORS = {"smas", "wrs", "adj-bleu4", "sent-cosine"}


class UsageError(Exception):
    """Fatal input problem: reported on stderr, exit status 2."""


@dataclass
class CaseRecord:
    case_id: str
    samples: list[str]
    ground_truth: str | None = None
    labels: list[str] | None = None
    recon_path: str | None = None

    @classmethod
    def from_json(cls, obj) -> "CaseRecord":
        if not isinstance(obj, dict):
            raise ValueError("record is not an object")
        case_id = obj.get("case_id")
        if not isinstance(case_id, str) or not case_id:
            raise ValueError("missing or non-string case_id")
        samples = obj.get("samples")
        if not isinstance(samples, list) or not samples or not all(isinstance(s, str) for s in samples):
            raise ValueError("samples must be a non-empty array of strings")
        gt = obj.get("ground_truth")
        if gt is not None and not isinstance(gt, str):
            raise ValueError("ground_truth must be a string")
        labels = obj.get("labels")
        if labels is not None and (not isinstance(labels, list) or not all(isinstance(x, str) for x in labels)):
            raise ValueError("labels must be an array of strings")
        recon = obj.get("recon_path")
        if recon is not None and not isinstance(recon, str):
            raise ValueError("recon_path must be a string")
        return cls(case_id, samples, gt, labels, recon)


# ---------------------------------------------------------------- plumbing


def make_formatter(full_precision: bool) -> Callable[[float], float]:
    if full_precision:
        return float
    return lambda x: float(f"{x:.6g}")


def _round(obj, fmt):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        return fmt(obj) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _round(v, fmt) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, fmt) for v in obj]
    return obj


def dump_record(rec: dict, fmt) -> str:
    return json.dumps(_round(rec, fmt), ensure_ascii=False)


def read_jsonl(path: str) -> Iterator[tuple[int, object]]:
    """(line number, parsed object or the exception) for every non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                yield lineno, exc


def parallel_map(fn, items: list, workers: int) -> list:
    """Order-preserving map over a thread pool."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class Context:
    def __init__(self, args):
        self.args = args
        self.fmt = make_formatter(args.full_precision)
        self.seg = SegmentationConfig.from_string(args.delimiters, lowercase=not args.no_lowercase)
        self._store: WordVectorStore | None = None
        self._src: SentenceVectorSource | None = None

    @property
    def embeddings_path(self) -> str | None:
        return self.args.embeddings or os.environ.get(ENV_EMBEDDINGS)

    def store(self) -> WordVectorStore:
        if self._store is None:
            path = self.embeddings_path
            if not path:
                raise UsageError(f"word vectors required: pass --embeddings or set {ENV_EMBEDDINGS}")
            try:
                self._store = load_word_vectors(path)
            except (OSError, ReportCertError) as exc:
                raise UsageError(f"cannot load embeddings {path}: {exc}") from exc
        return self._store

    def src(self) -> SentenceVectorSource | None:
        if self._src is None and self.args.sent_embeddings:
            try:
                self._src = SentenceVectorSource.from_file(self.args.sent_embeddings)
            except (OSError, ReportCertError) as exc:
                raise UsageError(f"cannot load sentence vectors {self.args.sent_embeddings}: {exc}") from exc
        return self._src

    def embedder(self) -> Embedder:
        return Embedder(self.store(), self.src())

    def segment(self, raw: str) -> Report:
        return segment_report(raw, self.seg)

    def weight_config(self) -> weighting.WeightConfig:
        a = self.args
        try:
            return weighting.WeightConfig(a.alpha, a.beta, a.gamma, a.lambda_auto)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def write(self, lines: Iterable[str]) -> None:
        out = self.args.output
        if out in (None, "-"):
            for line in lines:
                sys.stdout.write(line + "\n")
            sys.stdout.flush()
        else:
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                for line in lines:
                    fh.write(line + "\n")


def _error_text(exc: BaseException) -> str:
    return f"{type(exc).__name__}: {exc}"


# ---------------------------------------------------------------- score


def _parse_metrics(text: str) -> list[str]:
    metrics = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in metrics if m not in SCORE_METRICS]
    if bad or not metrics:
        raise UsageError(f"unknown metric(s) {bad}; choose from {', '.join(SCORE_METRICS)}")
    return metrics


def score_pair(a: Report, b: Report, metrics: list[str], emb: Embedder | None, match_by: str) -> dict[str, float]:
    out = {}
    for m in metrics:
        if m == "smas":
            out[m] = similarity.smas(a, b, emb, match_by=match_by)
        elif m == "wrs":
            out[m] = similarity.wrs_full(a, b, emb)
        elif m == "bleu4":
            out[m] = similarity.report_bleu4(a, b)
        elif m == "adj-bleu4":
            out[m] = similarity.adjusted_score(a, b, similarity.SentenceScorer("bleu4"), emb, match_by=match_by)
        elif m == "sent-cosine":
            scorer = similarity.SentenceScorer("embedding-cosine", emb)
            out[m] = similarity.adjusted_score(a, b, scorer, emb, match_by=match_by)
    return out


def _score_inputs(args) -> list[tuple[str, object]]:
    """(record id, (raw_a, raw_b) or error) in input order."""
    items: list[tuple[str, object]] = []
    if args.pairs:
        for lineno, obj in read_jsonl(args.pairs):
            if isinstance(obj, Exception):
                items.append((str(lineno), ValueError(f"line {lineno}: invalid JSON: {obj.msg}")))
                continue
            rid = obj.get("id", str(lineno)) if isinstance(obj, dict) else str(lineno)
            if not isinstance(obj, dict) or not isinstance(obj.get("a"), str) or not isinstance(obj.get("b"), str):
                items.append((str(rid), ValueError(f"line {lineno}: record needs string fields 'a' and 'b'")))
                continue
            items.append((str(rid), (obj["a"], obj["b"])))
        return items
    if not args.files or len(args.files) != 2:
        raise UsageError("score needs two report files or --pairs FILE")
    lines = []
    for path in args.files:
        try:
            with open(path, encoding="utf-8") as fh:
                lines.append(fh.read().splitlines())
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc
    if len(lines[0]) != len(lines[1]):
        raise UsageError(f"{args.files[0]} has {len(lines[0])} lines but {args.files[1]} has {len(lines[1])}")
    return [(str(k + 1), (a, b)) for k, (a, b) in enumerate(zip(*lines))]


def cmd_score(ctx: Context) -> int:
    args = ctx.args
    metrics = _parse_metrics(args.metric or "smas")
    items = _score_inputs(args)
    store = ctx.store() if NEEDS_VECTORS & set(metrics) else None
    src = ctx.src() if store is not None else None

    def run(item):
        rid, payload = item
        if isinstance(payload, Exception):
            return {"id": rid, "error": str(payload)}
        try:
            emb = Embedder(store, src) if store is not None else None
            a, b = ctx.segment(payload[0]), ctx.segment(payload[1])
            return {"id": rid, **score_pair(a, b, metrics, emb, args.match_by)}
        except ReportCertError as exc:
            return {"id": rid, "error": _error_text(exc)}

    records = parallel_map(run, items, args.workers)
    ctx.write(dump_record(r, ctx.fmt) for r in records)
    return 0


# ---------------------------------------------------------------- match


def cmd_match(ctx: Context) -> int:
    args = ctx.args
    raws = []
    for path in (args.report_a, args.report_b):
        try:
            raws.append(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc
    a, b = ctx.segment(raws[0]), ctx.segment(raws[1])
    emb = ctx.embedder()
    try:
        pairing = similarity.match_sentences(a, b, emb, by=args.match_by)
        records = []
        for (i, j), score in zip(pairing.pairs, pairing.scores):
            records.append({
                "i": i, "j": j, "match_score": score,
                "wrs": similarity.wrs_sentences(a[i], b[j], emb),
                "a": a[i].raw, "b": b[j].raw,
            })
    except ReportCertError as exc:
        raise UsageError(_error_text(exc)) from exc
    used_a = {i for i, _ in pairing.pairs}
    used_b = {j for _, j in pairing.pairs}
    records += [{"unmatched": "a", "i": i, "a": s.raw} for i, s in enumerate(a) if i not in used_a]
    records += [{"unmatched": "b", "j": j, "b": s.raw} for j, s in enumerate(b) if j not in used_b]
    ctx.write(dump_record(r, ctx.fmt) for r in records)
    return 0


# ---------------------------------------------------------------- uncertainty


def load_cases(path: str) -> list[CaseRecord | dict]:
    """Parsed case records; malformed lines and duplicate ids become error dicts."""
    out: list[CaseRecord | dict] = []
    seen = set()
    try:
        rows = list(read_jsonl(path))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    for lineno, obj in rows:
        if isinstance(obj, Exception):
            out.append({"case_id": None, "line": lineno, "error": f"invalid JSON: {obj.msg}"})
            continue
        try:
            rec = CaseRecord.from_json(obj)
        except ValueError as exc:
            cid = obj.get("case_id") if isinstance(obj, dict) else None
            out.append({"case_id": cid if isinstance(cid, str) else None, "line": lineno, "error": str(exc)})
            continue
        if rec.case_id in seen:
            out.append({"case_id": rec.case_id, "line": lineno, "error": "duplicate case_id"})
            continue
        seen.add(rec.case_id)
        out.append(rec)
    return out


def _resolve(path: str, base: str) -> str:
    if os.path.isabs(path) or os.path.exists(path):
        return path
    return os.path.join(os.path.dirname(os.path.abspath(base)), path)


def _case_samples(ctx: Context, rec: CaseRecord) -> list[Report]:
    T = ctx.args.samples
    raws = rec.samples
    if T is not None:
        if len(raws) < T:
            raise uncertainty.DegenerateSamples(f"case has {len(raws)} samples, --samples requires {T}")
        raws = raws[:T]
    if len(raws) < 2:
        raise uncertainty.DegenerateSamples(f"case has {len(raws)} sample(s); uncertainty needs at least 2")
    return [ctx.segment(r) for r in raws]


def estimate_case(ctx: Context, rec: CaseRecord, cases_path: str):
    reports = _case_samples(ctx, rec)
    stack = None
    if rec.recon_path:
        try:
            stack = uncertainty.read_stack(_resolve(rec.recon_path, cases_path))
        except OSError as exc:
            raise uncertainty.StackFormatError(f"cannot read reconstruction stack: {exc}") from exc
    emb = ctx.embedder()
    ms = uncertainty.McSampleSet(rec.case_id, reports,
                                 ctx.segment(rec.ground_truth) if rec.ground_truth is not None else None)
    rep, matrix = uncertainty.estimate(ms, emb, stack=stack, match_by=ctx.args.match_by)
    return rep, ms, emb


def uncertainty_record(ctx: Context, rep, ms, emb) -> dict:
    ref = ms.samples[rep.reference_index]
    rec = {
        "case_id": rep.case_id,
        "T": ms.T,
        "reference_index": rep.reference_index,
        "reference": ref.source.strip(),
        "smasvar": rep.smasvar,
        "sentences": [
            {"index": s.index, "text": s.sentence.raw, "smasvar_l": s.value, "supported": s.supported}
            for s in rep.sentence_vars
        ],
    }
    if rep.visvar is not None:
        rec["visvar"] = rep.visvar
        rec["vis_mu_mean"] = rep.vis_mu_mean
        rec["vis_var_mean"] = rep.vis_var_mean
    if ms.ground_truth is not None:
        rec["smas_vs_ground_truth"] = similarity.smas(ref, ms.ground_truth, emb, match_by=ctx.args.match_by)
    if ctx.args.with_samples:
        rec["samples"] = [r.source for r in ms.samples]
    return rec


def cmd_uncertainty(ctx: Context) -> int:
    args = ctx.args
    cases = load_cases(args.cases)
    ctx.store()
    ctx.src()

    def run(item):
        if isinstance(item, dict):
            return item
        try:
            rep, ms, emb = estimate_case(ctx, item, args.cases)
            return uncertainty_record(ctx, rep, ms, emb)
        except ReportCertError as exc:
            return {"case_id": item.case_id, "error": _error_text(exc)}

    records = parallel_map(run, cases, args.workers)
    ctx.write(dump_record(r, ctx.fmt) for r in records)
    return 0


# ---------------------------------------------------------------- weights


def load_losses(path: str) -> tuple[dict[str, list[float]], float | None, list[str]]:
    losses: dict[str, list[float]] = {}
    autoen = None
    problems = []
    try:
        rows = list(read_jsonl(path))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    for lineno, obj in rows:
        if isinstance(obj, Exception) or not isinstance(obj, dict):
            problems.append(f"line {lineno}: not a JSON object")
            continue
        if "case_id" not in obj:
            if "autoen_loss" in obj:
                autoen = float(obj["autoen_loss"])
            else:
                problems.append(f"line {lineno}: record has neither case_id nor autoen_loss")
            continue
        vals = obj.get("sentence_losses")
        if not isinstance(vals, list) or not all(isinstance(v, (int, float)) for v in vals):
            problems.append(f"line {lineno}: sentence_losses must be an array of numbers")
            continue
        losses[str(obj["case_id"])] = [float(v) for v in vals]
    return losses, autoen, problems


def cmd_weights(ctx: Context) -> int:
    args = ctx.args
    cfg = ctx.weight_config()
    cases = load_cases(args.cases)
    losses, autoen_from_file, problems = load_losses(args.losses)
    if problems:
        raise UsageError("; ".join(problems))
    autoen = args.autoen_loss if args.autoen_loss is not None else (autoen_from_file or 0.0)
    ctx.store()
    ctx.src()

    def run(item):
        if isinstance(item, dict):
            return item
        try:
            if item.case_id not in losses:
                raise LengthMismatch(f"case {item.case_id}: no sentence_losses in {args.losses}")
            rep, ms, _ = estimate_case(ctx, item, args.cases)
            sent = losses[item.case_id]
            if len(sent) != len(rep.sentence_vars):
                raise LengthMismatch(
                    f"case {item.case_id}: {len(sent)} sentence losses for {len(rep.sentence_vars)} "
                    f"reference sentences (sentence index {min(len(sent), len(rep.sentence_vars))} unpaired)"
                )
            return weighting.ReportLossInput(
                sentence_losses=sent,
                smas_var=rep.smasvar_sq,
                sentence_vars=[s.variance for s in rep.sentence_vars],
                vis_mu_mean=rep.vis_mu_mean if rep.vis_mu_mean is not None else 0.0,
                vis_var_mean=rep.vis_var_mean if rep.vis_var_mean is not None else 0.0,
                case_id=item.case_id,
            ), rep
        except ReportCertError as exc:
            return {"case_id": item.case_id, "error": _error_text(exc)}

    results = parallel_map(run, cases, args.workers)
    inputs = [r[0] for r in results if not isinstance(r, dict)]
    try:
        total, breakdown = weighting.weighted_batch_loss(weighting.BatchLossInput(inputs, autoen), cfg)
    except (LengthMismatch, ValueError) as exc:
        raise UsageError(_error_text(exc)) from exc

    records = []
    parts = iter(breakdown.reports)
    for r in results:
        if isinstance(r, dict):
            records.append(r)
            continue
        inp, rep = r
        b = next(parts)
        rec = {
            "case_id": b.case_id,
            "rep_weight": b.rep_weight,
            "sen_weights": b.sen_weights,
            "smasvar": rep.smasvar,
            "smasvar_sq": inp.smas_var,
            "smasvar_l": [s.value for s in rep.sentence_vars],
            "sentence_losses": list(inp.sentence_losses),
            "weighted_loss": b.contribution,
        }
        if rep.visvar is not None:
            rec["visvar"] = rep.visvar
            rec["vis_mu_mean"] = rep.vis_mu_mean
            rec["vis_var_mean"] = rep.vis_var_mean
        records.append(rec)
    records.append({
        "summary": {
            "total": total,
            "rep_loss": breakdown.rep_loss,
            "autoen_loss": autoen,
            "autoen_term": breakdown.autoen_term,
            "reports": len(inputs),
            "skipped": len(results) - len(inputs),
        }
    })
    ctx.write(dump_record(r, ctx.fmt) for r in records)
    return 0


# ---------------------------------------------------------------- correlate


def load_annotated(ctx: Context, path: str) -> list[analysis.AnnotatedReport]:
    corpus = []
    for item in load_cases(path):
        if isinstance(item, dict):
            raise UsageError(f"{path} line {item.get('line')}: {item['error']}")
        raw = item.ground_truth if item.ground_truth is not None else item.samples[0]
        corpus.append(analysis.AnnotatedReport(ctx.segment(raw), frozenset(item.labels or ())))
    return corpus


def cmd_correlate(ctx: Context) -> int:
    args = ctx.args
    corpus = load_annotated(ctx, args.corpus)
    if not corpus:
        raise UsageError(f"{args.corpus}: empty corpus")
    pairs = analysis.sample_pairs(len(corpus), args.pairs, args.seed)
    table = analysis.build_metric_table(corpus, pairs, ctx.embedder(), workers=args.workers,
                                        match_by=args.match_by)
    csv_fmt = lambda x: repr(ctx.fmt(x))
    if args.table:
        Path(args.table).write_text(table.to_csv(csv_fmt), encoding="utf-8")
    try:
        cm = analysis.correlation_matrix(table)
    except DegenerateSeries as exc:
        raise UsageError(f"degenerate metric column {exc.column!r}: {exc}") from exc
    text = cm.to_csv(csv_fmt)
    if args.matrix:
        Path(args.matrix).write_text(text, encoding="utf-8")
    else:
        ctx.write(text.rstrip("\n").split("\n"))
    return 0


# ---------------------------------------------------------------- synth


def cmd_synth(ctx: Context) -> int:
    args = ctx.args
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = synthetic.synthetic_corpus(args.reports, seed=args.seed)
    write_word_vectors(out / "vectors.txt", corpus.vectors)
    with open(out / "corpus.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for k, (raw, rep) in enumerate(zip(corpus.raw, corpus.reports)):
            fh.write(json.dumps({"case_id": f"report-{k:04d}", "samples": [raw], "ground_truth": raw,
                                 "labels": sorted(rep.labels)}) + "\n")
    cases = synthetic.synthetic_mc_cases(args.cases, T=args.samples or 10, seed=args.seed)
    store = corpus.store()
    rng = np.random.default_rng(args.seed)
    with open(out / "cases.jsonl", "w", encoding="utf-8", newline="\n") as fh, \
            open(out / "losses.jsonl", "w", encoding="utf-8", newline="\n") as lfh:
        for case in cases:
            if args.with_stacks:
                sigma = float(rng.uniform(0.01, 0.3))
                base = rng.random((1, 8, 8))
                stack = base[None] + sigma * rng.standard_normal((len(case["samples"]), 1, 8, 8))
                name = f"{case['case_id']}.vstk"
                uncertainty.write_stack(out / name, stack)
                case["recon_path"] = name
            fh.write(json.dumps(case) + "\n")
            # stand-in per-sentence losses, one per sentence of the reference sample
            reports = [segment_report(r) for r in case["samples"]]
            m = uncertainty.pairwise_smas(reports, Embedder(store))
            n_sent = len(reports[uncertainty.reference_report(m)])
            sent_losses = [round(float(x), 4) for x in rng.uniform(0.5, 3.0, n_sent)]
            lfh.write(json.dumps({"case_id": case["case_id"], "sentence_losses": sent_losses}) + "\n")
        lfh.write(json.dumps({"autoen_loss": 0.5}) + "\n")
    print(f"wrote synthetic data to {out}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--embeddings", metavar="PATH", help=f"word vector file (fallback: ${ENV_EMBEDDINGS})")
    common.add_argument("--sent-embeddings", metavar="PATH", help="precomputed sentence vectors for MATCH")
    common.add_argument("--delimiters", default="".join(sorted(DEFAULT_DELIMITERS)), metavar="STR",
                        help="sentence delimiter characters (default: %(default)s)")
    common.add_argument("--no-lowercase", action="store_true", help="keep token case")
    common.add_argument("--match-by", choices=similarity.MATCH_MODES, default="cosine",
                        help="sentence similarity used by MATCH (default: cosine of sentence vectors)")
    common.add_argument("--workers", type=int, default=1, metavar="N")
    common.add_argument("--output", "-o", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--full-precision", action="store_true",
                        help="print shortest round-trip floats instead of 6 significant digits")
    common.add_argument("-v", "--verbose", action="store_true")

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--samples", "-T", type=int, metavar="T",
                    help="use the first T samples of each case (default: all; recommended 10 for "
                         "evaluation, 4 for training weights)")

    weights = argparse.ArgumentParser(add_help=False)
    weights.add_argument("--alpha", type=float, default=1.0)
    weights.add_argument("--beta", type=float, default=1.0)
    weights.add_argument("--gamma", type=float, default=1.0)
    weights.add_argument("--lambda-auto", type=float, default=1.0, dest="lambda_auto")

    p = argparse.ArgumentParser(prog="reportcert", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("score", parents=[common], help="score report pairs")
    s.add_argument("files", nargs="*", help="two text files, one report per line, paired by line")
    s.add_argument("--pairs", metavar="FILE", help="JSON-lines file of {'id', 'a', 'b'} records")
    s.add_argument("--metric", default="smas", help=f"comma-separated subset of {', '.join(SCORE_METRICS)}")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("match", parents=[common], help="show the sentence alignment of two reports")
    s.add_argument("report_a")
    s.add_argument("report_b")
    s.set_defaults(func=cmd_match)

    s = sub.add_parser("uncertainty", parents=[common, mc], help="SMASVar, SMASVar-l and VISVar per case")
    s.add_argument("cases")
    s.add_argument("--with-samples", action="store_true", help="echo the MC samples in each record")
    s.set_defaults(func=cmd_uncertainty)

    s = sub.add_parser("weights", parents=[common, mc, weights], help="uncertainty loss weights")
    s.add_argument("cases")
    s.add_argument("losses", help="JSON-lines {'case_id', 'sentence_losses'}; optional {'autoen_loss'} record")
    s.add_argument("--autoen-loss", type=float, help="batch AutoEncoder loss (overrides the losses file)")
    s.set_defaults(func=cmd_weights)

    s = sub.add_parser("correlate", parents=[common], help="metric table and correlation matrix")
    s.add_argument("corpus", help="cases file whose records carry labels")
    s.add_argument("--pairs", type=int, default=analysis.DEFAULT_PAIR_COUNT, metavar="N")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--table", metavar="PATH", help="write the per-pair metric table here")
    s.add_argument("--matrix", metavar="PATH", help="write the correlation matrix here (default: output)")
    s.set_defaults(func=cmd_correlate)

    s = sub.add_parser("synth", parents=[common, mc], help="write a seeded synthetic dataset")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--reports", type=int, default=240)
    s.add_argument("--cases", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--with-stacks", action="store_true", help="also write reconstruction stacks")
    s.set_defaults(func=cmd_synth)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.workers < 1:
        print("reportcert: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        ctx = Context(args)
        status = args.func(ctx)
    except UsageError as exc:
        print(f"reportcert {args.command}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"reportcert {args.command}: {exc}", file=sys.stderr)
        return 2
    if ctx._store is not None and ctx._store.oov_count:
        logger.info("%d out-of-vocabulary token lookups", ctx._store.oov_count)
    return status


if __name__ == "__main__":
    sys.exit(main())
