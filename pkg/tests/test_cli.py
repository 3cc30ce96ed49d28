import json
import math

import numpy as np
import pytest

from reportcert.cli import main
from reportcert.embeddings import write_word_vectors
from reportcert.uncertainty import write_stack


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--out-dir", str(out), "--reports", "60", "--cases", "6", "--with-stacks"]) == 0
    return out


@pytest.fixture
def vec_file(tmp_path):
    path = tmp_path / "vec.txt"
    write_word_vectors(path, {"a": [1.0, 0.0], "b": [0.0, 1.0], "c": [1.0, 1.0]})
    return path


def run_json(capsys, argv):
    capsys.readouterr()
    status = main(argv)
    out = capsys.readouterr().out
    return status, [json.loads(line) for line in out.splitlines() if line.strip()]


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_score_paired_files(tmp_path, vec_file, capsys):
    fa = write_lines(tmp_path / "a.txt", ["a. b.", "a b c.", "zzz."])
    fb = write_lines(tmp_path / "b.txt", ["b. a.", "a.", "a."])
    status, recs = run_json(capsys, ["score", str(fa), str(fb), "--embeddings", str(vec_file),
                                     "--metric", "smas,bleu4,wrs"])
    assert status == 0
    assert [r["id"] for r in recs] == ["1", "2", "3"]
    assert recs[0]["smas"] == 1.0
    assert recs[0]["bleu4"] < 1.0
    # all-OOV generated report: its single sentence has no mass
    assert recs[2]["smas"] == 0.0


def test_score_pairs_file_with_bad_records(tmp_path, vec_file, capsys):
    pairs = write_lines(tmp_path / "p.jsonl", [
        json.dumps({"id": "ok", "a": "a.", "b": "a."}),
        "{not json",
        json.dumps({"id": "missing"}),
    ])
    status, recs = run_json(capsys, ["score", "--pairs", str(pairs), "--embeddings", str(vec_file)])
    assert status == 0
    assert recs[0] == {"id": "ok", "smas": 1.0}
    assert "error" in recs[1] and "line 2" in recs[1]["error"]
    assert recs[2]["id"] == "missing" and "error" in recs[2]


def test_score_bleu_needs_no_vectors(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("REPORTCERT_EMBEDDINGS", raising=False)
    fa = write_lines(tmp_path / "a.txt", ["the heart is normal."])
    status, recs = run_json(capsys, ["score", str(fa), str(fa), "--metric", "bleu4"])
    assert status == 0 and recs[0]["bleu4"] == 1.0


def test_missing_embeddings_is_usage_error(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("REPORTCERT_EMBEDDINGS", raising=False)
    fa = write_lines(tmp_path / "a.txt", ["a."])
    assert main(["score", str(fa), str(fa)]) == 2
    assert "--embeddings" in capsys.readouterr().err


def test_embeddings_from_environment(tmp_path, vec_file, capsys, monkeypatch):
    monkeypatch.setenv("REPORTCERT_EMBEDDINGS", str(vec_file))
    fa = write_lines(tmp_path / "a.txt", ["a b."])
    status, recs = run_json(capsys, ["score", str(fa), str(fa), "--metric", "wrs"])
    assert status == 0 and recs[0]["wrs"] == 1.0


def test_score_rejects_unknown_metric_and_unequal_files(tmp_path, vec_file, capsys):
    fa = write_lines(tmp_path / "a.txt", ["a.", "b."])
    fb = write_lines(tmp_path / "b.txt", ["a."])
    assert main(["score", str(fa), str(fa), "--metric", "meteor", "--embeddings", str(vec_file)]) == 2
    assert main(["score", str(fa), str(fb), "--embeddings", str(vec_file)]) == 2


def test_match_lists_pairs_then_unmatched(tmp_path, vec_file, capsys):
    ra = tmp_path / "ra.txt"
    ra.write_text("a. b. c.")
    rb = tmp_path / "rb.txt"
    rb.write_text("b.")
    status, recs = run_json(capsys, ["match", str(ra), str(rb), "--embeddings", str(vec_file)])
    assert status == 0
    assert recs[0]["i"] == 1 and recs[0]["j"] == 0 and recs[0]["wrs"] == 1.0
    assert [r.get("unmatched") for r in recs[1:]] == ["a", "a"]


def test_uncertainty_records(synth_dir, capsys):
    status, recs = run_json(capsys, ["uncertainty", str(synth_dir / "cases.jsonl"),
                                     "--embeddings", str(synth_dir / "vectors.txt")])
    assert status == 0
    assert len(recs) == 6
    for r in recs:
        assert r["T"] == 10
        assert r["smasvar"] >= 0
        assert "visvar" in r
        assert 0 <= r["reference_index"] < r["T"]
        assert len(r["sentences"]) >= 1


def test_uncertainty_sample_limit_and_errors(tmp_path, vec_file, capsys):
    cases = write_lines(tmp_path / "c.jsonl", [
        json.dumps({"case_id": "x", "samples": ["a.", "a.", "b.", "a."]}),
        json.dumps({"case_id": "short", "samples": ["a."]}),
        json.dumps({"case_id": "x", "samples": ["a.", "a."]}),
        json.dumps({"samples": "nope"}),
    ])
    status, recs = run_json(capsys, ["uncertainty", str(cases), "--embeddings", str(vec_file), "-T", "3",
                                     "--with-samples"])
    assert status == 0
    assert recs[0]["T"] == 3 and recs[0]["samples"] == ["a.", "a.", "b."]
    assert recs[0]["sentences"][0]["smasvar_l"] == 0.5
    assert "error" in recs[1]
    assert recs[2]["error"] == "duplicate case_id"
    assert "error" in recs[3]


def test_uncertainty_reads_stacks_relative_to_cases(tmp_path, vec_file, capsys):
    write_stack(tmp_path / "v.vstk", np.array([[[[0.0, 0.0]]], [[[2.0, 2.0]]]], dtype=np.float32))
    (tmp_path / "bad.vstk").write_bytes(b"NOPE" + bytes(30))
    cases = write_lines(tmp_path / "c.jsonl", [
        json.dumps({"case_id": "v", "samples": ["a.", "a."], "recon_path": "v.vstk"}),
        json.dumps({"case_id": "bad", "samples": ["a.", "a."], "recon_path": "bad.vstk"}),
    ])
    status, recs = run_json(capsys, ["uncertainty", str(cases), "--embeddings", str(vec_file)])
    assert status == 0
    assert recs[0]["visvar"] == 1.0 and recs[0]["vis_mu_mean"] == 1.0
    assert recs[1]["error"].startswith("BadMagic")


def test_weights_end_to_end(synth_dir, capsys):
    base = ["weights", str(synth_dir / "cases.jsonl"), str(synth_dir / "losses.jsonl"),
            "--embeddings", str(synth_dir / "vectors.txt"), "--full-precision"]
    status, recs = run_json(capsys, base + ["--beta", "0"])
    assert status == 0
    summary = recs[-1]["summary"]
    assert summary["reports"] == 6 and summary["skipped"] == 0
    assert summary["autoen_loss"] == 0.5
    assert summary["total"] == pytest.approx(summary["rep_loss"] + 0.5, abs=1e-12)
    for r in recs[:-1]:
        assert r["rep_weight"] == pytest.approx(math.exp(-r["smasvar_sq"]), abs=1e-12)
        assert all(0 < w <= 1 for w in r["sen_weights"])

    _, neutral = run_json(capsys, base + ["--alpha", "0", "--beta", "0", "--gamma", "0", "--lambda-auto", "0"])
    plain = sum(sum(r["sentence_losses"]) for r in neutral[:-1])
    assert neutral[-1]["summary"]["total"] == pytest.approx(plain, abs=1e-12)


def test_weights_length_mismatch_is_reported(tmp_path, vec_file, capsys):
    cases = write_lines(tmp_path / "c.jsonl", [
        json.dumps({"case_id": "one", "samples": ["a. b.", "a. b.", "a. b."]}),
        json.dumps({"case_id": "two", "samples": ["a.", "a."]}),
        json.dumps({"case_id": "three", "samples": ["a.", "a."]}),
    ])
    losses = write_lines(tmp_path / "l.jsonl", [
        json.dumps({"case_id": "one", "sentence_losses": [1.0]}),
        json.dumps({"case_id": "two", "sentence_losses": [2.0]}),
    ])
    status, recs = run_json(capsys, ["weights", str(cases), str(losses), "--embeddings", str(vec_file),
                                     "--beta", "0", "--autoen-loss", "0.5"])
    assert status == 0
    assert recs[0]["error"].startswith("LengthMismatch") and "index 1" in recs[0]["error"]
    assert recs[1]["weighted_loss"] == 2.0
    assert recs[2]["error"].startswith("LengthMismatch")
    assert recs[-1]["summary"]["total"] == 2.5


def test_correlate_writes_matrix_and_table(synth_dir, tmp_path, capsys):
    table = tmp_path / "t.csv"
    capsys.readouterr()
    status = main(["correlate", str(synth_dir / "corpus.jsonl"), "--embeddings", str(synth_dir / "vectors.txt"),
                   "--pairs", "200", "--table", str(table)])
    out = capsys.readouterr().out.splitlines()
    assert status == 0
    assert out[0] == ",info_diff,len_diff,wrs_full,bleu4,adj_bleu4,smas"
    assert len(out) == 7
    assert len(table.read_text().splitlines()) == 201


def test_correlate_degenerate_column(tmp_path, vec_file, capsys):
    corpus = write_lines(tmp_path / "c.jsonl", [
        json.dumps({"case_id": f"r{k}", "samples": ["a."], "labels": ["x"]}) for k in range(5)
    ])
    assert main(["correlate", str(corpus), "--embeddings", str(vec_file), "--pairs", "20"]) == 2
    assert "degenerate metric column" in capsys.readouterr().err


def test_precision_flag(tmp_path, capsys):
    vec = tmp_path / "v.txt"
    write_word_vectors(vec, {"a": [1.0, 0.0], "b": [1.0, 3.0]})
    fa = write_lines(tmp_path / "a.txt", ["a."])
    fb = write_lines(tmp_path / "b.txt", ["b."])
    _, short = run_json(capsys, ["score", str(fa), str(fb), "--embeddings", str(vec), "--metric", "wrs"])
    _, full = run_json(capsys, ["score", str(fa), str(fb), "--embeddings", str(vec), "--metric", "wrs",
                                "--full-precision"])
    assert full[0]["wrs"] == pytest.approx(1 / math.sqrt(10), abs=1e-15)
    assert short[0]["wrs"] == float(f"{full[0]['wrs']:.6g}")


def test_bad_workers(capsys, tmp_path):
    assert main(["score", "--pairs", str(tmp_path / "x"), "--workers", "0"]) == 2
