import threading

import numpy as np
import pytest

from reportcert.embeddings import (
    Embedder,
    EmbeddedSentence,
    SentenceVectorSource,
    WordVectorStore,
    embed_sentence,
    embed_words,
    load_word_vectors,
    write_word_vectors,
)
from reportcert.errors import DimensionMismatch, MissingSentenceVector, NoEmbeddableTokens, ParseError
from reportcert.text import tokenize_sentence


def write(tmp_path, text, name="vec.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_basic_file(tmp_path):
    store = load_word_vectors(write(tmp_path, "2 3\nheart 1 0 0\nlung 0 0.5 -2e-1\n"))
    assert store.dimension == 3
    assert len(store) == 2
    np.testing.assert_array_equal(store["lung"], [0.0, 0.5, -0.2])


def test_duplicate_tokens_keep_first(tmp_path):
    store = load_word_vectors(write(tmp_path, "2 2\na 1 2\na 3 4\n"))
    np.testing.assert_array_equal(store["a"], [1.0, 2.0])


def test_blank_lines_ignored(tmp_path):
    store = load_word_vectors(write(tmp_path, "1 2\n\na 1 2\n\n"))
    assert "a" in store


@pytest.mark.parametrize("text,line,exc", [
    ("2\n", 1, ParseError),
    ("x 2\n", 1, ParseError),
    ("0 2\n", 1, ParseError),
    ("2 3\na 1 2 3\nb 1 2\n", 3, DimensionMismatch),
    ("1 2\na 1 zz\n", 2, ParseError),
    ("1 2\na 1 nan\n", 2, ParseError),
])
def test_parse_errors_carry_line_numbers(tmp_path, text, line, exc):
    with pytest.raises(exc) as info:
        load_word_vectors(write(tmp_path, text))
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_count_mismatch(tmp_path):
    with pytest.raises(ParseError):
        load_word_vectors(write(tmp_path, "3 2\na 1 2\nb 1 2\n"))


def test_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(1)
    entries = {f"t{i}": rng.standard_normal(5) for i in range(20)}
    path = tmp_path / "out.txt"
    write_word_vectors(path, entries)
    store = load_word_vectors(path)
    for tok, vec in entries.items():
        np.testing.assert_array_equal(store[tok], vec)


def test_store_is_read_only():
    store = WordVectorStore({"a": [1.0, 2.0]})
    with pytest.raises(ValueError):
        store["a"][0] = 5.0


def test_store_shape_check():
    with pytest.raises(DimensionMismatch):
        WordVectorStore({"a": [1.0, 2.0], "b": [1.0]})


def test_oov_counting_is_thread_safe():
    store = WordVectorStore({"a": [1.0]})

    def miss():
        for _ in range(1000):
            store.lookup("zzz")

    threads = [threading.Thread(target=miss) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert store.oov_count == 8000
    store.reset_oov()
    assert store.oov_count == 0


def test_embed_words_drops_oov(axis_store):
    emb = embed_words(tokenize_sentence("a unknown c"), axis_store)
    assert len(emb) == 2
    np.testing.assert_allclose(emb.norms, [1.0, np.sqrt(2)])
    assert emb.mass().sum() == pytest.approx(1.0)
    assert axis_store.oov_count == 1


def test_all_oov_sentence(axis_store):
    s = tokenize_sentence("nothing known")
    assert embed_words(s, axis_store).is_empty
    with pytest.raises(NoEmbeddableTokens):
        embed_sentence(s, axis_store)
    assert Embedder(axis_store).sentence_vector(s) is None


def test_derived_mean(axis_store):
    np.testing.assert_allclose(embed_sentence(tokenize_sentence("a b"), axis_store), [0.5, 0.5])


def test_external_table_key_fallbacks(axis_store):
    src = SentenceVectorSource("external-table", {"heart_normal": [1.0, 0.0], "lungs_are_clear": [0.0, 1.0]})
    np.testing.assert_array_equal(src.lookup(tokenize_sentence("heart normal")), [1.0, 0.0])
    # trailing delimiter trimmed before lookup
    np.testing.assert_array_equal(src.lookup(tokenize_sentence("lungs are clear.")), [0.0, 1.0])
    # lowercased token key as last resort
    np.testing.assert_array_equal(src.lookup(tokenize_sentence("Heart, normal!")), [1.0, 0.0])
    with pytest.raises(MissingSentenceVector) as info:
        src.lookup(tokenize_sentence("no such sentence"))
    assert "no such sentence" in str(info.value)


def test_external_table_from_file(tmp_path):
    src = SentenceVectorSource.from_file(write(tmp_path, "1 2\nthe_heart_is_normal 0.6 0.8\n"))
    vec = src.lookup(tokenize_sentence("The heart is normal."))
    np.testing.assert_array_equal(vec, [0.6, 0.8])


def test_unknown_mode():
    with pytest.raises(ValueError):
        SentenceVectorSource("magic")


def test_embedded_sentence_mass_sums_to_one():
    rng = np.random.default_rng(0)
    emb = EmbeddedSentence.from_vectors(rng.standard_normal((7, 4)))
    assert emb.mass().sum() == pytest.approx(1.0, abs=1e-15)
