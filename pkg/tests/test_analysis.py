import random

import numpy as np
import pytest

from awe.analysis import (ANAGRAM_PAIR, SAME_WORD, InsufficientInstances,
                          anagram_report, export_labeled_embeddings,
                          find_anagram_pairs, top_frequency_words,
                          write_anagram_report)
from awe.samediff import EmbeddingSet, cosine_distance

import oracles


def emb_set(rows):
    """rows: (id, word, speaker, vector)"""
    return EmbeddingSet(
        vectors=np.array([r[3] for r in rows], dtype=np.float32),
        labels=tuple(r[1] for r in rows),
        speakers=tuple(r[2] for r in rows),
        ids=tuple(r[0] for r in rows))


class TestFindAnagramPairs:
    def test_known_pairs(self):
        assert find_anagram_pairs({"aside", "ideas"}) == [("aside", "ideas")]
        assert find_anagram_pairs({"no", "on"}) == [("no", "on")]

    def test_unrelated_words(self):
        assert find_anagram_pairs({"cat", "dog"}) == []

    def test_identical_words_not_paired(self):
        assert find_anagram_pairs(["this", "this"]) == []

    def test_triple_group(self):
        got = set(find_anagram_pairs({"tar", "rat", "art"}))
        assert got == {("art", "rat"), ("art", "tar"), ("rat", "tar")}

    def test_matches_quadratic_oracle(self):
        rng = random.Random(0)
        letters = "abcde"
        for _ in range(20):
            vocab = {"".join(rng.choice(letters)
                             for _ in range(rng.randint(2, 4)))
                     for _ in range(rng.randint(2, 25))}
            got = set(find_anagram_pairs(vocab))
            assert got == oracles.brute_force_anagrams(vocab)
            for w1, w2 in got:
                assert w1 != w2          # irreflexive
                assert w1 < w2           # canonical orientation
                assert (w2, w1) not in got


class TestAnagramReport:
    def base_set(self):
        return emb_set([
            ("a1", "aside", "s1", [1.0, 0.0, 0.0]),
            ("a2", "aside", "s2", [1.0, 0.0, 0.0]),
            ("i1", "ideas", "s1", [0.0, 1.0, 0.0]),
            ("i2", "ideas", "s3", [0.0, 1.0, 0.0]),
        ])

    def test_same_word_distance_zero(self):
        rows = anagram_report(self.base_set(), [("aside", "ideas")])
        same = [r for r in rows if r.description == SAME_WORD]
        assert same[0].word1 == "aside"
        assert same[0].distance == pytest.approx(0.0, abs=1e-7)

    def test_orthogonal_anagram_distance_one(self):
        rows = anagram_report(self.base_set(), [("aside", "ideas")])
        anag = [r for r in rows if r.description == ANAGRAM_PAIR]
        assert anag[0].word2 == "ideas"
        assert anag[0].distance == pytest.approx(1.0, abs=1e-7)

    def test_schema_columns(self, tmp_path):
        rows = anagram_report(self.base_set(), [("aside", "ideas")])
        path = tmp_path / "report.csv"
        write_anagram_report(rows, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "word1,word2,distance,description"
        assert any(line.endswith(SAME_WORD) for line in lines[1:])
        assert any(line.endswith(ANAGRAM_PAIR) for line in lines[1:])

    def test_requires_different_speakers(self):
        rows = [("x1", "no", "s1", [1.0, 0.0]),
                ("x2", "no", "s1", [1.0, 0.1]),
                ("y1", "on", "s1", [0.0, 1.0])]
        with pytest.raises(InsufficientInstances, match="no"):
            anagram_report(emb_set(rows), [("no", "on")])

    def test_deterministic_instance_choice(self):
        rng = np.random.default_rng(0)
        rows = [(f"n{k}", "no", f"s{k % 3}", rng.standard_normal(4))
                for k in range(6)]
        rows += [(f"o{k}", "on", f"s{k % 3}", rng.standard_normal(4))
                 for k in range(6)]
        emb = emb_set(rows)
        r1 = anagram_report(emb, [("no", "on")])
        r2 = anagram_report(emb, [("no", "on")])
        assert r1 == r2
        # lowest-id picks: n0 with first different-speaker partner n1
        same = [r for r in r1 if r.description == SAME_WORD and r.word1 == "no"][0]
        expected = cosine_distance(emb.vectors[0], emb.vectors[1])
        assert same.distance == pytest.approx(expected, abs=1e-12)

    def test_distances_consistent_with_cosine(self):
        emb = self.base_set()
        rows = anagram_report(emb, [("aside", "ideas")])
        for row in rows:
            assert 0.0 <= row.distance <= 2.0

    def test_unknown_policy_rejected(self):
        with pytest.raises(ValueError):
            anagram_report(self.base_set(), [], speaker_policy="any")


class TestExport:
    def counts_set(self):
        rng = np.random.default_rng(1)
        rows = []
        for k in range(5):
            rows.append((f"a{k}", "alpha", "s1", rng.standard_normal(3)))
        for k in range(3):
            rows.append((f"b{k}", "beta", "s1", rng.standard_normal(3)))
        for k in range(3):
            rows.append((f"c{k}", "ceta", "s2", rng.standard_normal(3)))
        return emb_set(rows)

    def test_top_k_one(self, tmp_path):
        path = tmp_path / "out.csv"
        words = export_labeled_embeddings(self.counts_set(), 1, path)
        assert words == ["alpha"]
        lines = path.read_text().splitlines()
        assert lines[0] == "instance_id,word,v0,v1,v2"
        assert len(lines) == 6

    def test_frequency_tie_breaks_lexicographically(self):
        assert top_frequency_words(self.counts_set(), 2) == ["alpha", "beta"]

    def test_k_larger_than_vocab_exports_all(self, tmp_path):
        path = tmp_path / "out.csv"
        words = export_labeled_embeddings(self.counts_set(), 100, path)
        assert set(words) == {"alpha", "beta", "ceta"}
        assert len(path.read_text().splitlines()) == 12

    def test_top_k_must_be_positive(self):
        with pytest.raises(ValueError):
            top_frequency_words(self.counts_set(), 0)

    def test_vectors_round_trip_exactly(self, tmp_path):
        emb = self.counts_set()
        path = tmp_path / "out.csv"
        export_labeled_embeddings(emb, 100, path)
        lines = path.read_text().splitlines()[1:]
        by_id = {line.split(",")[0]: line for line in lines}
        row = by_id["a0"].split(",")
        assert np.allclose([float(v) for v in row[2:]], emb.vectors[0],
                           atol=0)
