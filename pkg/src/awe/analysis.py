"""Anagram-pair distance reports and labeled-embedding export.

Anagram pairs probe whether embeddings encode phone order: two distinct
words with identical letter multisets should stay far apart even though
they share all their letters. Projection (t-SNE and friends) is left to
external tools; this module only exports labeled vectors.
"""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass

from .samediff import EmbeddingSet, cosine_distance

SAME_WORD = "same word"
ANAGRAM_PAIR = "anagram pair"


class InsufficientInstances(ValueError):
    def __init__(self, word, detail=""):
        super().__init__(f"word {word!r}: {detail or 'not enough instances'}")
        self.word = word


@dataclass(frozen=True)
class AnagramRow:
    word1: str
    word2: str
    distance: float
    description: str


def find_anagram_pairs(vocab) -> list[tuple[str, str]]:
    """All unordered pairs of distinct words with equal letter multisets."""
    by_letters = defaultdict(list)
    for word in sorted(set(vocab)):
        by_letters["".join(sorted(word))].append(word)
    out = []
    for words in by_letters.values():
        for i in range(len(words)):
            for j in range(i + 1, len(words)):
                out.append((words[i], words[j]))
    return out


def _instances_of(emb: EmbeddingSet, word: str) -> list[int]:
    rows = [i for i, label in enumerate(emb.labels) if label == word]
    return sorted(rows, key=lambda i: emb.ids[i])


def _different_speaker_pick(emb: EmbeddingSet, rows_a, rows_b,
                            word: str) -> tuple[int, int]:
    # Lowest instance_id order: first row of a, then the first row of b
    # with a different speaker.
    for i in rows_a:
        for j in rows_b:
            if i != j and emb.speakers[i] != emb.speakers[j]:
                return i, j
    raise InsufficientInstances(
        word, "no different-speaker instance pair available")


def anagram_report(emb: EmbeddingSet, pairs,
                   speaker_policy: str = "different-speakers",
                   ) -> list[AnagramRow]:
    """Table of same-word and anagram-pair cosine distances.

    For every word appearing in `pairs`, one same-word row compares two
    different-speaker instances of the word, and each anagram partner
    contributes a row comparing different-speaker instances across the
    two words. Instance choice is deterministic (lowest instance_id
    first).
    """
    if speaker_policy != "different-speakers":
        raise ValueError(f"unsupported speaker_policy {speaker_policy!r}")
    words = []
    for w1, w2 in pairs:
        for w in (w1, w2):
            if w not in words:
                words.append(w)
    rows_for = {}
    for w in words:
        rows = _instances_of(emb, w)
        if not rows:
            raise InsufficientInstances(w, "no instances in the embedding set")
        rows_for[w] = rows

    out = []
    for w in words:
        i, j = _different_speaker_pick(emb, rows_for[w], rows_for[w], w)
        out.append(AnagramRow(
            word1=w, word2=w,
            distance=cosine_distance(emb.vectors[i], emb.vectors[j]),
            description=SAME_WORD))
        for w1, w2 in pairs:
            if w1 != w:
                continue
            i, j = _different_speaker_pick(emb, rows_for[w1], rows_for[w2], w1)
            out.append(AnagramRow(
                word1=w1, word2=w2,
                distance=cosine_distance(emb.vectors[i], emb.vectors[j]),
                description=ANAGRAM_PAIR))
    return out


def write_anagram_report(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["word1", "word2", "distance", "description"])
        for row in rows:
            writer.writerow([row.word1, row.word2, f"{row.distance:.4f}",
                             row.description])


def top_frequency_words(emb: EmbeddingSet, top_k: int) -> list[str]:
    """The k most frequent word labels; frequency ties break lexically."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    freqs = Counter(emb.labels)
    ranked = sorted(freqs.items(), key=lambda kv: (-kv[1], kv[0]))
    return [w for w, _ in ranked[:top_k]]


def export_labeled_embeddings(emb: EmbeddingSet, top_k_words: int,
                              path) -> list[str]:
    """Write instances of the top-k most frequent words as CSV.

    Header is ``instance_id,word,v0..v{dim-1}``; suitable input for any
    external projection tool. Returns the selected words.
    """
    selected = top_frequency_words(emb, top_k_words)
    chosen = set(selected)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["instance_id", "word"]
                        + [f"v{i}" for i in range(emb.dim)])
        for i in range(len(emb)):
            if emb.labels[i] in chosen:
                writer.writerow([emb.ids[i], emb.labels[i]]
                                + [repr(float(v)) for v in emb.vectors[i]])
    return selected
