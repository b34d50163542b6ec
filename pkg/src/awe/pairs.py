"""Training-pair and evaluation-pair enumeration.

Correspondence pairs are ordered: both (a, b) and (b, a) are emitted for
two instances of the same word, since input and reconstruction target play
asymmetric roles. Evaluation pairs cover all N(N-1)/2 unordered instance
pairs and are streamed in blocks so the pair objects are never fully
materialized for large N.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .corpus import Manifest

DEFAULT_BLOCK_PAIRS = 1 << 20


class TooFewInstances(ValueError):
    pass


@dataclass(frozen=True)
class TrainPair:
    input_id: str
    target_id: str
    word: str


@dataclass(frozen=True)
class EvalPair:
    id_a: str
    id_b: str
    is_same_word: bool


def _by_word(manifest: Manifest) -> dict[str, list]:
    groups = defaultdict(list)
    for inst in manifest:
        groups[inst.word].append(inst)
    return groups


def make_cae_pairs(manifest: Manifest, seed: int = 0) -> list[TrainPair]:
    """All ordered pairs of distinct same-word instances, seeded shuffle.

    A word with n instances contributes n(n-1) pairs; single-instance
    words contribute nothing.
    """
    out = []
    for word, insts in _by_word(manifest).items():
        for a in insts:
            for b in insts:
                if a.instance_id != b.instance_id:
                    out.append(TrainPair(a.instance_id, b.instance_id, word))
    random.Random(seed).shuffle(out)
    return out


def make_ae_pairs(manifest: Manifest) -> list[TrainPair]:
    """One self-pair (input = target) per instance, in manifest order."""
    return [TrainPair(inst.instance_id, inst.instance_id, inst.word)
            for inst in manifest]


def num_eval_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_index_blocks(n: int, block_pairs: int = DEFAULT_BLOCK_PAIRS,
                      ) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Upper-triangle index pairs (i < j) in row-major order, blockwise.

    Yields (i_idx, j_idx) int64 arrays of at most `block_pairs` pairs.
    Block boundaries are deterministic for a given (n, block_pairs).
    """
    if block_pairs < 1:
        raise ValueError("block_pairs must be >= 1")
    buf_i: list[np.ndarray] = []
    buf_j: list[np.ndarray] = []
    buffered = 0
    for i in range(n - 1):
        js = np.arange(i + 1, n, dtype=np.int64)
        buf_i.append(np.full(js.size, i, dtype=np.int64))
        buf_j.append(js)
        buffered += js.size
        while buffered >= block_pairs:
            ii = np.concatenate(buf_i)
            jj = np.concatenate(buf_j)
            yield ii[:block_pairs], jj[:block_pairs]
            ii, jj = ii[block_pairs:], jj[block_pairs:]
            buf_i, buf_j = [ii], [jj]
            buffered = ii.size
    if buffered:
        yield np.concatenate(buf_i), np.concatenate(buf_j)


def enumerate_eval_pairs(manifest: Manifest,
                         block_pairs: int = DEFAULT_BLOCK_PAIRS,
                         ) -> Iterator[EvalPair]:
    """Stream all N(N-1)/2 evaluation pairs, labeled by word equality.

    Pair order is row-major over the manifest: (0,1), (0,2), ..., (1,2),
    ... The pair (id_a, id_b) always has id_a at the smaller manifest
    index, which is the fixed total order ruling out duplicates and
    self-pairs.
    """
    insts = manifest.instances
    n = len(insts)
    if n < 2:
        raise TooFewInstances(f"need >= 2 instances, got {n}")
    for i_idx, j_idx in pair_index_blocks(n, block_pairs):
        for i, j in zip(i_idx.tolist(), j_idx.tolist()):
            a, b = insts[i], insts[j]
            yield EvalPair(a.instance_id, b.instance_id, a.word == b.word)


def write_pair_list(pairs, path) -> None:
    """One pair per line: input_id TAB target_id."""
    with open(path, "w", encoding="utf-8") as f:
        for p in pairs:
            if isinstance(p, TrainPair):
                f.write(f"{p.input_id}\t{p.target_id}\n")
            else:
                f.write(f"{p.id_a}\t{p.id_b}\n")
