"""Same-different word discrimination: cosine distances and exact AP.

Average precision is computed as a rank statistic: pairs sorted by
ascending distance, AP = (1/P) sum over positive ranks k of
(positives <= k) / k. Tied distances are collapsed into a single
threshold step (a threshold cannot separate equal distances), so each tie
block contributes its end-of-block precision weighted by the recall it
adds. This equals the area under the precision-recall curve obtained by
sweeping every possible threshold.

Distances are accumulated in 64-bit regardless of the embedding dtype,
and each pair's distance comes from the same per-row kernel whatever the
streaming block size, so AP is reproducible across block sizes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .pairs import DEFAULT_BLOCK_PAIRS, TooFewInstances

AWEE_MAGIC = b"AWEE"
AWEE_VERSION = 1

# Zero vectors have no direction; their cosine distance to anything is
# defined as 1.0 and counted here so callers can notice.
zero_vector_count = 0


class NoPositives(ValueError):
    pass


class DimMismatch(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingSet:
    """Labeled fixed-dimensional vectors ready for pair evaluation."""

    vectors: np.ndarray
    labels: tuple[str, ...]
    speakers: tuple[str, ...]
    ids: tuple[str, ...]

    def __post_init__(self):
        vec = np.asarray(self.vectors, dtype=np.float32)
        if vec.ndim != 2:
            raise ValueError(f"expected 2-d vector matrix, got {vec.ndim}-d")
        if not np.all(np.isfinite(vec)):
            raise ValueError("non-finite embedding values")
        object.__setattr__(self, "vectors", vec)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "speakers", tuple(self.speakers))
        object.__setattr__(self, "ids", tuple(self.ids))
        n = vec.shape[0]
        if not (len(self.labels) == len(self.speakers) == len(self.ids) == n):
            raise ValueError("vectors/labels/speakers/ids lengths differ")

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def subset(self, indices) -> "EmbeddingSet":
        idx = np.asarray(indices, dtype=np.int64)
        return EmbeddingSet(
            vectors=self.vectors[idx],
            labels=tuple(self.labels[i] for i in idx),
            speakers=tuple(self.speakers[i] for i in idx),
            ids=tuple(self.ids[i] for i in idx))

    def label_codes(self) -> np.ndarray:
        _, codes = np.unique(np.asarray(self.labels, dtype=object),
                             return_inverse=True)
        return codes.astype(np.int64)

    def speaker_codes(self) -> np.ndarray:
        _, codes = np.unique(np.asarray(self.speakers, dtype=object),
                             return_inverse=True)
        return codes.astype(np.int64)


@dataclass(frozen=True)
class ApReport:
    ap: float
    num_pairs: int
    num_positive_pairs: int
    set_tag: str
    language: str = "und"
    notes: str = ""

    def __post_init__(self):
        if not 0.0 <= self.ap <= 1.0:
            raise ValueError(f"ap out of [0, 1]: {self.ap}")
        if self.num_positive_pairs > self.num_pairs:
            raise ValueError("more positive pairs than pairs")


def format_report(report: ApReport) -> str:
    lines = [f"set_tag={report.set_tag}",
             f"language={report.language}",
             f"ap={report.ap:.6f}",
             f"num_pairs={report.num_pairs}",
             f"num_positive_pairs={report.num_positive_pairs}",
             f"notes={report.notes}"]
    return "\n".join(lines) + "\n"


def cosine_distance(u, v) -> float:
    """1 - cos(u, v), in [0, 2]; zero vectors map to 1.0 by convention."""
    global zero_vector_count
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise DimMismatch(f"dims differ: {u.shape} vs {v.shape}")
    nu = float(np.sqrt(np.dot(u, u)))
    nv = float(np.sqrt(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        zero_vector_count += 1
        return 1.0
    return 1.0 - float(np.dot(u, v)) / (nu * nv)


def _normalized_rows(vectors: np.ndarray) -> np.ndarray:
    global zero_vector_count
    v = np.asarray(vectors, dtype=np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", v, v))
    zero = norms == 0.0
    if np.any(zero):
        zero_vector_count += int(zero.sum())
        norms = norms.copy()
        norms[zero] = 1.0
    return v / norms[:, None]


def average_precision(distances, is_same=None) -> float:
    """Exact AP of a (distance, is_same_word) stream.

    Accepts parallel arrays, or a single iterable of (distance, label)
    tuples when `is_same` is omitted.
    """
    if is_same is None:
        pairs = list(distances)
        d = np.asarray([p[0] for p in pairs], dtype=np.float64)
        y = np.asarray([bool(p[1]) for p in pairs])
    else:
        d = np.asarray(distances, dtype=np.float64)
        y = np.asarray(is_same, dtype=bool)
    if d.shape != y.shape or d.ndim != 1:
        raise ValueError("distances and labels must be parallel 1-d arrays")
    num_pos = int(y.sum())
    if num_pos == 0:
        raise NoPositives("no same-word pair in the stream")

    order = np.argsort(d, kind="stable")
    ds = d[order]
    ys = y[order]
    n = ds.size
    block_end = np.empty(n, dtype=bool)
    block_end[:-1] = ds[1:] != ds[:-1]
    block_end[-1] = True
    cum_pos = np.cumsum(ys, dtype=np.int64)
    ends = np.nonzero(block_end)[0]
    pos_at_end = cum_pos[ends].astype(np.float64)
    precision = pos_at_end / (ends + 1).astype(np.float64)
    delta_recall = np.diff(np.concatenate(([0.0], pos_at_end))) / num_pos
    return float(np.sum(precision * delta_recall))


def pair_distance_stream(emb: EmbeddingSet,
                         block_pairs: int = DEFAULT_BLOCK_PAIRS,
                         different_speakers_only: bool = False,
                         ) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Stream (distances, is_same_word) blocks over all i < j pairs.

    Distances for row i against all j > i come from one float64
    matrix-vector product over unit-normalized embeddings, so the values
    do not depend on `block_pairs`. With `different_speakers_only`,
    same-word same-speaker pairs are dropped from the stream entirely.
    """
    if block_pairs < 1:
        raise ValueError("block_pairs must be >= 1")
    n = len(emb)
    normed = _normalized_rows(emb.vectors)
    words = emb.label_codes()
    speakers = emb.speaker_codes()
    buf_d: list[np.ndarray] = []
    buf_y: list[np.ndarray] = []
    buffered = 0
    for i in range(n - 1):
        dist = 1.0 - normed[i + 1:] @ normed[i]
        same = words[i + 1:] == words[i]
        if different_speakers_only:
            keep = ~(same & (speakers[i + 1:] == speakers[i]))
            dist = dist[keep]
            same = same[keep]
        buf_d.append(dist)
        buf_y.append(same)
        buffered += dist.size
        while buffered >= block_pairs:
            dd = np.concatenate(buf_d)
            yy = np.concatenate(buf_y)
            yield dd[:block_pairs], yy[:block_pairs]
            dd, yy = dd[block_pairs:], yy[block_pairs:]
            buf_d, buf_y = [dd], [yy]
            buffered = dd.size
    if buffered:
        dd = np.concatenate(buf_d)
        yy = np.concatenate(buf_y)
        if dd.size:
            yield dd, yy


def evaluate(emb: EmbeddingSet, set_tag: str = "test", language: str = "und",
             block_pairs: int = DEFAULT_BLOCK_PAIRS,
             different_speakers_only: bool = False,
             notes: str = "") -> ApReport:
    """Exact same-different AP over all pairs of an embedding set."""
    if len(emb) < 2:
        raise TooFewInstances(f"need >= 2 embeddings, got {len(emb)}")
    chunks_d = []
    chunks_y = []
    for dist, same in pair_distance_stream(
            emb, block_pairs=block_pairs,
            different_speakers_only=different_speakers_only):
        chunks_d.append(dist)
        chunks_y.append(same)
    d = np.concatenate(chunks_d) if chunks_d else np.empty(0)
    y = np.concatenate(chunks_y) if chunks_y else np.empty(0, dtype=bool)
    ap = average_precision(d, y)
    return ApReport(ap=ap, num_pairs=int(d.size),
                    num_positive_pairs=int(y.sum()), set_tag=set_tag,
                    language=language, notes=notes)


def cross_lingual_eval(checkpoint_path, target_sets,
                       block_pairs: int = DEFAULT_BLOCK_PAIRS,
                       different_speakers_only: bool = False,
                       ) -> list[ApReport]:
    """Zero-shot evaluation of a frozen source-language model.

    Parameters
    ----------
    checkpoint_path : path
        Checkpoint of the trained source-language model.
    target_sets : iterable of (set_tag, Manifest, FeatureStore)
        Target-language evaluation sets; each yields one report whose
        notes record source->target.

    Raises
    ------
    DimMismatch
        When the checkpoint's input dimension differs from the target
        feature dimension.
    """
    from .model import embed_manifest, load_checkpoint

    model = load_checkpoint(checkpoint_path)
    source = model.config.language
    reports = []
    for set_tag, manifest, store in target_sets:
        emb = embed_manifest(model, manifest, store)
        reports.append(evaluate(
            emb, set_tag=set_tag, language=manifest.language,
            block_pairs=block_pairs,
            different_speakers_only=different_speakers_only,
            notes=f"zero-shot {source}->{manifest.language}"))
    return reports


def write_embedding_file(emb: EmbeddingSet, path) -> None:
    """Binary embedding-set format: magic "AWEE", version, dim, N, rows.

    Each row is id/word/speaker as u16-length-prefixed UTF-8 followed by
    dim little-endian float32 components.
    """
    with open(path, "wb") as f:
        f.write(AWEE_MAGIC)
        f.write(struct.pack("<HII", AWEE_VERSION, emb.dim, len(emb)))
        vec = np.ascontiguousarray(emb.vectors, dtype="<f4")
        for i in range(len(emb)):
            for text in (emb.ids[i], emb.labels[i], emb.speakers[i]):
                raw = text.encode("utf-8")
                f.write(struct.pack("<H", len(raw)))
                f.write(raw)
            f.write(vec[i].tobytes())


def read_embedding_file(path) -> EmbeddingSet:
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != AWEE_MAGIC:
        raise ValueError(f"{path}: not an AWEE file")
    version, dim, n = struct.unpack_from("<HII", raw, 4)
    if version != AWEE_VERSION:
        raise ValueError(f"{path}: version {version}, expected {AWEE_VERSION}")
    off = 4 + 10
    ids, labels, speakers = [], [], []
    vectors = np.empty((n, dim), dtype=np.float32)
    try:
        for i in range(n):
            texts = []
            for _ in range(3):
                (length,) = struct.unpack_from("<H", raw, off)
                off += 2
                texts.append(raw[off:off + length].decode("utf-8"))
                off += length
            ids.append(texts[0])
            labels.append(texts[1])
            speakers.append(texts[2])
            row = np.frombuffer(raw, dtype="<f4", count=dim, offset=off)
            vectors[i] = row
            off += dim * 4
    except (struct.error, ValueError) as exc:
        raise ValueError(f"{path}: truncated embedding file") from exc
    return EmbeddingSet(vectors=vectors, labels=tuple(labels),
                        speakers=tuple(speakers), ids=tuple(ids))
