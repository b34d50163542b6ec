"""Word-instance manifests: loading, validation, filtering and splits.

A manifest is a UTF-8 text file with one word occurrence per line:

    instance_id,word,speaker_id,utterance_id,start_s,end_s,source

Word labels are NFC-normalized and lowercased on load so that all
downstream label comparisons are plain string equality.
"""

from __future__ import annotations

import csv
import io
import unicodedata
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path

MANIFEST_HEADER = ("instance_id", "word", "speaker_id", "utterance_id",
                   "start_s", "end_s", "source")

VALID_SPLITS = ("train", "dev", "test")


class ManifestError(ValueError):
    """Base class for manifest problems."""


class ParseError(ManifestError):
    """Malformed manifest row; carries the 1-based line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ValidationError(ManifestError):
    """Structurally parsable manifest that violates an invariant."""


def normalize_word(word: str) -> str:
    """NFC-normalize and lowercase a word label."""
    return unicodedata.normalize("NFC", word).lower()


@dataclass(frozen=True)
class WordInstance:
    """One spoken word occurrence cut from an utterance.

    `start_s`/`end_s` are the word boundaries in seconds within the
    utterance; `source` points at the audio or feature file the instance
    is cut from.
    """

    instance_id: str
    word: str
    speaker_id: str
    utterance_id: str
    start_s: float
    end_s: float
    source: str

    def __post_init__(self):
        if self.start_s < 0:
            raise ValidationError(
                f"instance {self.instance_id!r}: start_s must be >= 0, "
                f"got {self.start_s}")
        if self.end_s <= self.start_s:
            raise ValidationError(
                f"instance {self.instance_id!r}: end_s ({self.end_s}) must "
                f"be > start_s ({self.start_s})")
        object.__setattr__(self, "word", normalize_word(self.word))

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class Manifest:
    """A split-tagged, immutable collection of word instances."""

    split: str
    language: str
    instances: tuple[WordInstance, ...]

    def __post_init__(self):
        if self.split not in VALID_SPLITS:
            raise ValidationError(
                f"split must be one of {VALID_SPLITS}, got {self.split!r}")
        object.__setattr__(self, "instances", tuple(self.instances))
        seen = set()
        for inst in self.instances:
            if inst.instance_id in seen:
                raise ValidationError(
                    f"duplicate instance_id {inst.instance_id!r}")
            seen.add(inst.instance_id)

    def __len__(self):
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    @property
    def vocabulary(self) -> set[str]:
        return {inst.word for inst in self.instances}

    @property
    def speakers(self) -> set[str]:
        return {inst.speaker_id for inst in self.instances}

    def word_frequencies(self) -> Counter:
        return Counter(inst.word for inst in self.instances)


@dataclass(frozen=True)
class CorpusStats:
    num_instances: int
    num_unique_words: int
    num_speakers: int
    total_duration_h: float


def _infer_split(path: Path) -> str | None:
    stem = path.stem.lower()
    for split in VALID_SPLITS:
        if stem == split or stem.endswith("_" + split) or stem.endswith("-" + split):
            return split
    return None


def load_manifest(path, split=None, language="und") -> Manifest:
    """Load and validate a manifest file.

    Parameters
    ----------
    path : str or Path
        Manifest file in the header format above.
    split : str, optional
        One of "train", "dev", "test". When omitted, inferred from the
        file stem (e.g. ``english_train.csv``); defaults to "train" if
        inference fails.
    language : str
        ISO language code tag carried along for reporting.

    Raises
    ------
    ParseError
        Malformed row (wrong column count, unparsable seconds, empty
        required field), with the offending line number.
    ValidationError
        Parsable rows that violate instance or manifest invariants
        (end <= start, negative start, duplicate instance_id).
    """
    path = Path(path)
    if split is None:
        split = _infer_split(path) or "train"
    with open(path, "r", encoding="utf-8", newline="") as f:
        return _parse_manifest(f, split=split, language=language)


def loads_manifest(text: str, split="train", language="und") -> Manifest:
    """Parse a manifest from a string (same format as `load_manifest`)."""
    return _parse_manifest(io.StringIO(text), split=split, language=language)


def _parse_manifest(stream, split, language) -> Manifest:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file, expected header", line_no=1) from None
    if tuple(h.strip() for h in header) != MANIFEST_HEADER:
        raise ParseError(
            f"bad header {header!r}, expected {','.join(MANIFEST_HEADER)}",
            line_no=1)

    instances = []
    for line_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # blank line
        if len(row) != len(MANIFEST_HEADER):
            raise ParseError(
                f"expected {len(MANIFEST_HEADER)} fields, got {len(row)}",
                line_no=line_no)
        instance_id, word, speaker_id, utterance_id, start_s, end_s, source = (
            v.strip() for v in row)
        for name, value in (("instance_id", instance_id), ("word", word),
                            ("speaker_id", speaker_id), ("source", source)):
            if not value:
                raise ParseError(f"empty {name}", line_no=line_no)
        try:
            start = float(start_s)
            end = float(end_s)
        except ValueError:
            raise ParseError(
                f"unparsable seconds {start_s!r}/{end_s!r}",
                line_no=line_no) from None
        instances.append(WordInstance(
            instance_id=instance_id, word=word, speaker_id=speaker_id,
            utterance_id=utterance_id, start_s=start, end_s=end,
            source=source))
    return Manifest(split=split, language=language, instances=tuple(instances))


def save_manifest(manifest: Manifest, path) -> None:
    """Write a manifest back out; seconds get >= 3 fractional digits."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(MANIFEST_HEADER)
        for inst in manifest:
            writer.writerow([
                inst.instance_id, inst.word, inst.speaker_id,
                inst.utterance_id, f"{inst.start_s:.3f}", f"{inst.end_s:.3f}",
                inst.source])


def filter_instances(manifest: Manifest, min_dur_s: float = 0.5,
                     min_freq: int = 5, max_freq: int = 50) -> Manifest:
    """Apply the duration and word-frequency retention rules.

    The duration cut runs first; word frequencies are then re-counted on
    the duration survivors, and only words whose recounted frequency lies
    in [min_freq, max_freq] (inclusive) are retained. The operation is
    idempotent for fixed thresholds.
    """
    if min_freq > max_freq:
        raise ValueError(f"min_freq ({min_freq}) > max_freq ({max_freq})")
    survivors = [inst for inst in manifest if inst.duration_s >= min_dur_s]
    freqs = Counter(inst.word for inst in survivors)
    kept = tuple(inst for inst in survivors
                 if min_freq <= freqs[inst.word] <= max_freq)
    return replace(manifest, instances=kept)


def build_test_prime(train: Manifest, test: Manifest) -> Manifest:
    """Subset of `test` whose word types never occur in `train`."""
    train_vocab = train.vocabulary
    kept = tuple(inst for inst in test if inst.word not in train_vocab)
    return replace(test, instances=kept)


def stats(manifest: Manifest) -> CorpusStats:
    """Instance/word/speaker counts and total duration in hours."""
    total_s = sum(inst.duration_s for inst in manifest)
    return CorpusStats(
        num_instances=len(manifest),
        num_unique_words=len(manifest.vocabulary),
        num_speakers=len(manifest.speakers),
        total_duration_h=total_s / 3600.0)


def find_speaker_overlap(manifests) -> dict[str, list[str]]:
    """Map each speaker appearing in more than one split to its splits."""
    by_speaker: dict[str, list[str]] = {}
    for m in manifests:
        for spk in sorted(m.speakers):
            by_speaker.setdefault(spk, []).append(m.split)
    return {spk: splits for spk, splits in by_speaker.items()
            if len(set(splits)) > 1}


def validate_speaker_disjoint(*manifests: Manifest) -> None:
    """Raise ValidationError if any speaker appears in two splits."""
    overlap = find_speaker_overlap(manifests)
    if overlap:
        detail = "; ".join(
            f"{spk} in {sorted(set(splits))}" for spk, splits in
            sorted(overlap.items()))
        raise ValidationError(f"speaker overlap across splits: {detail}")
