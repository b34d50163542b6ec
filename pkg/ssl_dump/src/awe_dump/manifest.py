"""Minimal reader for the word-instance manifest format.

One record per line after the header
``instance_id,word,speaker_id,utterance_id,start_s,end_s,source``;
`source` points at the utterance audio, resolved relative to the manifest
file when not absolute.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

HEADER = ("instance_id", "word", "speaker_id", "utterance_id",
          "start_s", "end_s", "source")


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class Row:
    instance_id: str
    word: str
    speaker_id: str
    utterance_id: str
    start_s: float
    end_s: float
    source: Path


def read_manifest(path) -> list[Row]:
    path = Path(path)
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != HEADER:
            raise ManifestError(f"{path}: bad or missing manifest header")
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(HEADER):
                raise ManifestError(f"{path}:{line_no}: expected "
                                    f"{len(HEADER)} fields, got {len(row)}")
            iid, word, speaker, utt, start_s, end_s, source = (
                v.strip() for v in row)
            try:
                start, end = float(start_s), float(end_s)
            except ValueError:
                raise ManifestError(
                    f"{path}:{line_no}: unparsable seconds") from None
            src = Path(source)
            if not src.is_absolute():
                src = path.parent / src
            rows.append(Row(instance_id=iid, word=word, speaker_id=speaker,
                            utterance_id=utt, start_s=start, end_s=end,
                            source=src))
    return rows
