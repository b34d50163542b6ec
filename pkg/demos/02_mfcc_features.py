#!/usr/bin/env python3
"""Extract MFCC features from a synthesized signal and store them.

Shows the 30 ms / 20 ms framing arithmetic, the 60-dimensional
static+delta+delta-delta layout, context slicing, and the binary feature
file round-trip.
"""

import tempfile
from pathlib import Path

import numpy as np

from awe.features import (extract_mfcc, read_feature_file,
                          slice_with_context, write_feature_file)

RATE = 16000


def main():
    # one second of a 440 Hz tone with a little noise
    t = np.arange(RATE) / RATE
    rng = np.random.default_rng(0)
    signal = 0.4 * np.sin(2 * np.pi * 440.0 * t) + 0.01 * rng.standard_normal(RATE)

    feats = extract_mfcc(signal, RATE)
    print(f"{signal.size} samples -> {feats.num_frames} frames x {feats.dim} dims")
    print("frame shift:", feats.frame_shift_ms, "ms")
    print("c0 of first three frames:", np.round(feats.data[:3, 0], 2))

    # treat the sequence as a full utterance and cut out 0.3 s .. 0.7 s
    word = slice_with_context(feats, 0.3, 0.7)
    print(f"slice [0.3 s, 0.7 s) -> frames {word.num_frames} "
          f"(floor/ceil rounding keeps the whole word)")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "word.awef"
        write_feature_file(word, path)
        back = read_feature_file(path)
        print("round-trip bit-identical:",
              back.data.tobytes() == word.data.tobytes())


if __name__ == "__main__":
    main()
