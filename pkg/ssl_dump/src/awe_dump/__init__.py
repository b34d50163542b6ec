"""Frame-feature dumper for pretrained self-supervised speech models.

Runs wav2vec2 / HuBERT / WavLM BASE models over word-instance manifests
and writes one binary AWEF feature file per instance, either with the
utterance context (full utterance forward pass, then a frame slice at the
word boundaries) or without it (forward pass over the cut segment only).
"""

__version__ = "0.1.0"
