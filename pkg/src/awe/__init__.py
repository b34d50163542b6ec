"""Acoustic word embeddings from correspondence auto-encoder training.

The package covers the full desk-scale workflow: word-instance manifests
(`awe.corpus`), frame-level features (`awe.features`), training and
evaluation pair enumeration (`awe.pairs`), the CAE-RNN/AE-RNN models and
mean-pooling baseline (`awe.model`), exact same-different average precision
(`awe.samediff`), anagram and export analyses (`awe.analysis`), and the
`awe` command line pipeline (`awe.cli`).
"""

__version__ = "0.1.0"
