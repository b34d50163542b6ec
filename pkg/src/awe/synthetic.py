"""Synthetic word corpora for desk-scale experiments and tests.

Each word type gets a smooth class-specific trajectory through feature
space (a low-order Fourier curve over normalized time). An instance of a
word samples that trajectory at a jittered length and then passes through
its speaker's affine nuisance map (a near-identity mixing matrix plus a
speaker bias) with a little additive noise. This mimics what makes the
real task hard: same-word instances differ in duration and speaker
coloring, different words differ in trajectory shape.

Speakers are split disjointly across train/dev/test so evaluation always
happens on unseen speakers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Manifest, WordInstance
from .features import FeatureSequence, MemoryFeatureStore

FRAME_SHIFT_MS = 20


@dataclass(frozen=True)
class SyntheticConfig:
    num_words: int = 30
    instances_per_word: int = 20
    dim: int = 12
    num_speakers: int = 10
    train_speakers: int = 6
    dev_speakers: int = 2
    harmonics: int = 3
    # Word shape must carry more energy than the speaker nuisance, or the
    # reconstruction loss is dominated by the unpredictable bias and the
    # encoder gets no usable gradient at desk scale.
    trajectory_scale: float = 2.0
    # Zero-DC trajectories put word identity in temporal shape alone, so a
    # plain frame average carries mostly the speaker offset.
    dc_component: bool = False
    min_len: int = 14
    max_len: int = 28
    length_jitter: tuple[float, float] = (0.8, 1.25)
    speaker_mix: float = 0.15   # off-identity scale of the speaker matrix
    speaker_bias: float = 0.7   # std of the per-speaker offset
    noise: float = 0.05
    word_prefix: str = "w"
    language: str = "synthA"

    def __post_init__(self):
        if self.train_speakers + self.dev_speakers >= self.num_speakers:
            raise ValueError("no speakers left for the test split")


@dataclass
class SyntheticCorpus:
    splits: dict[str, Manifest]
    features: MemoryFeatureStore
    config: SyntheticConfig

    @property
    def train(self) -> Manifest:
        return self.splits["train"]

    @property
    def dev(self) -> Manifest:
        return self.splits["dev"]

    @property
    def test(self) -> Manifest:
        return self.splits["test"]


def _word_trajectory(rng: np.random.Generator, cfg: SyntheticConfig):
    # Fourier coefficients with 1/h decay keep the curves smooth.
    harmonics = np.arange(cfg.harmonics + 1)
    coef_cos = rng.standard_normal((cfg.harmonics + 1, cfg.dim))
    coef_sin = rng.standard_normal((cfg.harmonics + 1, cfg.dim))
    scale = cfg.trajectory_scale / (1.0 + harmonics)[:, None]
    coef_cos *= scale
    coef_sin *= scale
    offset = np.zeros(cfg.dim)
    if not cfg.dc_component:
        coef_cos[0] = 0.0  # the h=0 sine term is identically zero anyway
        # Center the time-average of each remaining basis function: over
        # t in [0, 1], cos(pi h t) integrates to 0 but sin(pi h t) to
        # (1 - cos(pi h)) / (pi h), so odd-h sine terms need an offset.
        sin_means = np.zeros(cfg.harmonics + 1)
        sin_means[1:] = (1.0 - np.cos(np.pi * harmonics[1:])) \
            / (np.pi * harmonics[1:])
        offset = -sin_means @ coef_sin

    def curve(t: np.ndarray) -> np.ndarray:
        phases = np.pi * np.outer(t, harmonics)
        return np.cos(phases) @ coef_cos + np.sin(phases) @ coef_sin + offset

    return curve


def make_corpus(cfg: SyntheticConfig = SyntheticConfig(),
                seed: int = 0) -> SyntheticCorpus:
    """Generate manifests and in-memory features for all three splits."""
    rng = np.random.default_rng(seed)
    curves = [_word_trajectory(rng, cfg) for _ in range(cfg.num_words)]
    base_len = rng.integers(cfg.min_len, cfg.max_len + 1, size=cfg.num_words)

    mixes = []
    biases = []
    for _ in range(cfg.num_speakers):
        g = rng.standard_normal((cfg.dim, cfg.dim)) / np.sqrt(cfg.dim)
        mixes.append(np.eye(cfg.dim) + cfg.speaker_mix * g)
        biases.append(cfg.speaker_bias * rng.standard_normal(cfg.dim))

    def split_of(speaker: int) -> str:
        if speaker < cfg.train_speakers:
            return "train"
        if speaker < cfg.train_speakers + cfg.dev_speakers:
            return "dev"
        return "test"

    store = MemoryFeatureStore()
    by_split: dict[str, list[WordInstance]] = {"train": [], "dev": [], "test": []}
    lo, hi = cfg.length_jitter
    for w in range(cfg.num_words):
        word = f"{cfg.word_prefix}{w:03d}"
        for k in range(cfg.instances_per_word):
            speaker = (w + k) % cfg.num_speakers
            n = max(2, int(round(base_len[w] * rng.uniform(lo, hi))))
            t = np.linspace(0.0, 1.0, n)
            feats = curves[w](t) @ mixes[speaker].T + biases[speaker]
            feats = feats + cfg.noise * rng.standard_normal((n, cfg.dim))
            instance_id = f"{cfg.word_prefix}{w:03d}_{k:03d}"
            store.put(instance_id, FeatureSequence(
                feats, frame_shift_ms=FRAME_SHIFT_MS, source_kind="ssl"))
            by_split[split_of(speaker)].append(WordInstance(
                instance_id=instance_id, word=word,
                speaker_id=f"spk{speaker:02d}",
                utterance_id=instance_id, start_s=0.0,
                end_s=n * FRAME_SHIFT_MS / 1000.0, source="synthetic"))

    splits = {name: Manifest(split=name, language=cfg.language,
                             instances=tuple(insts))
              for name, insts in by_split.items()}
    return SyntheticCorpus(splits=splits, features=store, config=cfg)


def positive_pair_prior(manifest: Manifest) -> float:
    """Fraction of same-word pairs among all instance pairs.

    A random ranking scores an AP close to this prior, so it serves as
    the chance level for the discrimination task.
    """
    n = len(manifest)
    if n < 2:
        raise ValueError("need >= 2 instances")
    freqs = manifest.word_frequencies()
    positives = sum(c * (c - 1) // 2 for c in freqs.values())
    return positives / (n * (n - 1) // 2)
