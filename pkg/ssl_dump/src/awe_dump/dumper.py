"""Run BASE self-supervised speech models and dump per-word features.

Two regimes: "with-context" feeds the entire utterance through the model
and then slices the word's frames out of the result, so each frame has
seen its surroundings; "without-context" feeds only the cut word segment.
Both emit 768-dimensional vectors at a 20 ms frame shift, written in the
shared AWEF format.

Frame slicing uses the same outward rounding as the training toolkit:
frames [floor(t1 / shift), ceil(t2 / shift)) clamped to the utterance.
"""

import math
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .awef import SOURCE_KIND_SSL, write_awef
from .manifest import Row, read_manifest

SAMPLE_RATE = 16000
FRAME_SHIFT_MS = 20
EXPECTED_DIM = 768
EXPECTED_LAYERS = 12
MODES = ("with-context", "without-context")

# Word boundaries that land exactly on a frame edge must not wobble off it.
_BOUNDARY_EPS = 1e-6


class DumpError(RuntimeError):
    pass


class ModelLoadError(DumpError):
    pass


class AudioDecodeError(DumpError):
    pass


class BoundaryOutOfRange(DumpError):
    pass


@dataclass(frozen=True)
class DumpJob:
    model_id: str
    manifest: Path
    out_dir: Path
    mode: str = "with-context"
    layer: int = 12
    model_path: Path | None = None  # local checkpoint directory

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 1 <= self.layer <= EXPECTED_LAYERS:
            raise ValueError(f"layer must be in [1, {EXPECTED_LAYERS}], "
                             f"got {self.layer}")


def _registry():
    from transformers import HubertModel, Wav2Vec2Model, WavLMModel
    return {
        "wav2vec2-base": (Wav2Vec2Model, "facebook/wav2vec2-base"),
        "hubert-base": (HubertModel, "facebook/hubert-base-ls960"),
        "wavlm-base": (WavLMModel, "microsoft/wavlm-base"),
    }


def load_model(job: DumpJob) -> torch.nn.Module:
    """Load the requested BASE model from a local path or the local cache."""
    registry = _registry()
    if job.model_id not in registry:
        raise ModelLoadError(
            f"unsupported model {job.model_id!r}; only BASE variants are "
            f"supported: {sorted(registry)}")
    cls, default_repo = registry[job.model_id]
    source = str(job.model_path) if job.model_path else default_repo
    try:
        model = cls.from_pretrained(source, local_files_only=True)
    except Exception as exc:
        raise ModelLoadError(
            f"cannot load {job.model_id} weights from {source!r}: {exc}"
        ) from exc
    validate_base_architecture(model, job.model_id)
    model.eval()
    return model


def validate_base_architecture(model, model_id: str) -> None:
    cfg = model.config
    if (getattr(cfg, "hidden_size", None) != EXPECTED_DIM
            or getattr(cfg, "num_hidden_layers", None) != EXPECTED_LAYERS):
        raise ModelLoadError(
            f"{model_id}: checkpoint is not a BASE architecture "
            f"(hidden {getattr(cfg, 'hidden_size', '?')}, layers "
            f"{getattr(cfg, 'num_hidden_layers', '?')})")


def read_wav_16k(path) -> np.ndarray:
    """Decode a 16 kHz PCM wav to float32 in [-1, 1]; stereo is downmixed."""
    try:
        with wave.open(str(path), "rb") as w:
            rate = w.getframerate()
            channels = w.getnchannels()
            width = w.getsampwidth()
            raw = w.readframes(w.getnframes())
    except (OSError, wave.Error) as exc:
        raise AudioDecodeError(f"{path}: {exc}") from exc
    if rate != SAMPLE_RATE:
        raise AudioDecodeError(
            f"{path}: expected {SAMPLE_RATE} Hz audio, got {rate} Hz")
    if width != 2:
        raise AudioDecodeError(f"{path}: expected 16-bit PCM, got "
                               f"{8 * width}-bit")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32768.0
    if channels > 1:
        samples = samples.reshape(-1, channels).mean(axis=1)
    return samples


def _forward_frames(model, samples: np.ndarray, layer: int) -> np.ndarray:
    # BASE checkpoints use group-norm feature extractors and take raw
    # waveforms; layer-norm variants expect standardized input.
    x = samples
    if getattr(model.config, "feat_extract_norm", "group") == "layer":
        x = (x - x.mean()) / (x.std() + 1e-7)
    with torch.no_grad():
        out = model(torch.from_numpy(x).float().unsqueeze(0),
                    output_hidden_states=True)
    return out.hidden_states[layer].squeeze(0).numpy()


def _slice_frames(num_frames: int, start_s: float, end_s: float,
                  row: Row) -> tuple[int, int]:
    shift_s = FRAME_SHIFT_MS / 1000.0
    first = math.floor(start_s / shift_s + _BOUNDARY_EPS)
    last = math.ceil(end_s / shift_s - _BOUNDARY_EPS)
    first = max(0, min(first, num_frames))
    last = max(0, min(last, num_frames))
    if last <= first:
        raise BoundaryOutOfRange(
            f"{row.instance_id}: [{start_s}, {end_s}) s maps to no frames "
            f"of a {num_frames}-frame utterance")
    return first, last


def _segment(samples: np.ndarray, row: Row) -> np.ndarray:
    lo = int(round(row.start_s * SAMPLE_RATE))
    hi = int(round(row.end_s * SAMPLE_RATE))
    if not 0 <= lo < hi or lo >= samples.size:
        raise BoundaryOutOfRange(
            f"{row.instance_id}: [{row.start_s}, {row.end_s}) s outside "
            f"the {samples.size / SAMPLE_RATE:.2f} s utterance")
    return samples[lo:min(hi, samples.size)]


def dump(job: DumpJob, model: torch.nn.Module | None = None) -> list[Path]:
    """Write one AWEF file per manifest instance; returns written paths."""
    if model is None:
        model = load_model(job)
    else:
        validate_base_architecture(model, job.model_id)
        model.eval()
    rows = read_manifest(job.manifest)
    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    by_source: dict[Path, list[Row]] = {}
    for row in rows:
        by_source.setdefault(row.source, []).append(row)

    written = []
    for source, group in by_source.items():
        samples = read_wav_16k(source)
        if job.mode == "with-context":
            frames = _forward_frames(model, samples, job.layer)
            for row in group:
                first, last = _slice_frames(frames.shape[0], row.start_s,
                                            row.end_s, row)
                path = out_dir / f"{row.instance_id}.awef"
                write_awef(frames[first:last], path,
                           frame_shift_ms=FRAME_SHIFT_MS,
                           source_kind=SOURCE_KIND_SSL)
                written.append(path)
        else:
            for row in group:
                segment = _segment(samples, row)
                try:
                    frames = _forward_frames(model, segment, job.layer)
                except RuntimeError as exc:
                    raise BoundaryOutOfRange(
                        f"{row.instance_id}: segment too short for the "
                        f"model front-end ({segment.size} samples)") from exc
                path = out_dir / f"{row.instance_id}.awef"
                write_awef(frames, path, frame_shift_ms=FRAME_SHIFT_MS,
                           source_kind=SOURCE_KIND_SSL)
                written.append(path)
    return written
