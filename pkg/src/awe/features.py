"""Frame-level feature sequences: MFCC extraction, slicing, binary storage.

MFCC pipeline (all knobs pinned in `MfccConfig`): pre-emphasis 0.97,
Hamming window, FFT size = next power of two >= window length, 40
triangular mel filters spanning 0 Hz to Nyquist, natural-log energies with
a 1e-10 floor, orthonormal DCT-II keeping c0..c19, then +/-2 frame
regression deltas and delta-deltas appended for 60 dimensions total.

The on-disk feature format ("AWEF") is shared with the external dumper of
self-supervised features; see `write_feature_file`.
"""

from __future__ import annotations

import math
import struct
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SUPPORTED_SAMPLE_RATES = (8000, 16000, 22050, 44100)

AWEF_MAGIC = b"AWEF"
AWEF_VERSION = 1
_AWEF_HEADER = struct.Struct("<4sHHIIB7s")
SOURCE_KINDS = ("mfcc", "ssl")

# Guard against float wobble when second offsets land exactly on a frame
# boundary (e.g. 1.0 / 0.02 evaluating to 49.999...).
_BOUNDARY_EPS = 1e-6


class FeatureError(ValueError):
    pass


class AudioTooShort(FeatureError):
    pass


class UnsupportedSampleRate(FeatureError):
    pass


class EmptySlice(FeatureError):
    pass


class FeatureFileError(FeatureError):
    pass


class BadMagic(FeatureFileError):
    pass


class VersionMismatch(FeatureFileError):
    pass


class TruncatedFile(FeatureFileError):
    pass


@dataclass(frozen=True)
class FeatureSequence:
    """A (num_frames x dim) float32 matrix of frame features.

    Storage is always 32-bit float; training code may upcast.
    """

    data: np.ndarray
    frame_shift_ms: int
    source_kind: str = "mfcc"

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise FeatureError(f"expected 2-d feature matrix, got {arr.ndim}-d")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise FeatureError(f"degenerate feature shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise FeatureError("non-finite feature values")
        if self.frame_shift_ms <= 0:
            raise FeatureError(f"frame_shift_ms must be > 0, got {self.frame_shift_ms}")
        if self.source_kind not in SOURCE_KINDS:
            raise FeatureError(f"source_kind must be in {SOURCE_KINDS}")
        object.__setattr__(self, "data", arr)

    @property
    def num_frames(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class MfccConfig:
    sample_rate_hz: int = 16000
    window_ms: float = 30.0
    shift_ms: float = 20.0
    num_ceps: int = 20
    num_mel_filters: int = 40
    fft_size: int | None = None  # next power of two >= window when None
    pre_emphasis: float = 0.97
    log_floor: float = 1e-10

    def __post_init__(self):
        if not self.window_ms > self.shift_ms > 0:
            raise FeatureError(
                f"need window_ms > shift_ms > 0, got {self.window_ms}/{self.shift_ms}")
        if self.num_ceps > self.num_mel_filters:
            raise FeatureError(
                f"num_ceps ({self.num_ceps}) > num_mel_filters ({self.num_mel_filters})")

    @property
    def window_samples(self) -> int:
        return int(round(self.sample_rate_hz * self.window_ms / 1000.0))

    @property
    def shift_samples(self) -> int:
        return int(round(self.sample_rate_hz * self.shift_ms / 1000.0))

    @property
    def effective_fft_size(self) -> int:
        if self.fft_size is not None:
            return self.fft_size
        return 1 << (self.window_samples - 1).bit_length()


def num_frames_for(num_samples: int, cfg: MfccConfig) -> int:
    """floor((num_samples - window) / shift) + 1, valid for >= one window."""
    if num_samples < cfg.window_samples:
        raise AudioTooShort(
            f"{num_samples} samples < one window ({cfg.window_samples})")
    return (num_samples - cfg.window_samples) // cfg.shift_samples + 1


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(num_filters: int, fft_size: int, sample_rate_hz: int) -> np.ndarray:
    """Triangular mel filterbank sampled at the rfft bin frequencies.

    Returns a (num_filters x fft_size//2 + 1) float64 matrix. Filter ``i``
    rises from mel point ``i`` to ``i+1`` and falls to ``i+2``, with the
    num_filters+2 points equally spaced in mel between 0 Hz and Nyquist.
    """
    nyquist = sample_rate_hz / 2.0
    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(nyquist), num_filters + 2)
    hz_points = mel_to_hz(mel_points)
    bin_freqs = np.arange(fft_size // 2 + 1, dtype=np.float64) * sample_rate_hz / fft_size
    fbank = np.zeros((num_filters, bin_freqs.size), dtype=np.float64)
    for i in range(num_filters):
        left, center, right = hz_points[i], hz_points[i + 1], hz_points[i + 2]
        up = (bin_freqs - left) / (center - left)
        down = (right - bin_freqs) / (right - center)
        fbank[i] = np.maximum(0.0, np.minimum(up, down))
    return fbank


def _dct2_ortho_matrix(num_ceps: int, num_inputs: int) -> np.ndarray:
    # Orthonormal DCT-II: c_j = a_j * sum_m E_m cos(pi j (m + 0.5) / M)
    m = np.arange(num_inputs, dtype=np.float64)
    j = np.arange(num_ceps, dtype=np.float64)[:, None]
    table = np.cos(np.pi * j * (m + 0.5) / num_inputs)
    table *= math.sqrt(2.0 / num_inputs)
    table[0] /= math.sqrt(2.0)
    return table


def frame_signal(samples: np.ndarray, cfg: MfccConfig) -> np.ndarray:
    """Cut a pre-emphasized signal into overlapping analysis frames."""
    samples = np.asarray(samples, dtype=np.float64)
    n = num_frames_for(samples.size, cfg)
    win, shift = cfg.window_samples, cfg.shift_samples
    idx = np.arange(win)[None, :] + shift * np.arange(n)[:, None]
    return samples[idx]


def extract_static_mfcc(samples, sample_rate_hz: int | None = None,
                        cfg: MfccConfig | None = None) -> FeatureSequence:
    """Static 20-coefficient MFCCs for a mono PCM signal.

    Parameters
    ----------
    samples : array
        Mono PCM samples, any float/int scale.
    sample_rate_hz : int, optional
        Overrides cfg.sample_rate_hz when given.
    cfg : MfccConfig, optional
        Pipeline knobs; defaults are the pinned configuration.
    """
    cfg = cfg or MfccConfig()
    if sample_rate_hz is not None and sample_rate_hz != cfg.sample_rate_hz:
        cfg = MfccConfig(
            sample_rate_hz=sample_rate_hz, window_ms=cfg.window_ms,
            shift_ms=cfg.shift_ms, num_ceps=cfg.num_ceps,
            num_mel_filters=cfg.num_mel_filters, fft_size=cfg.fft_size,
            pre_emphasis=cfg.pre_emphasis, log_floor=cfg.log_floor)
    if cfg.sample_rate_hz not in SUPPORTED_SAMPLE_RATES:
        raise UnsupportedSampleRate(
            f"sample rate {cfg.sample_rate_hz} not in {SUPPORTED_SAMPLE_RATES}")
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1:
        raise FeatureError("expected mono 1-d sample array")

    emphasized = np.empty_like(samples)
    emphasized[0] = samples[0]
    emphasized[1:] = samples[1:] - cfg.pre_emphasis * samples[:-1]

    frames = frame_signal(emphasized, cfg)
    frames = frames * np.hamming(cfg.window_samples)

    nfft = cfg.effective_fft_size
    spectrum = np.fft.rfft(frames, n=nfft, axis=1)
    power = spectrum.real ** 2 + spectrum.imag ** 2

    fbank = mel_filterbank(cfg.num_mel_filters, nfft, cfg.sample_rate_hz)
    energies = power @ fbank.T
    log_energies = np.log(np.maximum(energies, cfg.log_floor))

    dct = _dct2_ortho_matrix(cfg.num_ceps, cfg.num_mel_filters)
    ceps = log_energies @ dct.T
    return FeatureSequence(ceps, frame_shift_ms=int(round(cfg.shift_ms)),
                           source_kind="mfcc")


def compute_deltas(static: FeatureSequence, window: int = 2) -> FeatureSequence:
    """Append regression deltas and delta-deltas (output dim = 3x input).

    d_t = sum_{n=1..W} n (x_{t+n} - x_{t-n}) / (2 sum n^2), with edge
    frames replicated; delta-deltas apply the same kernel to the deltas.
    """
    if window < 1:
        raise FeatureError(f"delta window must be >= 1, got {window}")
    x = static.data.astype(np.float64)
    d1 = _delta(x, window)
    d2 = _delta(d1, window)
    out = np.concatenate([x, d1, d2], axis=1)
    return FeatureSequence(out, frame_shift_ms=static.frame_shift_ms,
                           source_kind=static.source_kind)


def _delta(x: np.ndarray, window: int) -> np.ndarray:
    padded = np.pad(x, ((window, window), (0, 0)), mode="edge")
    denom = 2.0 * sum(n * n for n in range(1, window + 1))
    acc = np.zeros_like(x)
    t = np.arange(x.shape[0]) + window
    for n in range(1, window + 1):
        acc += n * (padded[t + n] - padded[t - n])
    return acc / denom


def extract_mfcc(samples, sample_rate_hz: int | None = None,
                 cfg: MfccConfig | None = None,
                 delta_window: int = 2) -> FeatureSequence:
    """Full 60-dimensional MFCC+delta+delta-delta features for a signal."""
    static = extract_static_mfcc(samples, sample_rate_hz=sample_rate_hz, cfg=cfg)
    return compute_deltas(static, window=delta_window)


def slice_with_context(utt: FeatureSequence, start_s: float,
                       end_s: float) -> FeatureSequence:
    """Frames [floor(start/shift), ceil(end/shift)) of an utterance sequence.

    The rounding never drops audible content of the word; the interval is
    clamped to the utterance and must stay non-empty.
    """
    if not 0 <= start_s < end_s:
        raise FeatureError(f"need 0 <= start_s < end_s, got {start_s}/{end_s}")
    shift_ms = float(utt.frame_shift_ms)
    first = math.floor(start_s * 1000.0 / shift_ms + _BOUNDARY_EPS)
    last = math.ceil(end_s * 1000.0 / shift_ms - _BOUNDARY_EPS)
    first = max(0, min(first, utt.num_frames))
    last = max(0, min(last, utt.num_frames))
    if last <= first:
        raise EmptySlice(
            f"[{start_s}, {end_s}) s maps to empty frame range "
            f"[{first}, {last}) of {utt.num_frames} frames")
    return FeatureSequence(utt.data[first:last],
                           frame_shift_ms=utt.frame_shift_ms,
                           source_kind=utt.source_kind)


def write_feature_file(seq: FeatureSequence, path) -> None:
    """Write the little-endian AWEF binary format.

    Layout: magic "AWEF", u16 version=1, u16 frame_shift_ms, u32 dim,
    u32 num_frames, u8 source_kind (0=mfcc, 1=ssl), 7 reserved bytes,
    then num_frames x dim float32 row-major.
    """
    header = _AWEF_HEADER.pack(
        AWEF_MAGIC, AWEF_VERSION, seq.frame_shift_ms, seq.dim,
        seq.num_frames, SOURCE_KINDS.index(seq.source_kind), b"\x00" * 7)
    data = np.ascontiguousarray(seq.data, dtype="<f4")
    with open(path, "wb") as f:
        f.write(header)
        f.write(data.tobytes())


def read_feature_file(path) -> FeatureSequence:
    """Read an AWEF file; lossless round-trip with `write_feature_file`."""
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _AWEF_HEADER.size:
        if raw[:4] != AWEF_MAGIC:
            raise BadMagic(f"{path}: not an AWEF file")
        raise TruncatedFile(f"{path}: header truncated at {len(raw)} bytes")
    magic, version, shift_ms, dim, num_frames, kind, _ = _AWEF_HEADER.unpack(
        raw[:_AWEF_HEADER.size])
    if magic != AWEF_MAGIC:
        raise BadMagic(f"{path}: bad magic {magic!r}")
    if version != AWEF_VERSION:
        raise VersionMismatch(f"{path}: version {version}, expected {AWEF_VERSION}")
    if kind >= len(SOURCE_KINDS):
        raise FeatureFileError(f"{path}: unknown source_kind {kind}")
    expected = num_frames * dim * 4
    payload = raw[_AWEF_HEADER.size:]
    if len(payload) < expected:
        raise TruncatedFile(
            f"{path}: expected {expected} data bytes, got {len(payload)}")
    data = np.frombuffer(payload[:expected], dtype="<f4").reshape(num_frames, dim)
    return FeatureSequence(data.copy(), frame_shift_ms=shift_ms,
                           source_kind=SOURCE_KINDS[kind])


def read_wav(path) -> tuple[np.ndarray, int]:
    """Read a mono PCM WAV file as float64 samples in [-1, 1]."""
    with wave.open(str(path), "rb") as w:
        channels = w.getnchannels()
        width = w.getsampwidth()
        rate = w.getframerate()
        raw = w.readframes(w.getnframes())
    if width == 2:
        samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    elif width == 4:
        samples = np.frombuffer(raw, dtype="<i4").astype(np.float64) / 2147483648.0
    elif width == 1:
        samples = (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    else:
        raise FeatureError(f"{path}: unsupported sample width {width}")
    if channels > 1:
        samples = samples.reshape(-1, channels).mean(axis=1)
    return samples, rate


def write_wav(path, samples, sample_rate_hz: int) -> None:
    """Write float samples in [-1, 1] as 16-bit mono PCM."""
    clipped = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    pcm = (clipped * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(sample_rate_hz)
        w.writeframes(pcm.tobytes())


class FeatureStore:
    """Lookup of per-instance feature sequences by instance_id."""

    def get(self, instance_id: str) -> FeatureSequence:
        raise NotImplementedError


class MissingFeature(KeyError):
    def __init__(self, instance_id):
        super().__init__(instance_id)
        self.instance_id = instance_id

    def __str__(self):
        return f"no features for instance {self.instance_id!r}"


class MemoryFeatureStore(FeatureStore):
    def __init__(self, mapping: dict[str, FeatureSequence] | None = None):
        self._mapping = dict(mapping or {})

    def put(self, instance_id: str, seq: FeatureSequence) -> None:
        self._mapping[instance_id] = seq

    def get(self, instance_id: str) -> FeatureSequence:
        try:
            return self._mapping[instance_id]
        except KeyError:
            raise MissingFeature(instance_id) from None

    def __len__(self):
        return len(self._mapping)


class DirFeatureStore(FeatureStore):
    """Feature files laid out as <root>/<instance_id>.awef."""

    def __init__(self, root):
        self.root = Path(root)
        self._cache: dict[str, FeatureSequence] = {}

    def path_for(self, instance_id: str) -> Path:
        return self.root / f"{instance_id}.awef"

    def put(self, instance_id: str, seq: FeatureSequence) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        write_feature_file(seq, self.path_for(instance_id))

    def get(self, instance_id: str) -> FeatureSequence:
        if instance_id not in self._cache:
            path = self.path_for(instance_id)
            if not path.exists():
                raise MissingFeature(instance_id)
            self._cache[instance_id] = read_feature_file(path)
        return self._cache[instance_id]


class PathFeatureStore(FeatureStore):
    """Explicit instance_id -> feature file mapping (precomputed files)."""

    def __init__(self, paths: dict[str, Path]):
        self._paths = {k: Path(v) for k, v in paths.items()}
        self._cache: dict[str, FeatureSequence] = {}

    def get(self, instance_id: str) -> FeatureSequence:
        if instance_id not in self._cache:
            path = self._paths.get(instance_id)
            if path is None or not path.exists():
                raise MissingFeature(instance_id)
            self._cache[instance_id] = read_feature_file(path)
        return self._cache[instance_id]
