import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from awe.features import (AudioTooShort, BadMagic, EmptySlice, FeatureError,
                          FeatureSequence, MemoryFeatureStore, MfccConfig,
                          MissingFeature, TruncatedFile, UnsupportedSampleRate,
                          VersionMismatch, compute_deltas, extract_mfcc,
                          extract_static_mfcc, num_frames_for,
                          read_feature_file, read_wav, slice_with_context,
                          write_feature_file, write_wav)

import oracles

RATE = 16000


def tone(freq_hz, dur_s=1.0, rate=RATE, amp=0.5):
    t = np.arange(int(dur_s * rate)) / rate
    return amp * np.sin(2 * np.pi * freq_hz * t)


class TestFraming:
    def test_one_second_at_16k_gives_49_frames(self):
        feats = extract_mfcc(tone(440.0, 1.0), RATE)
        assert feats.data.shape == (49, 60)
        assert feats.frame_shift_ms == 20
        assert feats.source_kind == "mfcc"

    def test_frame_count_formula_examples(self):
        cfg = MfccConfig()
        assert num_frames_for(16000, cfg) == (16000 - 480) // 320 + 1
        assert num_frames_for(480, cfg) == 1
        assert num_frames_for(799, cfg) == 1
        assert num_frames_for(800, cfg) == 2

    @settings(max_examples=60, deadline=None)
    @given(st.integers(480, 80000))
    def test_frame_count_formula_property(self, num_samples):
        cfg = MfccConfig()
        rng = np.random.default_rng(num_samples)
        feats = extract_mfcc(rng.standard_normal(num_samples), RATE)
        expected = (num_samples - cfg.window_samples) // cfg.shift_samples + 1
        assert feats.num_frames == expected

    def test_too_short_audio(self):
        with pytest.raises(AudioTooShort):
            extract_mfcc(np.zeros(100), RATE)

    def test_unsupported_sample_rate(self):
        with pytest.raises(UnsupportedSampleRate):
            extract_mfcc(np.zeros(48000), 48000)


class TestMfccValues:
    def test_digital_silence_constant_coeffs(self):
        feats = extract_mfcc(np.zeros(8000), RATE)
        static = feats.data[:, :20]
        assert np.allclose(static, static[0], atol=0)
        assert np.max(np.abs(feats.data[:, 20:])) < 1e-9

    def test_tone_matches_reference(self):
        sig = tone(1000.0, 0.3)
        feats = extract_static_mfcc(sig, RATE)
        ref = oracles.reference_mfcc(sig, RATE)
        assert feats.data.shape == ref.shape
        assert np.max(np.abs(feats.data - ref)) < 1e-4

    def test_full_pipeline_matches_reference_on_noise(self):
        rng = np.random.default_rng(11)
        sig = rng.standard_normal(6400) * 0.2
        feats = extract_mfcc(sig, RATE)
        ref = oracles.reference_mfcc_full(sig, RATE)
        assert np.max(np.abs(feats.data - ref)) < 1e-4

    def test_deterministic_bit_identical(self):
        sig = tone(777.0, 0.5)
        a = extract_mfcc(sig, RATE)
        b = extract_mfcc(sig, RATE)
        assert a.data.tobytes() == b.data.tobytes()

    def test_config_invariants(self):
        with pytest.raises(FeatureError):
            MfccConfig(window_ms=10, shift_ms=20)
        with pytest.raises(FeatureError):
            MfccConfig(num_ceps=50, num_mel_filters=40)


class TestDeltas:
    def test_constant_sequence_zero_deltas(self):
        static = FeatureSequence(np.full((7, 20), 3.25), frame_shift_ms=20)
        out = compute_deltas(static)
        assert out.dim == 60
        assert np.max(np.abs(out.data[:, 20:])) == 0.0

    def test_linear_ramp(self):
        ramp = np.outer(np.arange(10, dtype=float), np.ones(20)) * 0.5
        out = compute_deltas(FeatureSequence(ramp, frame_shift_ms=20)).data
        # interior frames: constant slope, zero curvature
        assert np.allclose(out[2:-2, 20:40], 0.5, atol=1e-6)
        assert np.allclose(out[4:-4, 40:60], 0.0, atol=1e-6)

    def test_random_sequence_matches_brute_force(self):
        rng = np.random.default_rng(5)
        static = rng.standard_normal((5, 20))
        out = compute_deltas(FeatureSequence(static, frame_shift_ms=20)).data
        d1 = oracles.reference_delta(static)
        d2 = oracles.reference_delta(d1)
        assert np.allclose(out[:, 20:40], d1, atol=1e-6)
        assert np.allclose(out[:, 40:60], d2, atol=1e-6)

    def test_kernel_oddness_under_time_reversal(self):
        rng = np.random.default_rng(6)
        static = rng.standard_normal((9, 20)).astype(np.float32)
        fwd = compute_deltas(FeatureSequence(static, frame_shift_ms=20)).data
        rev = compute_deltas(
            FeatureSequence(static[::-1], frame_shift_ms=20)).data
        assert np.allclose(rev[::-1, 20:40], -fwd[:, 20:40], atol=1e-6)
        assert np.allclose(rev[::-1, 40:60], fwd[:, 40:60], atol=1e-6)

    def test_window_must_be_positive(self):
        static = FeatureSequence(np.zeros((3, 20)), frame_shift_ms=20)
        with pytest.raises(FeatureError):
            compute_deltas(static, window=0)


class TestSliceWithContext:
    def _utt(self, frames=100, dim=8):
        rng = np.random.default_rng(0)
        return FeatureSequence(rng.standard_normal((frames, dim)),
                               frame_shift_ms=20, source_kind="ssl")

    def test_full_span_identity(self):
        utt = self._utt(100)
        out = slice_with_context(utt, 0.0, 100 * 0.02)
        assert out.data.tobytes() == utt.data.tobytes()

    def test_interior_slice_arithmetic(self):
        out = slice_with_context(self._utt(100), 1.0, 1.5)
        assert out.num_frames == 25
        assert np.array_equal(out.data, self._utt(100).data[50:75])

    def test_end_clamped(self):
        out = slice_with_context(self._utt(100), 1.9, 5.0)
        assert out.num_frames == 100 - 95

    def test_fractional_boundaries_round_outward(self):
        out = slice_with_context(self._utt(100), 0.41, 0.59)
        # floor(20.5) = 20, ceil(29.5) = 30
        assert out.num_frames == 10

    def test_empty_slice_raises(self):
        with pytest.raises(EmptySlice):
            slice_with_context(self._utt(10), 5.0, 6.0)

    def test_bad_interval(self):
        with pytest.raises(FeatureError):
            slice_with_context(self._utt(10), 0.5, 0.5)

    def test_partition_reconstructs_sequence(self):
        utt = self._utt(60)
        rng = np.random.default_rng(3)
        cuts = sorted(rng.choice(np.arange(1, 60), size=4, replace=False))
        bounds = [0] + [int(c) for c in cuts] + [60]
        parts = [slice_with_context(utt, lo * 0.02, hi * 0.02)
                 for lo, hi in zip(bounds[:-1], bounds[1:])]
        rebuilt = np.concatenate([p.data for p in parts])
        assert np.array_equal(rebuilt, utt.data)


class TestFeatureFile:
    def test_round_trip_bit_identical(self, tmp_path):
        rng = np.random.default_rng(1)
        seq = FeatureSequence(rng.standard_normal((7, 60)).astype(np.float32),
                              frame_shift_ms=20, source_kind="mfcc")
        path = tmp_path / "x.awef"
        write_feature_file(seq, path)
        back = read_feature_file(path)
        assert back.data.tobytes() == seq.data.tobytes()
        assert back.frame_shift_ms == 20
        assert back.source_kind == "mfcc"

    def test_truncated_file(self, tmp_path):
        seq = FeatureSequence(np.zeros((5, 4), np.float32), frame_shift_ms=20)
        path = tmp_path / "x.awef"
        write_feature_file(seq, path)
        raw = path.read_bytes()
        path.write_bytes(raw[:len(raw) - 10])
        with pytest.raises(TruncatedFile):
            read_feature_file(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.awef"
        path.write_bytes(b"NOPE" + b"\x00" * 40)
        with pytest.raises(BadMagic):
            read_feature_file(path)

    def test_version_mismatch(self, tmp_path):
        seq = FeatureSequence(np.zeros((2, 3), np.float32), frame_shift_ms=20)
        path = tmp_path / "x.awef"
        write_feature_file(seq, path)
        raw = bytearray(path.read_bytes())
        raw[4] = 9  # little-endian u16 version
        path.write_bytes(bytes(raw))
        with pytest.raises(VersionMismatch):
            read_feature_file(path)

    def test_ssl_kind_round_trip(self, tmp_path):
        seq = FeatureSequence(np.ones((3, 768), np.float32),
                              frame_shift_ms=20, source_kind="ssl")
        path = tmp_path / "s.awef"
        write_feature_file(seq, path)
        assert read_feature_file(path).source_kind == "ssl"


class TestFeatureSequenceInvariants:
    def test_rejects_empty(self):
        with pytest.raises(FeatureError):
            FeatureSequence(np.zeros((0, 60)), frame_shift_ms=20)

    def test_rejects_non_finite(self):
        bad = np.zeros((2, 3))
        bad[1, 1] = np.nan
        with pytest.raises(FeatureError):
            FeatureSequence(bad, frame_shift_ms=20)

    def test_stored_as_float32(self):
        seq = FeatureSequence(np.zeros((2, 3), np.float64), frame_shift_ms=20)
        assert seq.data.dtype == np.float32


class TestWav:
    def test_wav_round_trip(self, tmp_path):
        sig = tone(300.0, 0.2)
        path = tmp_path / "t.wav"
        write_wav(path, sig, RATE)
        back, rate = read_wav(path)
        assert rate == RATE
        assert back.size == sig.size
        assert np.max(np.abs(back - sig)) < 1e-4  # 16-bit quantization


class TestStores:
    def test_memory_store_missing(self):
        store = MemoryFeatureStore()
        with pytest.raises(MissingFeature):
            store.get("nope")
