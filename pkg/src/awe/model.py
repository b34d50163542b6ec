"""CAE-RNN / AE-RNN encoder-decoder, training loop, and checkpointing.

The encoder is a multi-layer bidirectional GRU; its final hidden state
(forward and backward directions of the top layer, concatenated) passes
through a linear embedding head to give the fixed-dimensional acoustic
word embedding. The decoder is a multi-layer unidirectional GRU that
receives the embedding as its input at every time step, followed by a
linear output head back to the feature dimension. A bidirectional decoder
is ill-posed for stepwise generation, so the decoder runs forward only.

The per-pair loss is the sum over target frames of the squared Euclidean
distance between target and reconstruction; batches average the per-pair
losses. Padded frames are masked out and every sequence's encoder state
is taken at its true last frame.
"""

from __future__ import annotations

import copy
import json
import math
import random
import struct
from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn
from torch.nn.utils.rnn import pack_padded_sequence, pad_sequence

from .corpus import Manifest
from .features import FeatureSequence, FeatureStore
from .pairs import TrainPair
from .samediff import DimMismatch, EmbeddingSet, evaluate

AWEM_MAGIC = b"AWEM"
AWEM_VERSION = 1


class CheckpointError(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


class NonFiniteLoss(RuntimeError):
    pass


@dataclass(frozen=True)
class AweModelConfig:
    input_dim: int = 60
    enc_layers: int = 4
    bidirectional: bool = True
    hidden_dim: int = 256
    embed_dim: int = 128
    dec_layers: int = 4
    dropout: float = 0.2
    language: str = "und"

    def __post_init__(self):
        for name in ("input_dim", "enc_layers", "hidden_dim", "embed_dim",
                     "dec_layers"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout}")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    adam_betas: tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    batch_size: int = 256
    max_epochs: int = 30
    seed: int = 0
    bucket_mult: int = 8  # length-bucket chunk = bucket_mult * batch_size

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be >= 0")


class CaeRnn(nn.Module):
    """GRU encoder-decoder producing acoustic word embeddings."""

    def __init__(self, config: AweModelConfig):
        super().__init__()
        self.config = config
        dirs = 2 if config.bidirectional else 1
        self.encoder = nn.GRU(
            config.input_dim, config.hidden_dim, config.enc_layers,
            batch_first=True, bidirectional=config.bidirectional,
            dropout=config.dropout if config.enc_layers > 1 else 0.0)
        self.embed_head = nn.Linear(dirs * config.hidden_dim, config.embed_dim)
        self.decoder = nn.GRU(
            config.embed_dim, config.hidden_dim, config.dec_layers,
            batch_first=True,
            dropout=config.dropout if config.dec_layers > 1 else 0.0)
        self.out_head = nn.Linear(config.hidden_dim, config.input_dim)

    @property
    def num_directions(self) -> int:
        return 2 if self.config.bidirectional else 1

    def encode_batch(self, padded: torch.Tensor,
                     lengths: torch.Tensor) -> torch.Tensor:
        """Embed a padded (B, T, input_dim) batch with true lengths."""
        if padded.shape[-1] != self.config.input_dim:
            raise DimMismatch(
                f"input dim {padded.shape[-1]} != model input_dim "
                f"{self.config.input_dim}")
        packed = pack_padded_sequence(
            padded, lengths.cpu(), batch_first=True, enforce_sorted=False)
        _, h_n = self.encoder(packed)
        h_n = h_n.view(self.config.enc_layers, self.num_directions,
                       padded.shape[0], self.config.hidden_dim)
        state = torch.cat([h_n[-1, d] for d in range(self.num_directions)],
                          dim=1)
        return self.embed_head(state)

    def decode_batch(self, embeddings: torch.Tensor,
                     target_len: int) -> torch.Tensor:
        """Run the decoder for target_len steps, embedding fed each step."""
        inp = embeddings.unsqueeze(1).expand(-1, target_len, -1)
        out, _ = self.decoder(inp)
        return self.out_head(out)

    def forward(self, padded, lengths, target_len):
        return self.decode_batch(self.encode_batch(padded, lengths), target_len)


def build_model(config: AweModelConfig, seed: int = 0,
                dtype=torch.float32) -> CaeRnn:
    """Construct a model with seeded (uniform fan-in) initialization."""
    torch.manual_seed(seed)
    model = CaeRnn(config)
    if dtype is not torch.float32:
        model = model.to(dtype)
    return model


def _as_tensor(x, dtype=torch.float32) -> torch.Tensor:
    if isinstance(x, FeatureSequence):
        x = x.data
    return torch.as_tensor(np.asarray(x), dtype=dtype)


def encode(model: CaeRnn, x: FeatureSequence) -> np.ndarray:
    """Embedding of one feature sequence (inference mode, dropout off)."""
    if x.dim != model.config.input_dim:
        raise DimMismatch(
            f"feature dim {x.dim} != model input_dim {model.config.input_dim}")
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            dtype = next(model.parameters()).dtype
            padded = _as_tensor(x, dtype).unsqueeze(0)
            lengths = torch.tensor([x.num_frames])
            e = model.encode_batch(padded, lengths)
    finally:
        model.train(was_training)
    return e.squeeze(0).to(torch.float32).numpy()


def decode(model: CaeRnn, embedding, target_len: int,
           frame_shift_ms: int = 20) -> FeatureSequence:
    """Reconstruction of target_len frames from an embedding."""
    if target_len < 1:
        raise ValueError("target_len must be >= 1")
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            dtype = next(model.parameters()).dtype
            e = _as_tensor(embedding, dtype).reshape(1, -1)
            y = model.decode_batch(e, target_len).squeeze(0)
    finally:
        model.train(was_training)
    kind = "mfcc" if model.config.input_dim == 60 else "ssl"
    return FeatureSequence(y.to(torch.float32).numpy(),
                           frame_shift_ms=frame_shift_ms, source_kind=kind)


def reconstruction_loss(y, target) -> float:
    """Sum over frames of the squared frame-wise Euclidean distance."""
    y_arr = np.asarray(y.data if isinstance(y, FeatureSequence) else y,
                       dtype=np.float64)
    t_arr = np.asarray(
        target.data if isinstance(target, FeatureSequence) else target,
        dtype=np.float64)
    if y_arr.shape != t_arr.shape:
        raise ShapeMismatch(f"shapes differ: {y_arr.shape} vs {t_arr.shape}")
    diff = t_arr - y_arr
    return float(np.sum(diff * diff))


def masked_batch_loss(y: torch.Tensor, targets: torch.Tensor,
                      target_lengths: torch.Tensor) -> torch.Tensor:
    """Mean over pairs of the per-pair frame-sum loss, padding masked."""
    steps = torch.arange(y.shape[1], device=y.device)
    mask = (steps[None, :] < target_lengths[:, None]).to(y.dtype)
    sq = (targets - y) ** 2
    per_pair = (sq.sum(dim=2) * mask).sum(dim=1)
    return per_pair.mean()


def mean_pool(x: FeatureSequence) -> np.ndarray:
    """Training-free embedding: arithmetic mean over frames (dim kept)."""
    return x.data.astype(np.float64).mean(axis=0).astype(np.float32)


def embed_manifest(model_or_pooling, manifest: Manifest,
                   features: FeatureStore, batch_size: int = 64,
                   ) -> EmbeddingSet:
    """One labeled embedding per manifest instance, in manifest order.

    `model_or_pooling` is a CaeRnn, the string "mean-pool", or any
    callable mapping a FeatureSequence to a vector.
    """
    instances = manifest.instances
    seqs = [features.get(inst.instance_id) for inst in instances]
    if isinstance(model_or_pooling, CaeRnn):
        vectors = _encode_many(model_or_pooling, seqs, batch_size)
    else:
        fn = mean_pool if model_or_pooling == "mean-pool" else model_or_pooling
        if not callable(fn):
            raise ValueError(
                f"expected a CaeRnn, 'mean-pool', or callable, got "
                f"{model_or_pooling!r}")
        vectors = np.stack([np.asarray(fn(s), dtype=np.float32)
                            for s in seqs]) if seqs else np.empty((0, 0), np.float32)
    return EmbeddingSet(
        vectors=vectors,
        labels=tuple(inst.word for inst in instances),
        speakers=tuple(inst.speaker_id for inst in instances),
        ids=tuple(inst.instance_id for inst in instances))


def _encode_many(model: CaeRnn, seqs, batch_size: int) -> np.ndarray:
    if not seqs:
        return np.empty((0, model.config.embed_dim), dtype=np.float32)
    was_training = model.training
    model.eval()
    dtype = next(model.parameters()).dtype
    out = []
    try:
        with torch.no_grad():
            for lo in range(0, len(seqs), batch_size):
                chunk = seqs[lo:lo + batch_size]
                for s in chunk:
                    if s.dim != model.config.input_dim:
                        raise DimMismatch(
                            f"feature dim {s.dim} != model input_dim "
                            f"{model.config.input_dim}")
                tensors = [_as_tensor(s, dtype) for s in chunk]
                lengths = torch.tensor([t.shape[0] for t in tensors])
                padded = pad_sequence(tensors, batch_first=True)
                e = model.encode_batch(padded, lengths)
                out.append(e.to(torch.float32).numpy())
    finally:
        model.train(was_training)
    return np.concatenate(out, axis=0)


@dataclass(frozen=True)
class EpochLog:
    epoch: int
    loss: float
    dev_ap: float


@dataclass
class TrainResult:
    model: CaeRnn
    log: list[EpochLog]
    best_epoch: int | None


def write_train_log(log, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("epoch,loss,dev_ap\n")
        for entry in log:
            f.write(f"{entry.epoch},{entry.loss!r},{entry.dev_ap!r}\n")


def _make_batches(pairs: list[TrainPair], lengths: dict[str, int],
                  cfg: TrainConfig, rng: random.Random) -> list[list[TrainPair]]:
    shuffled = list(pairs)
    rng.shuffle(shuffled)
    chunk_size = cfg.batch_size * cfg.bucket_mult
    batches = []
    for lo in range(0, len(shuffled), chunk_size):
        chunk = shuffled[lo:lo + chunk_size]
        chunk.sort(key=lambda p: lengths[p.input_id], reverse=True)
        for b in range(0, len(chunk), cfg.batch_size):
            batches.append(chunk[b:b + cfg.batch_size])
    rng.shuffle(batches)
    return batches


def train(model: CaeRnn, pairs, features: FeatureStore, cfg: TrainConfig,
          dev: Manifest, dev_features: FeatureStore | None = None,
          ) -> TrainResult:
    """Train with Adam; keep the checkpoint with the best dev AP.

    Runs up to cfg.max_epochs epochs over the training pairs; after each
    epoch embeds the dev manifest and computes its same-different AP. The
    returned model carries the parameters of the highest-dev-AP epoch
    (ties resolved to the earliest one).
    """
    pairs = list(pairs)
    dev_features = dev_features or features
    torch.manual_seed(cfg.seed)
    rng = random.Random(cfg.seed)
    optimizer = torch.optim.Adam(
        model.parameters(), lr=cfg.learning_rate, betas=cfg.adam_betas,
        eps=cfg.adam_eps)

    dtype = next(model.parameters()).dtype
    tensor_cache: dict[str, torch.Tensor] = {}

    def lookup(instance_id: str) -> torch.Tensor:
        if instance_id not in tensor_cache:
            seq = features.get(instance_id)
            if seq.dim != model.config.input_dim:
                raise DimMismatch(
                    f"feature dim {seq.dim} != model input_dim "
                    f"{model.config.input_dim}")
            tensor_cache[instance_id] = _as_tensor(seq, dtype)
        return tensor_cache[instance_id]

    lengths = {}
    for p in pairs:
        for iid in (p.input_id, p.target_id):
            if iid not in lengths:
                lengths[iid] = lookup(iid).shape[0]

    log: list[EpochLog] = []
    best_ap = -math.inf
    best_epoch: int | None = None
    best_state = None

    for epoch in range(1, cfg.max_epochs + 1):
        model.train()
        batches = _make_batches(pairs, lengths, cfg, rng)
        total_loss = 0.0
        total_pairs = 0
        for step, batch in enumerate(batches):
            inputs = [lookup(p.input_id) for p in batch]
            targets = [lookup(p.target_id) for p in batch]
            in_lens = torch.tensor([t.shape[0] for t in inputs])
            tgt_lens = torch.tensor([t.shape[0] for t in targets])
            padded_in = pad_sequence(inputs, batch_first=True)
            padded_tgt = pad_sequence(targets, batch_first=True)

            optimizer.zero_grad()
            y = model(padded_in, in_lens, int(tgt_lens.max()))
            loss = masked_batch_loss(y, padded_tgt, tgt_lens)
            if not torch.isfinite(loss):
                raise NonFiniteLoss(
                    f"non-finite loss at epoch {epoch} step {step} "
                    f"(batch of {len(batch)} pairs)")
            loss.backward()
            optimizer.step()
            total_loss += float(loss.detach()) * len(batch)
            total_pairs += len(batch)

        epoch_loss = total_loss / max(total_pairs, 1)
        dev_emb = embed_manifest(model, dev, dev_features)
        dev_ap = evaluate(dev_emb, set_tag="dev").ap
        log.append(EpochLog(epoch=epoch, loss=epoch_loss, dev_ap=dev_ap))
        if dev_ap > best_ap:
            best_ap = dev_ap
            best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())

    if best_state is not None:
        model.load_state_dict(best_state)
    model.eval()
    return TrainResult(model=model, log=log, best_epoch=best_epoch)


def save_checkpoint(model: CaeRnn, path) -> None:
    """Binary checkpoint: magic "AWEM", version, config JSON, named tensors.

    Tensors are stored as u16-length-prefixed name, u8 ndim, u32 dims,
    then float32 little-endian data, in state_dict order.
    """
    config_raw = json.dumps(asdict(model.config), sort_keys=True).encode("utf-8")
    state = model.state_dict()
    with open(path, "wb") as f:
        f.write(AWEM_MAGIC)
        f.write(struct.pack("<HI", AWEM_VERSION, len(config_raw)))
        f.write(config_raw)
        f.write(struct.pack("<I", len(state)))
        for name, tensor in state.items():
            raw_name = name.encode("utf-8")
            arr = np.ascontiguousarray(
                tensor.detach().to(torch.float32).numpy(), dtype="<f4")
            f.write(struct.pack("<H", len(raw_name)))
            f.write(raw_name)
            f.write(struct.pack("<B", arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            f.write(arr.tobytes())


def load_checkpoint(path) -> CaeRnn:
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != AWEM_MAGIC:
        raise CheckpointError(f"{path}: not an AWEM checkpoint")
    version, config_len = struct.unpack_from("<HI", raw, 4)
    if version != AWEM_VERSION:
        raise CheckpointError(
            f"{path}: version {version}, expected {AWEM_VERSION}")
    off = 10
    try:
        config_dict = json.loads(raw[off:off + config_len].decode("utf-8"))
        off += config_len
        config = AweModelConfig(**{k: tuple(v) if isinstance(v, list) else v
                                   for k, v in config_dict.items()})
        (num_tensors,) = struct.unpack_from("<I", raw, off)
        off += 4
        state = {}
        for _ in range(num_tensors):
            (name_len,) = struct.unpack_from("<H", raw, off)
            off += 2
            name = raw[off:off + name_len].decode("utf-8")
            off += name_len
            (ndim,) = struct.unpack_from("<B", raw, off)
            off += 1
            shape = struct.unpack_from(f"<{ndim}I", raw, off)
            off += 4 * ndim
            count = int(np.prod(shape)) if ndim else 1
            arr = np.frombuffer(raw, dtype="<f4", count=count, offset=off)
            off += count * 4
            state[name] = torch.from_numpy(arr.reshape(shape).copy())
    except (struct.error, ValueError, TypeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: truncated or corrupt checkpoint") from exc
    model = CaeRnn(config)
    model.load_state_dict(state)
    model.eval()
    return model


def gradient_check(config: AweModelConfig, batch_lengths=((4, 3), (3, 5), (2, 2)),
                   step: float = 1e-5, seed: int = 0) -> dict[str, float]:
    """Compare autograd gradients of the batch loss to central differences.

    Builds a float64 model (dropout inactive: eval mode), a random batch
    of variable-length pairs, and perturbs every entry of every parameter
    tensor by +/-step. Returns, per parameter group, the max-norm relative
    error ||g_analytic - g_fd||_inf / max(||g_analytic||_inf, ||g_fd||_inf).
    """
    torch.manual_seed(seed)
    model = CaeRnn(config).double()
    model.eval()
    gen = np.random.default_rng(seed)
    inputs = [torch.as_tensor(gen.standard_normal((m, config.input_dim)))
              for m, _ in batch_lengths]
    targets = [torch.as_tensor(gen.standard_normal((n, config.input_dim)))
               for _, n in batch_lengths]
    in_lens = torch.tensor([t.shape[0] for t in inputs])
    tgt_lens = torch.tensor([t.shape[0] for t in targets])
    padded_in = pad_sequence(inputs, batch_first=True)
    padded_tgt = pad_sequence(targets, batch_first=True)

    def loss_value() -> float:
        with torch.no_grad():
            y = model(padded_in, in_lens, int(tgt_lens.max()))
            return float(masked_batch_loss(y, padded_tgt, tgt_lens))

    model.zero_grad()
    y = model(padded_in, in_lens, int(tgt_lens.max()))
    masked_batch_loss(y, padded_tgt, tgt_lens).backward()

    errors = {}
    for name, param in model.named_parameters():
        analytic = param.grad.detach().clone().reshape(-1)
        flat = param.data.reshape(-1)
        fd = torch.empty_like(analytic)
        for i in range(flat.numel()):
            orig = float(flat[i])
            flat[i] = orig + step
            up = loss_value()
            flat[i] = orig - step
            down = loss_value()
            flat[i] = orig
            fd[i] = (up - down) / (2.0 * step)
        scale = max(float(analytic.abs().max()), float(fd.abs().max()), 1e-12)
        errors[name] = float((analytic - fd).abs().max()) / scale
    return errors
