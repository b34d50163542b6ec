"""The `awe` command line: corpus tools, features, pairs, training, eval.

`awe run --config run.cfg` drives the whole pipeline. Stage outputs are
content-addressed by a hash of every semantically meaningful config field
(plus the upstream stage hash), so reruns with an unchanged config skip
all stages and changing one field invalidates only the stages that depend
on it.

Exit codes: 0 success, 2 configuration error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import analysis, corpus, features, pairs, samediff
from .corpus import load_manifest
from .features import (DirFeatureStore, PathFeatureStore, extract_mfcc,
                       read_feature_file, read_wav, slice_with_context)
from .model import (AweModelConfig, TrainConfig, build_model, embed_manifest,
                    load_checkpoint, save_checkpoint, train, write_train_log)
from .samediff import evaluate, format_report, read_embedding_file, write_embedding_file

ARCHS = ("cae", "ae", "mean-pool")
FEATURE_SOURCES = ("mfcc", "ssl-file")
CONTEXTS = ("with", "without", "none")


class ConfigError(ValueError):
    """Invalid run configuration; message carries the field path."""


class StageError(RuntimeError):
    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class RunConfig:
    train_manifest: Path
    dev_manifest: Path
    test_manifest: Path
    out_dir: Path
    feature_source: str = "mfcc"
    context: str = "none"
    arch: str = "cae"
    model: AweModelConfig = AweModelConfig()
    train: TrainConfig = TrainConfig()
    different_speakers_only: bool = False
    language: str = "und"

    def __post_init__(self):
        if self.feature_source not in FEATURE_SOURCES:
            raise ConfigError(
                f"[features] source: must be one of {FEATURE_SOURCES}, "
                f"got {self.feature_source!r}")
        if self.context not in CONTEXTS:
            raise ConfigError(
                f"[features] context: must be one of {CONTEXTS}, "
                f"got {self.context!r}")
        if self.arch not in ARCHS:
            raise ConfigError(
                f"[model] arch: must be one of {ARCHS}, got {self.arch!r}")


def _get(cfg: configparser.ConfigParser, section: str, key: str, cast,
         default):
    if not cfg.has_option(section, key):
        if default is _REQUIRED:
            raise ConfigError(f"[{section}] {key}: required")
        return default
    raw = cfg.get(section, key)
    try:
        if cast is bool:
            lowered = raw.strip().lower()
            if lowered in ("true", "yes", "1", "on"):
                return True
            if lowered in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        return cast(raw)
    except (TypeError, ValueError):
        raise ConfigError(
            f"[{section}] {key}: cannot parse {raw!r} as {cast.__name__}"
        ) from None


_REQUIRED = object()


def parse_run_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    cfg = configparser.ConfigParser()
    try:
        cfg.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None

    base = path.parent

    def path_of(key):
        return (base / Path(_get(cfg, "paths", key, str, _REQUIRED))
                ).resolve()

    try:
        model = AweModelConfig(
            input_dim=_get(cfg, "model", "input_dim", int, 60),
            enc_layers=_get(cfg, "model", "enc_layers", int, 4),
            bidirectional=_get(cfg, "model", "bidirectional", bool, True),
            hidden_dim=_get(cfg, "model", "hidden_dim", int, 256),
            embed_dim=_get(cfg, "model", "embed_dim", int, 128),
            dec_layers=_get(cfg, "model", "dec_layers", int, 4),
            dropout=_get(cfg, "model", "dropout", float, 0.2),
            language=_get(cfg, "eval", "language", str, "und"))
        train_cfg = TrainConfig(
            learning_rate=_get(cfg, "train", "learning_rate", float, 1e-4),
            batch_size=_get(cfg, "train", "batch_size", int, 256),
            max_epochs=_get(cfg, "train", "max_epochs", int, 30),
            seed=_get(cfg, "train", "seed", int, 0))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None

    run = RunConfig(
        train_manifest=path_of("train_manifest"),
        dev_manifest=path_of("dev_manifest"),
        test_manifest=path_of("test_manifest"),
        out_dir=(base / Path(_get(cfg, "paths", "out_dir", str, _REQUIRED))).resolve(),
        feature_source=_get(cfg, "features", "source", str, "mfcc"),
        context=_get(cfg, "features", "context", str, "none"),
        arch=_get(cfg, "model", "arch", str, "cae"),
        model=model,
        train=train_cfg,
        different_speakers_only=_get(cfg, "eval", "different_speakers_only",
                                     bool, False),
        language=_get(cfg, "eval", "language", str, "und"))
    for name in ("train_manifest", "dev_manifest", "test_manifest"):
        p = getattr(run, name)
        if not p.exists():
            raise ConfigError(f"[paths] {name}: no such file {p}")
    return run


def resolve_source(manifest_path: Path, source: str) -> Path:
    p = Path(source)
    return p if p.is_absolute() else (Path(manifest_path).parent / p)


# ---------------------------------------------------------------------------
# Pipeline stages
# ---------------------------------------------------------------------------

@dataclass
class RunOutcome:
    run_dir: Path
    stages_run: list[str]
    stages_skipped: list[str]
    reports: list[samediff.ApReport]
    summary_text: str


def _hash_of(*parts) -> str:
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, Path):
            h.update(part.read_bytes())
        else:
            h.update(json.dumps(part, sort_keys=True, default=str).encode())
        h.update(b"\x00")
    return h.hexdigest()


def _stage_current(run_dir: Path, stage: str, digest: str, outputs) -> bool:
    marker = run_dir / f"stage.{stage}.hash"
    if not marker.exists() or marker.read_text().strip() != digest:
        return False
    return all(Path(p).exists() for p in outputs)


def _mark_stage(run_dir: Path, stage: str, digest: str) -> None:
    (run_dir / f"stage.{stage}.hash").write_text(digest + "\n")


def _model_cfg_dict(cfg: RunConfig) -> dict:
    from dataclasses import asdict
    return asdict(cfg.model)


def _train_cfg_dict(cfg: RunConfig) -> dict:
    from dataclasses import asdict
    d = asdict(cfg.train)
    d["adam_betas"] = list(d["adam_betas"])
    return d


def run_pipeline(cfg: RunConfig, log=print) -> RunOutcome:
    """Execute features -> (train) -> embed -> eval with stage skipping."""
    run_dir = cfg.out_dir
    run_dir.mkdir(parents=True, exist_ok=True)
    stages_run: list[str] = []
    stages_skipped: list[str] = []

    manifests = {
        "train": load_manifest(cfg.train_manifest, split="train",
                               language=cfg.language),
        "dev": load_manifest(cfg.dev_manifest, split="dev",
                             language=cfg.language),
        "test": load_manifest(cfg.test_manifest, split="test",
                              language=cfg.language),
    }
    manifest_paths = {"train": cfg.train_manifest, "dev": cfg.dev_manifest,
                      "test": cfg.test_manifest}

    # features ---------------------------------------------------------
    stage = "features"
    feat_hash = _hash_of(
        {"source": cfg.feature_source, "context": cfg.context},
        cfg.train_manifest, cfg.dev_manifest, cfg.test_manifest)
    features_dir = run_dir / "features"
    stores: dict[str, features.FeatureStore] = {}
    if cfg.feature_source == "mfcc":
        outputs = [features_dir / split for split in manifests]
        if _stage_current(run_dir, stage, feat_hash, outputs):
            stages_skipped.append(stage)
            log(f"[{stage}] up to date, skipping")
        else:
            stages_run.append(stage)
            log(f"[{stage}] extracting word-level features")
            try:
                _extract_mfcc_features(manifests, manifest_paths, features_dir)
            except Exception as exc:
                raise StageError(stage, exc) from exc
            _mark_stage(run_dir, stage, feat_hash)
        for split in manifests:
            stores[split] = DirFeatureStore(features_dir / split)
    else:  # ssl-file: per-instance files already exist at instance sources
        if _stage_current(run_dir, stage, feat_hash, []):
            stages_skipped.append(stage)
            log(f"[{stage}] up to date, skipping")
        else:
            stages_run.append(stage)
            log(f"[{stage}] checking precomputed feature files")
            try:
                for split, manifest in manifests.items():
                    for inst in manifest:
                        p = resolve_source(manifest_paths[split], inst.source)
                        if not p.exists():
                            raise features.MissingFeature(inst.instance_id)
            except Exception as exc:
                raise StageError(stage, exc) from exc
            _mark_stage(run_dir, stage, feat_hash)
        for split, manifest in manifests.items():
            stores[split] = PathFeatureStore({
                inst.instance_id: resolve_source(manifest_paths[split],
                                                 inst.source)
                for inst in manifest})

    # train --------------------------------------------------------------
    checkpoint_path = run_dir / "model.awem"
    if cfg.arch == "mean-pool":
        train_hash = feat_hash  # no trained artifact to invalidate
    else:
        stage = "train"
        train_hash = _hash_of(feat_hash, {"arch": cfg.arch},
                              _model_cfg_dict(cfg), _train_cfg_dict(cfg))
        outputs = [checkpoint_path, run_dir / "train_log.csv"]
        if _stage_current(run_dir, stage, train_hash, outputs):
            stages_skipped.append(stage)
            log(f"[{stage}] up to date, skipping")
        else:
            stages_run.append(stage)
            log(f"[{stage}] training {cfg.arch} model")
            try:
                _train_stage(cfg, manifests, stores, checkpoint_path, run_dir)
            except Exception as exc:
                raise StageError(stage, exc) from exc
            _mark_stage(run_dir, stage, train_hash)

    # embed --------------------------------------------------------------
    stage = "embed"
    embed_hash = _hash_of(train_hash, {"arch": cfg.arch})
    test_emb_path = run_dir / "test.awee"
    prime_emb_path = run_dir / "test_prime.awee"
    outputs = [test_emb_path, prime_emb_path]
    if _stage_current(run_dir, stage, embed_hash, outputs):
        stages_skipped.append(stage)
        log(f"[{stage}] up to date, skipping")
    else:
        stages_run.append(stage)
        log(f"[{stage}] embedding test and test' sets")
        try:
            embedder = ("mean-pool" if cfg.arch == "mean-pool"
                        else load_checkpoint(checkpoint_path))
            test_prime = corpus.build_test_prime(manifests["train"],
                                                 manifests["test"])
            emb_test = embed_manifest(embedder, manifests["test"],
                                      stores["test"])
            emb_prime = embed_manifest(embedder, test_prime, stores["test"])
            write_embedding_file(emb_test, test_emb_path)
            write_embedding_file(emb_prime, prime_emb_path)
        except Exception as exc:
            raise StageError(stage, exc) from exc
        _mark_stage(run_dir, stage, embed_hash)

    # eval ----------------------------------------------------------------
    stage = "eval"
    eval_hash = _hash_of(embed_hash, {
        "different_speakers_only": cfg.different_speakers_only})
    summary_csv = run_dir / "summary.csv"
    summary_txt = run_dir / "summary.txt"
    outputs = [summary_csv, summary_txt]
    if _stage_current(run_dir, stage, eval_hash, outputs):
        stages_skipped.append(stage)
        log(f"[{stage}] up to date, skipping")
        reports = _reports_from_summary(summary_csv)
    else:
        stages_run.append(stage)
        log(f"[{stage}] computing same-different AP")
        try:
            reports = []
            for tag, emb_path in (("test", test_emb_path),
                                  ("test'", prime_emb_path)):
                emb = read_embedding_file(emb_path)
                reports.append(evaluate(
                    emb, set_tag=tag, language=cfg.language,
                    different_speakers_only=cfg.different_speakers_only))
            _write_summary(cfg, reports, summary_csv, summary_txt)
        except Exception as exc:
            raise StageError(stage, exc) from exc
        _mark_stage(run_dir, stage, eval_hash)

    summary_text = summary_txt.read_text()
    log(summary_text.rstrip())
    return RunOutcome(run_dir=run_dir, stages_run=stages_run,
                      stages_skipped=stages_skipped, reports=reports,
                      summary_text=summary_text)


def _extract_mfcc_features(manifests, manifest_paths, features_dir: Path):
    wav_cache: dict[Path, tuple] = {}
    for split, manifest in manifests.items():
        store = DirFeatureStore(features_dir / split)
        for inst in manifest:
            wav_path = resolve_source(manifest_paths[split], inst.source)
            if wav_path not in wav_cache:
                wav_cache[wav_path] = read_wav(wav_path)
            samples, rate = wav_cache[wav_path]
            lo = int(round(inst.start_s * rate))
            hi = int(round(inst.end_s * rate))
            seg = samples[lo:min(hi, samples.size)]
            store.put(inst.instance_id, extract_mfcc(seg, rate))


def _train_stage(cfg: RunConfig, manifests, stores, checkpoint_path: Path,
                 run_dir: Path):
    import torch
    torch.set_num_threads(1)  # keeps reruns bit-identical
    if cfg.arch == "cae":
        train_pairs = pairs.make_cae_pairs(manifests["train"],
                                           seed=cfg.train.seed)
    else:
        train_pairs = pairs.make_ae_pairs(manifests["train"])
    model = build_model(cfg.model, seed=cfg.train.seed)
    result = train(model, train_pairs, stores["train"], cfg.train,
                   manifests["dev"], dev_features=stores["dev"])
    save_checkpoint(result.model, checkpoint_path)
    write_train_log(result.log, run_dir / "train_log.csv")


def _summary_rows(cfg: RunConfig, reports):
    feat_name = "mfcc" if cfg.feature_source == "mfcc" else "ssl"
    for rep in reports:
        yield (cfg.arch, feat_name, cfg.context, rep.language, rep.set_tag,
               f"{rep.ap:.6f}")


def _write_summary(cfg: RunConfig, reports, summary_csv: Path,
                   summary_txt: Path):
    rows = list(_summary_rows(cfg, reports))
    header = ("method", "features", "context", "language", "set", "ap")
    with open(summary_csv, "w", encoding="utf-8") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(row) + "\n")
    widths = [max(len(header[i]), *(len(r[i]) for r in rows))
              for i in range(len(header))]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header))]
    for row in rows:
        lines.append("  ".join(v.ljust(widths[i]) for i, v in enumerate(row)))
    summary_txt.write_text("\n".join(lines) + "\n")


def _reports_from_summary(summary_csv: Path):
    reports = []
    lines = summary_csv.read_text().strip().splitlines()[1:]
    for line in lines:
        method, feat, context, language, set_tag, ap = line.split(",")
        reports.append(samediff.ApReport(
            ap=float(ap), num_pairs=0, num_positive_pairs=0,
            set_tag=set_tag, language=language,
            notes="reloaded from summary"))
    return reports


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_corpus(args) -> int:
    if args.action == "stats":
        m = load_manifest(args.manifest)
        s = corpus.stats(m)
        print(f"num_instances={s.num_instances}")
        print(f"num_unique_words={s.num_unique_words}")
        print(f"num_speakers={s.num_speakers}")
        print(f"total_duration_h={s.total_duration_h:.6f}")
    elif args.action == "filter":
        m = load_manifest(args.manifest)
        filtered = corpus.filter_instances(
            m, min_dur_s=args.min_dur, min_freq=args.min_freq,
            max_freq=args.max_freq)
        corpus.save_manifest(filtered, args.out)
        print(f"kept {len(filtered)} of {len(m)} instances -> {args.out}")
    elif args.action == "test-prime":
        train_m = load_manifest(args.train, split="train")
        test_m = load_manifest(args.test, split="test")
        prime = corpus.build_test_prime(train_m, test_m)
        corpus.save_manifest(prime, args.out)
        print(f"kept {len(prime)} of {len(test_m)} instances -> {args.out}")
    return 0


def _cmd_features(args) -> int:
    manifest = load_manifest(args.manifest)
    out_dir = Path(args.out_dir)
    store = DirFeatureStore(out_dir)
    if args.action == "mfcc":
        wav_cache: dict[Path, tuple] = {}
        for inst in manifest:
            wav_path = resolve_source(args.manifest, inst.source)
            if wav_path not in wav_cache:
                wav_cache[wav_path] = read_wav(wav_path)
            samples, rate = wav_cache[wav_path]
            lo = int(round(inst.start_s * rate))
            hi = int(round(inst.end_s * rate))
            store.put(inst.instance_id,
                      extract_mfcc(samples[lo:min(hi, samples.size)], rate))
    else:  # slice
        for inst in manifest:
            src = resolve_source(args.manifest, inst.source)
            seq = read_feature_file(src)
            if args.mode == "with-context":
                seq = slice_with_context(seq, inst.start_s, inst.end_s)
            store.put(inst.instance_id, seq)
    print(f"wrote {len(manifest)} feature files to {out_dir}")
    return 0


def _cmd_pairs(args) -> int:
    manifest = load_manifest(args.manifest)
    if args.kind == "cae":
        items = pairs.make_cae_pairs(manifest, seed=args.seed)
    elif args.kind == "ae":
        items = pairs.make_ae_pairs(manifest)
    else:
        items = pairs.enumerate_eval_pairs(manifest)
    if args.out:
        pairs.write_pair_list(items, args.out)
        n = (pairs.num_eval_pairs(len(manifest)) if args.kind == "eval"
             else len(items))
        print(f"wrote {n} pairs -> {args.out}")
    else:
        for p in items:
            if isinstance(p, pairs.TrainPair):
                print(f"{p.input_id}\t{p.target_id}")
            else:
                print(f"{p.id_a}\t{p.id_b}")
    return 0


def _cmd_train(args) -> int:
    cfg = parse_run_config(args.config)
    if args.arch:
        cfg = replace(cfg, arch=args.arch)
    if cfg.arch == "mean-pool":
        raise ConfigError("[model] arch: mean-pool requires no training")
    manifests = {
        "train": load_manifest(cfg.train_manifest, split="train",
                               language=cfg.language),
        "dev": load_manifest(cfg.dev_manifest, split="dev",
                             language=cfg.language)}
    store = DirFeatureStore(args.features_dir)
    stores = {"train": store, "dev": store}
    out = Path(args.out) if args.out else cfg.out_dir / "model.awem"
    out.parent.mkdir(parents=True, exist_ok=True)
    _train_stage(cfg, manifests, stores, out, out.parent)
    print(f"checkpoint -> {out}")
    return 0


def _cmd_embed(args) -> int:
    manifest = load_manifest(args.manifest)
    store = DirFeatureStore(args.features_dir)
    embedder = "mean-pool" if args.mean_pool else load_checkpoint(args.checkpoint)
    emb = embed_manifest(embedder, manifest, store)
    write_embedding_file(emb, args.out)
    print(f"embedded {len(emb)} instances (dim {emb.dim}) -> {args.out}")
    return 0


def _cmd_eval(args) -> int:
    emb = read_embedding_file(args.embeddings)
    set_tag = args.set_tag
    if args.test_prime_against:
        train_m = load_manifest(args.test_prime_against, split="train")
        vocab = train_m.vocabulary
        keep = [i for i, label in enumerate(emb.labels) if label not in vocab]
        emb = emb.subset(keep)
        set_tag = "test'"
    report = evaluate(
        emb, set_tag=set_tag, language=args.language,
        different_speakers_only=args.different_speakers_only,
        block_pairs=args.block_pairs)
    sys.stdout.write(format_report(report))
    return 0


def _cmd_analyze(args) -> int:
    emb = read_embedding_file(args.embeddings)
    if args.action == "anagrams":
        found = analysis.find_anagram_pairs(set(emb.labels))
        rows = analysis.anagram_report(emb, found)
        if args.out:
            analysis.write_anagram_report(rows, args.out)
            print(f"wrote {len(rows)} rows -> {args.out}")
        else:
            for row in rows:
                print(f"{row.word1},{row.word2},{row.distance:.4f},"
                      f"{row.description}")
    else:  # export
        words = analysis.export_labeled_embeddings(emb, args.top_k, args.out)
        print(f"exported {len(words)} words -> {args.out}")
    return 0


def _cmd_run(args) -> int:
    cfg = parse_run_config(args.config)
    run_pipeline(cfg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="awe", description="Acoustic word embedding toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corpus", help="manifest tools")
    ps = p.add_subparsers(dest="action", required=True)
    st = ps.add_parser("stats")
    st.add_argument("manifest")
    fl = ps.add_parser("filter")
    fl.add_argument("manifest")
    fl.add_argument("--out", required=True)
    fl.add_argument("--min-dur", type=float, default=0.5)
    fl.add_argument("--min-freq", type=int, default=5)
    fl.add_argument("--max-freq", type=int, default=50)
    tp = ps.add_parser("test-prime")
    tp.add_argument("--train", required=True)
    tp.add_argument("--test", required=True)
    tp.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_corpus)

    p = sub.add_parser("features", help="feature extraction and slicing")
    ps = p.add_subparsers(dest="action", required=True)
    mf = ps.add_parser("mfcc")
    mf.add_argument("--manifest", required=True)
    mf.add_argument("--out-dir", required=True)
    sl = ps.add_parser("slice")
    sl.add_argument("--manifest", required=True)
    sl.add_argument("--out-dir", required=True)
    sl.add_argument("--mode", choices=("with-context", "precut"),
                    default="with-context")
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("pairs", help="pair enumeration")
    p.add_argument("kind", choices=("cae", "ae", "eval"))
    p.add_argument("--manifest", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pairs)

    p = sub.add_parser("train", help="train a CAE/AE model")
    p.add_argument("--arch", choices=("cae", "ae"))
    p.add_argument("--features-dir", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("embed", help="embed a manifest")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--checkpoint")
    group.add_argument("--mean-pool", action="store_true")
    p.add_argument("--manifest", required=True)
    p.add_argument("--features-dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("eval", help="same-different AP")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--test-prime-against", metavar="TRAIN_MANIFEST")
    p.add_argument("--different-speakers-only", action="store_true")
    p.add_argument("--set-tag", default="test")
    p.add_argument("--language", default="und")
    p.add_argument("--block-pairs", type=int,
                   default=pairs.DEFAULT_BLOCK_PAIRS)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("analyze", help="anagram report / embedding export")
    ps = p.add_subparsers(dest="action", required=True)
    an = ps.add_parser("anagrams")
    an.add_argument("--embeddings", required=True)
    an.add_argument("--out")
    ex = ps.add_parser("export")
    ex.add_argument("--embeddings", required=True)
    ex.add_argument("--top-k", type=int, default=7)
    ex.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("run", help="run the full pipeline")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
