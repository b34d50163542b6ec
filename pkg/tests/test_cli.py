import numpy as np
import pytest

from awe.cli import ConfigError, main, parse_run_config, run_pipeline
from awe.corpus import load_manifest
from awe.features import read_feature_file, write_feature_file
from awe.samediff import read_embedding_file
from awe.synthetic import SyntheticConfig, make_corpus

from pipeline_fixtures import (build_audio_corpus, build_feature_corpus,
                               write_run_config)


@pytest.fixture(scope="module")
def audio_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("audio_corpus")
    return root, build_audio_corpus(root)


@pytest.fixture(scope="module")
def feature_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("feature_corpus")
    return root, build_feature_corpus(root)


class TestCorpusCommands:
    def test_stats(self, audio_corpus, capsys):
        _, manifests = audio_corpus
        assert main(["corpus", "stats", str(manifests["train"])]) == 0
        out = capsys.readouterr().out
        assert "num_instances=6" in out
        assert "num_speakers=2" in out

    def test_filter(self, audio_corpus, tmp_path, capsys):
        _, manifests = audio_corpus
        out_path = tmp_path / "filtered.csv"
        code = main(["corpus", "filter", str(manifests["train"]),
                     "--out", str(out_path), "--min-dur", "0.5",
                     "--min-freq", "1", "--max-freq", "50"])
        assert code == 0
        assert load_manifest(out_path, split="train").instances

    def test_test_prime(self, audio_corpus, tmp_path):
        _, manifests = audio_corpus
        out_path = tmp_path / "prime.csv"
        code = main(["corpus", "test-prime", "--train",
                     str(manifests["train"]), "--test",
                     str(manifests["test"]), "--out", str(out_path)])
        assert code == 0
        prime = load_manifest(out_path, split="test")
        assert prime.vocabulary == {"onlytest", "alsotest"}


class TestFeatureCommands:
    def test_mfcc_extraction(self, audio_corpus, tmp_path):
        _, manifests = audio_corpus
        out_dir = tmp_path / "feats"
        code = main(["features", "mfcc", "--manifest",
                     str(manifests["dev"]), "--out-dir", str(out_dir)])
        assert code == 0
        files = sorted(out_dir.glob("*.awef"))
        assert len(files) == 4
        seq = read_feature_file(files[0])
        assert seq.dim == 60
        assert seq.frame_shift_ms == 20

    def test_slice_modes(self, feature_corpus, tmp_path):
        root, manifests = feature_corpus
        out_pre = tmp_path / "precut"
        assert main(["features", "slice", "--manifest",
                     str(manifests["dev"]), "--out-dir", str(out_pre),
                     "--mode", "precut"]) == 0
        manifest = load_manifest(manifests["dev"], split="dev")
        inst = manifest.instances[0]
        original = read_feature_file(root / inst.source)
        sliced = read_feature_file(out_pre / f"{inst.instance_id}.awef")
        assert np.array_equal(original.data, sliced.data)

        out_ctx = tmp_path / "ctx"
        assert main(["features", "slice", "--manifest",
                     str(manifests["dev"]), "--out-dir", str(out_ctx),
                     "--mode", "with-context"]) == 0
        ctx = read_feature_file(out_ctx / f"{inst.instance_id}.awef")
        # synthetic sources span exactly the word, so the slice is identity
        assert ctx.num_frames == original.num_frames


class TestPairsCommand:
    def test_cae_to_file(self, feature_corpus, tmp_path):
        _, manifests = feature_corpus
        out = tmp_path / "pairs.tsv"
        assert main(["pairs", "cae", "--manifest", str(manifests["train"]),
                     "--seed", "3", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines
        assert all(len(line.split("\t")) == 2 for line in lines)

    def test_eval_to_stdout(self, feature_corpus, capsys):
        _, manifests = feature_corpus
        assert main(["pairs", "eval", "--manifest",
                     str(manifests["dev"])]) == 0
        lines = capsys.readouterr().out.splitlines()
        n = len(load_manifest(manifests["dev"], split="dev"))
        assert len(lines) == n * (n - 1) // 2


class TestTrainEmbedEval:
    def test_chain(self, feature_corpus, tmp_path, capsys):
        root, manifests = feature_corpus
        cfg_path = write_run_config(
            tmp_path / "run.cfg", manifests, tmp_path / "out",
            source="ssl-file", arch="cae", input_dim=12, epochs=2)
        feats_dir = tmp_path / "perword"
        # lay features out as <id>.awef for the train command
        for split in ("train", "dev", "test"):
            m = load_manifest(manifests[split], split=split)
            for inst in m:
                src = read_feature_file(root / inst.source)
                feats_dir.mkdir(exist_ok=True)
                write_feature_file(src, feats_dir / f"{inst.instance_id}.awef")

        ckpt = tmp_path / "model.awem"
        assert main(["train", "--arch", "cae", "--features-dir",
                     str(feats_dir), "--config", str(cfg_path),
                     "--out", str(ckpt)]) == 0
        assert ckpt.exists()

        emb_path = tmp_path / "test.awee"
        assert main(["embed", "--checkpoint", str(ckpt), "--manifest",
                     str(manifests["test"]), "--features-dir",
                     str(feats_dir), "--out", str(emb_path)]) == 0
        emb = read_embedding_file(emb_path)
        assert emb.dim == 8

        assert main(["eval", "--embeddings", str(emb_path),
                     "--language", "toy"]) == 0
        out = capsys.readouterr().out
        assert "ap=" in out
        assert "set_tag=test" in out

        assert main(["eval", "--embeddings", str(emb_path),
                     "--test-prime-against", str(manifests["train"])]) == 0
        out = capsys.readouterr().out
        assert "set_tag=test'" in out

    def test_mean_pool_embed(self, feature_corpus, tmp_path):
        root, manifests = feature_corpus
        feats_dir = tmp_path / "perword"
        m = load_manifest(manifests["dev"], split="dev")
        for inst in m:
            src = read_feature_file(root / inst.source)
            feats_dir.mkdir(exist_ok=True)
            write_feature_file(src, feats_dir / f"{inst.instance_id}.awef")
        emb_path = tmp_path / "dev.awee"
        assert main(["embed", "--mean-pool", "--manifest",
                     str(manifests["dev"]), "--features-dir",
                     str(feats_dir), "--out", str(emb_path)]) == 0
        assert read_embedding_file(emb_path).dim == 12


class TestAnalyzeCommand:
    def test_anagrams_and_export(self, tmp_path, capsys):
        from awe.samediff import EmbeddingSet, write_embedding_file
        rng = np.random.default_rng(0)
        rows = []
        for k in range(2):
            rows.append((f"n{k}", "no", f"s{k}", rng.standard_normal(4)))
            rows.append((f"o{k}", "on", f"s{k}", rng.standard_normal(4)))
        emb = EmbeddingSet(
            vectors=np.array([r[3] for r in rows], dtype=np.float32),
            labels=tuple(r[1] for r in rows),
            speakers=tuple(r[2] for r in rows),
            ids=tuple(r[0] for r in rows))
        emb_path = tmp_path / "e.awee"
        write_embedding_file(emb, emb_path)

        report = tmp_path / "anagrams.csv"
        assert main(["analyze", "anagrams", "--embeddings", str(emb_path),
                     "--out", str(report)]) == 0
        assert "no,on" in report.read_text()

        export = tmp_path / "export.csv"
        assert main(["analyze", "export", "--embeddings", str(emb_path),
                     "--top-k", "1", "--out", str(export)]) == 0
        lines = export.read_text().splitlines()
        assert lines[0].startswith("instance_id,word,v0")
        assert len(lines) == 3  # tie broken lexicographically -> "no"


class TestRunPipeline:
    def test_mfcc_cae_end_to_end_and_idempotence(self, audio_corpus,
                                                 tmp_path):
        _, manifests = audio_corpus
        out_dir = tmp_path / "run"
        cfg_path = write_run_config(tmp_path / "run.cfg", manifests, out_dir,
                                    source="mfcc", arch="cae", epochs=2)
        cfg = parse_run_config(cfg_path)
        outcome = run_pipeline(cfg, log=lambda *_: None)
        assert set(outcome.stages_run) == {"features", "train", "embed",
                                           "eval"}
        assert (out_dir / "model.awem").exists()
        assert (out_dir / "train_log.csv").exists()
        tags = [r.set_tag for r in outcome.reports]
        assert tags == ["test", "test'"]
        summary_before = (out_dir / "summary.csv").read_bytes()
        assert b"method,features,context,language,set,ap" in summary_before

        rerun = run_pipeline(cfg, log=lambda *_: None)
        assert rerun.stages_run == []
        assert set(rerun.stages_skipped) == {"features", "train", "embed",
                                             "eval"}
        assert (out_dir / "summary.csv").read_bytes() == summary_before

    def test_mean_pool_runs_without_training(self, feature_corpus, tmp_path):
        _, manifests = feature_corpus
        out_dir = tmp_path / "run"
        cfg_path = write_run_config(tmp_path / "run.cfg", manifests, out_dir,
                                    source="ssl-file", arch="mean-pool",
                                    input_dim=12)
        outcome = run_pipeline(parse_run_config(cfg_path),
                               log=lambda *_: None)
        assert "train" not in outcome.stages_run
        assert not (out_dir / "model.awem").exists()
        assert read_embedding_file(out_dir / "test.awee").dim == 12

    def test_changed_config_invalidates_dependent_stages(self, feature_corpus,
                                                         tmp_path):
        _, manifests = feature_corpus
        out_dir = tmp_path / "run"
        cfg1 = write_run_config(tmp_path / "a.cfg", manifests, out_dir,
                                source="ssl-file", arch="cae", input_dim=12,
                                epochs=1, seed=0)
        run_pipeline(parse_run_config(cfg1), log=lambda *_: None)
        cfg2 = write_run_config(tmp_path / "b.cfg", manifests, out_dir,
                                source="ssl-file", arch="cae", input_dim=12,
                                epochs=1, seed=5)
        outcome = run_pipeline(parse_run_config(cfg2), log=lambda *_: None)
        assert "features" in outcome.stages_skipped
        assert "train" in outcome.stages_run

    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("[paths]\nout_dir = x\n")
        assert main(["run", "--config", str(bad)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_bad_arch_rejected(self, audio_corpus, tmp_path):
        _, manifests = audio_corpus
        cfg_path = write_run_config(tmp_path / "run.cfg", manifests,
                                    tmp_path / "out", arch="transformer")
        with pytest.raises(ConfigError, match="arch"):
            parse_run_config(cfg_path)

    def test_stage_failure_exit_code(self, audio_corpus, tmp_path, capsys):
        root, manifests = audio_corpus
        # manifest referencing a missing wav fails the features stage
        broken = tmp_path / "train.csv"
        text = manifests["train"].read_text().replace("audio/", "gone/")
        broken.write_text(text)
        bad_manifests = dict(manifests, train=broken)
        cfg_path = write_run_config(tmp_path / "run.cfg", bad_manifests,
                                    tmp_path / "out")
        assert main(["run", "--config", str(cfg_path)]) == 3
        assert "stage" in capsys.readouterr().err
