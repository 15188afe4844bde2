import json

import pytest

from kgfuse import cli
from kgfuse.cli import main


@pytest.fixture
def workdir(tmp_path):
    """A directory populated with every input file the CLI needs."""
    kg = tmp_path / "kg.tsv"
    kg.write_text(
        "# seed graph\n"
        "alice\thired\tbob\n"
        "carol\thired\tdana\n"
        "alice\tmet\tcarol\n"
        "bob\tmet\tdana\n"
        "erin\thired\tfrank\n"
    )
    schema = tmp_path / "schema.txt"
    schema.write_text("entities: PER\ntriggers: Act\n")
    corpus = tmp_path / "corpus.conll"
    lines = []
    for a, verb, b in [("alice", "hired", "bob"), ("carol", "hired", "dana"),
                       ("bob", "met", "erin"), ("dana", "met", "frank"),
                       ("erin", "hired", "alice"), ("frank", "met", "carol")]:
        lines += [f"{a}\tB-PER", f"{verb}\tB-TRG:Act", f"{b}\tB-PER", ""]
    corpus.write_text("\n".join(lines))
    cands = tmp_path / "cands.tsv"
    cands.write_text(
        "# head, trigger mention, trigger type, tail\n"
        "alice\thired\tAct\tdana\n"
        "bob\tmet\tAct\tcarol\n"
    )
    return tmp_path


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


class TestUsageErrors:
    def test_no_subcommand_exits_one(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 1

    def test_unknown_subcommand_exits_one(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1

    def test_missing_required_flag_exits_one(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["train-kge", "--out", "x.npz"])
        assert exc.value.code == 1
        assert "error" in capsys.readouterr().err


class TestDataErrors:
    def test_missing_kg_file_exits_two(self, workdir, capsys):
        code = main(["train-kge", "--kg", str(workdir / "nope.tsv"),
                     "--out", str(workdir / "m.npz")])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_malformed_kg_exits_two(self, workdir, capsys):
        bad = workdir / "bad.tsv"
        bad.write_text("only\ttwo\n")
        code = main(["train-kge", "--kg", str(bad),
                     "--out", str(workdir / "m.npz")])
        assert code == 2
        assert "bad.tsv:1" in capsys.readouterr().err

    def test_malformed_candidates_exit_two(self, workdir, capsys):
        bad = workdir / "badcands.tsv"
        bad.write_text("a\thired\tAct\tb\nx\ty\n")
        code = main(["align", "--kg", str(workdir / "kg.tsv"),
                     "--candidates", str(bad)])
        assert code == 2
        assert ":2:" in capsys.readouterr().err

    def test_candidate_with_equal_head_tail_exits_two(self, workdir, capsys):
        bad = workdir / "badcands.tsv"
        bad.write_text("a\thired\tAct\ta\n")
        code = main(["align", "--kg", str(workdir / "kg.tsv"),
                     "--candidates", str(bad)])
        assert code == 2


class TestNumericErrors:
    def test_nonfinite_gradcheck_exits_three(self, monkeypatch, capsys):
        monkeypatch.setattr(cli, "grad_check",
                            lambda *a, **kw: float("nan"))
        code = main(["gradcheck"])
        assert code == 3
        assert "numeric" in capsys.readouterr().err


class TestGradcheck:
    def test_reports_tiny_error(self, capsys):
        assert main(["gradcheck", "--dim", "6", "--kernels", "2",
                     "--batch", "4"]) == 0
        err = float(capsys.readouterr().out.strip())
        assert err < 1e-4


class TestKgePipeline:
    def test_train_eval_cycle(self, workdir, capsys):
        model = workdir / "model.npz"
        pools = workdir / "pools.json"
        code = main(["train-kge", "--kg", str(workdir / "kg.tsv"),
                     "--dim", "8", "--kernels", "2", "--epochs", "3",
                     "--out", str(model)])
        assert code == 0
        doc = _json_out(capsys)
        assert model.exists()
        assert doc["model"] == str(model)
        assert isinstance(doc["final_loss"], float)

        code = main(["eval-kgf", "--model", str(model),
                     "--kg", str(workdir / "kg.tsv"),
                     "--pools", str(pools), "--pool-size", "10"])
        assert code == 0
        doc = _json_out(capsys)
        assert 0.0 < doc["mrr"] <= 1.0
        assert set(doc["hits"]) == {"10", "20", "30"}
        assert pools.exists()

    def test_eval_reuses_persisted_pools(self, workdir, capsys):
        model = workdir / "model.npz"
        pools = workdir / "pools.json"
        main(["train-kge", "--kg", str(workdir / "kg.tsv"), "--dim", "8",
              "--kernels", "2", "--epochs", "2", "--out", str(model)])
        capsys.readouterr()
        args = ["eval-kgf", "--model", str(model),
                "--kg", str(workdir / "kg.tsv"), "--pools", str(pools),
                "--pool-size", "10"]
        assert main(args) == 0
        first = capsys.readouterr().out
        saved = pools.read_text()
        assert main(args + ["--seed", "999"]) == 0  # seed ignored: file wins
        assert capsys.readouterr().out == first
        assert pools.read_text() == saved

    def test_unnormalized_flag_scales_mrr(self, workdir, capsys):
        model = workdir / "model.npz"
        pools = workdir / "pools.json"
        main(["train-kge", "--kg", str(workdir / "kg.tsv"), "--dim", "8",
              "--kernels", "2", "--epochs", "2", "--out", str(model)])
        capsys.readouterr()
        base = ["eval-kgf", "--model", str(model),
                "--kg", str(workdir / "kg.tsv"), "--pools", str(pools),
                "--pool-size", "10"]
        main(base)
        normalized = _json_out(capsys)["mrr"]
        main(base + ["--unnormalized"])
        raw = _json_out(capsys)["mrr"]
        assert raw == pytest.approx(5 * normalized)  # 5 positives in kg.tsv


class TestJeePipeline:
    def test_train_eval_cycle(self, workdir, capsys):
        model = workdir / "tagger.npz"
        code = main(["train-jee", "--corpus", str(workdir / "corpus.conll"),
                     "--schema", str(workdir / "schema.txt"),
                     "--dim", "8", "--epochs", "60", "--lr", "0.3",
                     "--out", str(model)])
        assert code == 0
        assert model.exists()
        capsys.readouterr()

        code = main(["eval-jee", "--model", str(model),
                     "--corpus", str(workdir / "corpus.conll"),
                     "--mode", "token"])
        assert code == 0
        doc = _json_out(capsys)
        assert set(doc) == {"precision", "recall", "f1"}
        assert doc["f1"] > 0.9  # tiny corpus is memorized

    def test_pairs_file_feeds_benchmark_supervision(self, workdir, capsys):
        pairs = workdir / "pairs.json"
        pairs.write_text(json.dumps({
            "positives": [["alice", "bob"], ["carol", "dana"]],
            "negatives": [["alice", "frank"]],
        }))
        model = workdir / "tagger.npz"
        code = main(["train-jee", "--corpus", str(workdir / "corpus.conll"),
                     "--schema", str(workdir / "schema.txt"),
                     "--dim", "8", "--epochs", "5", "--alpha", "0.5",
                     "--pairs", str(pairs), "--out", str(model)])
        assert code == 0
        assert model.exists()

    def test_eval_mode_flag_validated(self, workdir):
        with pytest.raises(SystemExit) as exc:
            main(["eval-jee", "--model", "x.npz", "--corpus", "y",
                  "--mode", "char"])
        assert exc.value.code == 1


class TestAlign:
    def test_emits_alignment_records(self, workdir, capsys):
        code = main(["align", "--kg", str(workdir / "kg.tsv"),
                     "--candidates", str(workdir / "cands.tsv"),
                     "--dim", "8", "--epsilon", "-1.0"])
        assert code == 0
        records = _json_out(capsys)
        keys = {tuple(r["from"]) for r in records}
        assert keys == {("hired", "Act"), ("met", "Act")}
        for r in records:
            assert r["to"] in {"hired", "met"}
            assert -1.0 <= r["score"] <= 1.0

    def test_shared_verb_token_aligns_to_itself(self, workdir, capsys):
        main(["align", "--kg", str(workdir / "kg.tsv"),
              "--candidates", str(workdir / "cands.tsv"),
              "--dim", "8", "--gamma", "1.0", "--epsilon", "-1.0"])
        records = _json_out(capsys)
        by_mention = {tuple(r["from"])[0]: r for r in records}
        assert by_mention["hired"]["to"] == "hired"
        assert by_mention["hired"]["score"] == pytest.approx(1.0)
        assert by_mention["met"]["to"] == "met"


class TestFuse:
    def _run(self, workdir, out, seed=0):
        return main(["fuse", "--kg", str(workdir / "kg.tsv"),
                     "--corpus", str(workdir / "corpus.conll"),
                     "--schema", str(workdir / "schema.txt"),
                     "--rounds", "2", "--top-k", "2",
                     "--k-benchmarks", "3", "--neg-budget", "6",
                     "--dim", "8", "--kernels", "2", "--epochs", "2",
                     "--seed", str(seed), "--out", str(out)])

    def test_writes_graph_and_report(self, workdir, capsys):
        out = workdir / "run"
        assert self._run(workdir, out) == 0
        summary = _json_out(capsys)
        assert summary["rounds"] == 2
        assert (out / "enriched_kg.tsv").exists()
        report = json.loads((out / "report.json").read_text())
        assert [r["round"] for r in report["rounds"]] == [1, 2]
        assert report["final_kg_path"] == "enriched_kg.tsv"
        assert summary["kg_size"] == report["rounds"][-1]["kg_size"]

    def test_reports_are_byte_identical_across_runs(self, workdir, capsys):
        out1, out2 = workdir / "r1", workdir / "r2"
        assert self._run(workdir, out1, seed=3) == 0
        assert self._run(workdir, out2, seed=3) == 0
        assert (out1 / "report.json").read_bytes() == \
            (out2 / "report.json").read_bytes()
        assert (out1 / "enriched_kg.tsv").read_bytes() == \
            (out2 / "enriched_kg.tsv").read_bytes()
