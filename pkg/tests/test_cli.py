import json

import numpy as np
import pytest

from sigscore.cli import build_parser, main
from sigscore.textures import save_pngs, texture_family


@pytest.fixture(scope="module")
def dirs(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    save_pngs(texture_family("blobs", 50, 16, seed=1), root / "orig")
    save_pngs(texture_family("checkers", 50, 16, seed=2), root / "synth")
    save_pngs(texture_family("blobs", 5, 16, seed=3), root / "small")
    (root / "empty").mkdir()
    return root


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_help_lists_every_flag(capsys):
    for cmd, flags in {"score": ["--original", "--synthetic", "--order", "--size", "--out",
                                 "--threads", "--skip-corrupt", "--column-mode", "--pretty"],
                       "stats": ["--alpha"],
                       "spectrum": ["--kind"],
                       "embed": ["--perplexity", "--seed", "--iterations", "--variance-target"],
                       "cluster": ["--k", "--seed"]}.items():
        with pytest.raises(SystemExit) as exc:
            main([cmd, "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for flag in flags:
            assert flag in text


def test_unknown_flag_aborts_before_io(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["score", "--original", str(tmp_path / "x"), "--synthetic", str(tmp_path / "y"),
              "--bogus"])
    assert exc.value.code == 2
    assert "--bogus" in capsys.readouterr().err


def test_invalid_config_is_usage_error(capsys, dirs):
    with pytest.raises(SystemExit) as exc:
        main(["score", "--original", str(dirs / "orig"), "--synthetic", str(dirs / "orig"),
              "--order", "0"])
    assert exc.value.code == 2


def test_score_identical_dirs(capsys, dirs):
    code, out, _ = run(capsys, "score", "--original", dirs / "orig", "--synthetic", dirs / "orig")
    assert code == 0
    doc = json.loads(out)
    assert [doc[k] for k in ("rmse_sig", "mae_sig", "rmse_logsig", "mae_logsig")] == [0, 0, 0, 0]
    assert doc["order"] == 3 and doc["preprocessing"]["size"] == 64
    assert doc["sample_counts"] == {"original": 50, "synthetic": 50}


def test_score_to_file_and_pretty(capsys, dirs, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "score", "--original", dirs / "orig", "--synthetic",
                          dirs / "synth", "--size", 16, "--order", 2, "--out", out)
    assert code == 0 and stdout == ""
    doc = json.loads(out.read_text())
    assert doc["rmse_sig"] > 0 and doc["dim"] == 16
    code, stdout, _ = run(capsys, "score", "--original", dirs / "orig", "--synthetic",
                          dirs / "synth", "--size", 16, "--order", 2, "--pretty")
    assert "RMSE Signature" in stdout


def test_threads_flag_does_not_change_output(capsys, dirs, monkeypatch):
    args = ["score", "--original", dirs / "orig", "--synthetic", dirs / "synth", "--size", 16]
    outs = [run(capsys, *args, "--threads", t)[1] for t in (1, 3, 0)]
    monkeypatch.setenv("SIGSCORE_THREADS", "2")
    outs.append(run(capsys, *args)[1])
    assert len(set(outs)) == 1


def test_stats_schema(capsys, dirs):
    code, out, _ = run(capsys, "stats", "--original", dirs / "orig", "--synthetic", dirs / "synth")
    assert code == 0
    doc = json.loads(out)
    for key in ("t1_levene", "t2_normality_synthetic", "t3_kruskal_wallis"):
        assert "p_value" in doc[key]
    assert len(doc["interpretation"]["prose"]) == 3


def test_stats_identical_accepts_t3(capsys, dirs):
    _, out, _ = run(capsys, "stats", "--original", dirs / "orig", "--synthetic", dirs / "orig")
    assert json.loads(out)["t3_kruskal_wallis"]["accept"] is True


def test_stats_too_small(capsys, dirs):
    code, _, err = run(capsys, "stats", "--original", dirs / "orig", "--synthetic",
                       dirs / "small")
    assert code != 0 and "T2" in err


def test_stats_constant_sets(capsys, tmp_path):
    save_pngs(np.full((20, 8, 8), 0.2), tmp_path / "a")
    save_pngs(np.full((20, 8, 8), 0.8), tmp_path / "b")
    code, out, _ = run(capsys, "stats", "--original", tmp_path / "a", "--synthetic", tmp_path / "b")
    assert code == 0
    assert json.loads(out)["t3_kruskal_wallis"]["accept"] is False
    code, _, err = run(capsys, "stats", "--original", tmp_path / "a", "--synthetic", tmp_path / "a")
    assert code == 1 and "identical" in err


def test_spectrum(capsys, dirs, tmp_path):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "spectrum", "--original", dirs / "orig", "--synthetic",
                     dirs / "synth", "--size", 8, "--out", out, "--kind", "log_signature")
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "index,original,synthetic" and len(lines) == 1 + 8 + 64 + 512


def test_embed_rows_and_determinism(capsys, dirs, tmp_path):
    outs = []
    for name in ("e1.csv", "e2.csv"):
        out = tmp_path / name
        code, _, _ = run(capsys, "embed", "--original", dirs / "orig", "--synthetic",
                         dirs / "synth", "--size", 16, "--iterations", 300, "--out", out)
        assert code == 0
        outs.append(out)
    lines = outs[0].read_text().splitlines()
    assert lines[0] == "id,x,y,label" and len(lines) == 101
    assert lines[1].startswith("original:") and lines[-1].endswith(",synthetic")
    assert outs[0].read_bytes() == outs[1].read_bytes()
    meta = json.loads((tmp_path / "e1.meta.json").read_text())
    assert meta["variance_explained"] >= 0.99 and meta["seed"] == 0
    assert (tmp_path / "e1.meta.json").read_bytes() == (tmp_path / "e2.meta.json").read_bytes()


def test_embed_perplexity_too_large(capsys, dirs, tmp_path):
    code, _, err = run(capsys, "embed", "--original", dirs / "small", "--synthetic",
                       dirs / "small", "--size", 8, "--out", tmp_path / "e.csv")
    assert code == 1 and "perplexity" in err


def test_cluster_k1_and_determinism(capsys, dirs, tmp_path):
    a, b = tmp_path / "c1.csv", tmp_path / "c2.csv"
    for out in (a, b):
        assert run(capsys, "cluster", "--original", dirs / "orig", "--synthetic", dirs / "synth",
                   "--size", 16, "--k", 1, "--out", out)[0] == 0
    rows = a.read_text().splitlines()[1:]
    assert len(rows) == 100 and {r.rsplit(",", 1)[1] for r in rows} == {"0"}
    assert a.read_bytes() == b.read_bytes()


def test_cluster_original_only(capsys, dirs, tmp_path):
    out = tmp_path / "c.csv"
    assert run(capsys, "cluster", "--original", dirs / "orig", "--size", 16, "--k", 3,
               "--out", out)[0] == 0
    labels = {r.rsplit(",", 1)[1] for r in out.read_text().splitlines()[1:]}
    assert labels <= {"0", "1", "2"}


def test_empty_directory(capsys, dirs):
    code, _, err = run(capsys, "score", "--original", dirs / "empty", "--synthetic", dirs / "orig")
    assert code != 0 and "no readable" in err


def test_missing_directory(capsys, dirs, tmp_path):
    code, _, err = run(capsys, "score", "--original", tmp_path / "gone", "--synthetic",
                       dirs / "orig")
    assert code == 1 and "gone" in err


def test_parser_defaults():
    ns = build_parser().parse_args(["embed", "--original", "a", "--synthetic", "b", "--out", "o"])
    assert (ns.perplexity, ns.seed, ns.size, ns.iterations) == (30.0, 0, 64, 1000)
