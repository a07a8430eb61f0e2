import json
import subprocess
import sys
from importlib import resources

import pytest

from assocmine.cli import main
from synth import write_corpus_csv, zipf_token_lists


@pytest.fixture
def small_csv(tmp_path):
    p = tmp_path / "corpus.csv"
    p.write_text(
        "No,BAB,Hadist,Len\n"
        '1,1,"Beriman dan shalatlah!",22\n'
        '2,1,"Shalat malam 2 rakaat.",22\n'
        '3,2,"Shalat dua rakaat, lalu shalat witir.",36\n'
        '4,2,"Rasulullah membaca ayat.",24\n',
        encoding="utf-8",
    )
    return p


@pytest.fixture
def synth_csv(tmp_path):
    p = tmp_path / "synth.csv"
    write_corpus_csv(p, zipf_token_lists(300, 400, seed=1))
    return p


def test_preprocess_dump(small_csv, tmp_path):
    out = tmp_path / "tokens.jsonl"
    assert main(["preprocess", "--input", str(small_csv), "--dump-tokens", str(out), "-q"]) == 0
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(rows) == 4
    assert rows[0] == {"row_id": 1, "tokens": ["iman", "shalat"]}


def test_preprocess_without_stopwords_or_stemming(small_csv, capsys):
    assert main(["preprocess", "--input", str(small_csv), "--stemmer", "none", "--no-stopwords", "-q"]) == 0
    rows = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert rows[0]["tokens"] == ["beriman", "dan", "shalatlah"]
    assert rows[1]["tokens"] == ["shalat", "malam", "rakaat"]


def test_mine_outputs(synth_csv, tmp_path):
    out = tmp_path / "rules.csv"
    items = tmp_path / "items.csv"
    rc = main(["mine", "--input", str(synth_csv), "--min-support", "0.05", "--top", "10",
               "--out", str(out), "--dump-itemsets", str(items), "-q"])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "no,antecedents,consequents,antecedent_support,consequent_support,support,confidence,lift"
    assert len(lines) == 11
    assert items.read_text().startswith("size,items,count,rel_support\n")
    manifest = json.loads((tmp_path / "rules.csv.manifest.json").read_text())
    assert manifest["n"] == 300 and manifest["v"] > 0
    assert manifest["config"]["min_support"] == 0.05
    assert manifest["pipeline"]["stemmer_version"].startswith("affix_strip/")
    assert manifest["rules"] == 10


def test_manifest_reruns_identically(synth_csv, tmp_path):
    a = tmp_path / "a.csv"
    assert main(["mine", "--input", str(synth_csv), "--min-support", "0.04", "--min-lift", "1.2",
                 "--out", str(a), "-q"]) == 0
    b = tmp_path / "b.csv"
    assert main(["mine", "--config", f"{a}.manifest.json", "--out", str(b), "--manifest", str(tmp_path / "m.json"), "-q"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_flags_override_config(synth_csv, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"input": str(synth_csv), "min_support": 0.5}))
    out = tmp_path / "r.csv"
    assert main(["mine", "--config", str(cfg), "--min-support", "0.05", "--out", str(out), "-q"]) == 0
    assert json.loads((tmp_path / "r.csv.manifest.json").read_text())["config"]["min_support"] == 0.05


def test_same_run_twice_is_byte_identical(synth_csv, tmp_path):
    outs = []
    for name in ("x.csv", "y.csv"):
        p = tmp_path / name
        assert main(["mine", "--input", str(synth_csv), "--min-support", "0.05", "--out", str(p), "-q"]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_table_output(small_csv, capsys):
    assert main(["mine", "--input", str(small_csv), "--min-support", "0.5", "--out-format", "table", "-q"]) == 0
    out = capsys.readouterr().out
    assert "Antecedents" in out and "rakaat" in out


def test_empty_corpus(tmp_path, capsys):
    p = tmp_path / "empty.csv"
    p.write_text("No,BAB,Hadist\n1,1,\n", encoding="utf-8")
    out = tmp_path / "r.csv"
    assert main(["mine", "--input", str(p), "--skip-invalid", "--out", str(out), "-q"]) == 1
    assert "empty corpus" in capsys.readouterr().err
    assert list(tmp_path.iterdir()) == [p]


def test_exit_codes(small_csv, tmp_path):
    assert main(["mine", "--input", str(tmp_path / "missing.csv"), "-q"]) == 2
    assert main(["mine", "--input", str(small_csv), "--min-support", "0", "-q"]) == 1
    assert main(["mine", "--input", str(small_csv), "--col-text", "Body", "-q"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["mine", "--min-support", "abc"])
    assert exc.value.code == 1


def test_failed_run_leaves_no_files(small_csv, tmp_path):
    out = tmp_path / "r.csv"
    rc = main(["mine", "--input", str(small_csv), "--out", str(out),
               "--dump-itemsets", str(tmp_path / "nodir" / "i.csv"), "-q"])
    assert rc == 2
    assert not out.exists()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["corpus.csv"]


def test_validate_table_bundled(capsys):
    assert main(["validate-table"]) == 0
    out = capsys.readouterr().out
    assert "row  10 ayat -> baca: expected consequent_support" in out
    assert out.count(": consistent") == 9


def fixture_text():
    return resources.files("assocmine").joinpath("data", "table2.csv").read_text(encoding="utf-8")


def test_validate_table_corrupted(tmp_path):
    lines = fixture_text().splitlines()
    cells = lines[2].split(",")
    cells[6] = f"{float(cells[6]) + 0.01:.6f}"
    lines[2] = ",".join(cells)
    p = tmp_path / "bad.csv"
    p.write_text("\n".join(lines) + "\n")
    assert main(["validate-table", str(p)]) == 1


def test_validate_table_tight_tolerance():
    assert main(["validate-table", "--tol", "1e-9"]) == 1


def test_validate_table_malformed(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("no,antecedents\n1,a\n")
    assert main(["validate-table", str(p)]) == 1


def test_module_entry_point(small_csv):
    res = subprocess.run([sys.executable, "-m", "assocmine", "validate-table"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "PASS" in res.stdout
