import json

import pytest

from igact.main import EXIT_FALSIFIED, EXIT_INPUT, EXIT_OK, EXIT_RESOURCE, main, parse_word


def test_build_prints_counts(capsys):
    assert main(["--group", "cyclic:2", "build"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "216 elements, 25 idempotents" in out
    assert "P[2] = [0, 0, 1, 1]" in out


def test_build_writes_files(tmp_path):
    summary, dump = tmp_path / "summary.json", tmp_path / "dump.json"
    assert main(["--out", str(summary), "--dump", str(dump), "build"]) == EXIT_OK
    doc = json.loads(summary.read_text())
    assert doc["size"] == 216
    assert doc["rees"]["P"][2] == [0, 1, 0, 1]
    elements = json.loads(dump.read_text())["elements"]
    assert len(elements) == 216
    assert elements[0]["idempotent"] and elements[0]["rank"] == 1


def test_json_output_is_deterministic(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    main(["--out", str(first), "squares"])
    main(["--out", str(second), "squares"])
    assert first.read_bytes() == second.read_bytes()
    assert json.loads(first.read_text())["counts"]["singular"] == 96


def test_derive_equal_and_unequal(capsys, tmp_path):
    cert = tmp_path / "cert.json"
    assert main(["--out", str(cert), "derive", "e[1,2] e[2,2]", "e[1,2]"]) == EXIT_OK
    assert len(json.loads(cert.read_text())["steps"]) == 1
    assert main(["derive", "e[1,1]", "e[1,2]"]) == EXIT_FALSIFIED
    assert "unequal" in capsys.readouterr().out


def test_derive_inverse_words(capsys, z2):
    assert main(["derive", "e[1,1] e[3,2] e[1,1] e[1,2] e[3,1]", "e[1,1]"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("equal")
    cert = json.loads(out[out.index("{"):])
    assert cert["end"] == [z2.rees.e(1, 1)]
    assert len(cert["steps"]) >= 4


def test_derive_out_of_bounds_is_inconclusive(capsys):
    argv = ["--max-states", "3", "derive", "e[1,1] e[3,2] e[1,1]", "e[1,1] e[4,2] e[1,1] e[1,1]"]
    assert main(argv) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("not-found")
    assert "inconclusive" in out


def test_reduce(capsys, tmp_path):
    out = tmp_path / "trace.json"
    assert main(["--out", str(out), "reduce", "e[1,1] e[3,2] e[1,1]"]) == EXIT_OK
    assert json.loads(out.read_text())["result"] == 1
    assert "w_1" in capsys.readouterr().out


def test_verify_lemma(capsys):
    assert main(["verify", "lemma:inverse"]) == EXIT_OK
    assert "12/12" in capsys.readouterr().out


@pytest.mark.parametrize(
    "target, line",
    [
        ("lemma:3.5", "inverse: 12/12"),
        ("lemma:3.9", "homomorphism: 4/4"),
        ("lemma:3.7(i)", "row-equality:"),
        ("lemma:3.7ii", "column-equality:"),
    ],
)
def test_verify_numbered_lemma(capsys, target, line):
    assert main(["verify", target]) == EXIT_OK
    assert line in capsys.readouterr().out


@pytest.mark.slow
def test_verify_homomorphism_s3(capsys):
    assert main(["--group", "sym:3", "--rank", "3", "verify", "lemma:3.9"]) == EXIT_OK
    assert "homomorphism: 36/36 certificates verified of 36 instances" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "lemma:nonsense"],
        ["verify", "lemma:3.4"],
        ["verify", "lemma:"],
        ["verify", "sideways"],
        ["--rank", "2", "verify", "theorem"],
        ["--group", "cyclic:0", "build"],
        ["--group", "file:/no/such/file.json", "build"],
        ["reduce", "e[1,1] e[1,2]"],
        ["reduce", "e[9,1]"],
        ["derive", "x", "e[1,1]"],
        ["--rank", "2", "verify", "lemma:homomorphism"],
    ],
)
def test_input_errors_exit_2(argv):
    assert main(argv) == EXIT_INPUT


def test_resource_bound_exit_3():
    assert main(["--cap", "100", "build"]) == EXIT_RESOURCE
    assert main(["--group", "sym:9", "build"]) == EXIT_RESOURCE


def test_parse_word_accepts_raw_ids(z2):
    e11 = z2.rees.e(1, 1)
    assert parse_word(f"{e11}, e[1,2]", z2.rees) == (e11, z2.rees.e(1, 2))


def test_verify_theorem_writes_report(tmp_path, monkeypatch):
    from igact.config.config import Config

    monkeypatch.setattr(Config, "SAMPLE_WORDS", 20)
    monkeypatch.setattr(Config, "PERTURBATIONS", 5)
    assert main(["--out", str(tmp_path), "verify", "theorem"]) == EXIT_OK
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["verdict"] == "VERIFIED"
    assert report["counts"]["sampled_words"] == 20


def test_group_file_over_order_cap_exit_3(tmp_path, monkeypatch):
    from igact.config.config import Config

    path = tmp_path / "z3.json"
    path.write_text(json.dumps({"order": 3, "table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}))
    monkeypatch.setattr(Config, "GROUP_ORDER_CAP", 2)
    assert main(["--group", f"file:{path}", "build"]) == EXIT_RESOURCE
