import csv
import subprocess
import sys

import pytest

from smiscaling.cli import EXIT_CONFIG, EXIT_OK, EXIT_SERIES_FAILED, main


@pytest.fixture(scope="module")
def data(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    assert main(["synth", "--kind", "fgn", "--hurst", "0.7", "--length", "8192",
                 "--seed", "1", "--label", "fgn07", "--out", str(d)]) == EXIT_OK
    assert main(["synth", "--kind", "sinusoid_plus_noise", "--length", "4000",
                 "--seed", "2", "--label", "sine", "--out", str(d)]) == EXIT_OK
    (d / "bad.csv").write_text("date,close\n2020-01-01,1\n2020-01-02,-3\n")
    return d


def test_synth_to_stdout(capsys):
    assert main(["synth", "--kind", "white", "--length", "100", "--seed", "0"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("# kind=white")
    assert "date,close" in out
    assert len([l for l in out if l[:1].isdigit()]) == 101


def test_synth_rejects_bad_spec(capsys):
    assert main(["synth", "--kind", "fgn", "--hurst", "1.2"]) == EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


@pytest.mark.parametrize("cmd,product,needle", [
    ("returns", "fgn07_returns.csv", "returns"),
    ("dfa", "fgn07_dfa2.csv", "alpha ="),
    ("dma", "fgn07_cdma.csv", "H ="),
    ("wavelet", "fgn07_dog1.csv", "beta ="),
    ("tddma", "fgn07_tddma.csv", "<H> ="),
    ("cycles", "fgn07_cycles.csv", "periods"),
])
def test_single_step_commands(data, tmp_path, capsys, cmd, product, needle):
    code = main([cmd, "--input", str(data / "fgn07.csv"), "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert needle in capsys.readouterr().out
    assert (tmp_path / product).is_file()


def test_fit_command(data, tmp_path, capsys):
    main(["dfa", "--input", str(data / "fgn07.csv"), "--out", str(tmp_path)])
    capsys.readouterr()
    code = main(["fit", "--input", str(tmp_path / "fgn07_dfa2.csv"),
                 "--fit-min", "10", "--fit-max", "500"])
    assert code == EXIT_OK
    value = float(capsys.readouterr().out.split("=")[1].split()[0])
    assert 0.65 <= value <= 0.75


def test_cycles_command_finds_the_sine(data, tmp_path, capsys):
    main(["cycles", "--input", str(data / "sine.csv"), "--out", str(tmp_path)])
    out = capsys.readouterr().out
    period = float(out.split("periods")[1].split(",")[0])
    assert 70 <= period <= 115


def test_report(data, tmp_path, capsys):
    code = main(["report", "--input", str(data / "fgn07.csv"), "--label", "FGN",
                 "--input", str(data / "bad.csv"), "--label", "BAD",
                 "--out", str(tmp_path)])
    assert code == EXIT_SERIES_FAILED
    table = capsys.readouterr().out
    assert table.splitlines()[0].startswith("SMI")
    assert "FAILED" in table and "positive" in table
    rows = {r["series"]: r for r in csv.DictReader(open(tmp_path / "report.csv"))}
    for key in ("alpha", "H", "mean_local_h", "beta_alpha"):
        assert 0.65 <= float(rows["FGN"][key]) <= 0.75
    assert rows["BAD"]["error"]
    assert (tmp_path / "FGN_dog10.csv").is_file()
    assert not (tmp_path / "BAD_dfa2.csv").exists()


def test_report_with_no_inputs(tmp_path, capsys):
    assert main(["report", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "report.txt").read_text().startswith("SMI")
    assert len((tmp_path / "report.csv").read_text().splitlines()) == 1


def test_label_count_mismatch(data, tmp_path):
    args = ["report", "--input", str(data / "fgn07.csv"), "--label", "A", "--label", "B",
            "--out", str(tmp_path)]
    assert main(args) == EXIT_CONFIG


def test_duplicate_labels(data, tmp_path):
    p = str(data / "fgn07.csv")
    assert main(["dfa", "--input", p, "--input", p, "--out", str(tmp_path)]) == EXIT_CONFIG


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "smiscaling", "--help"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "report" in res.stdout
