"""End-to-end command-line runs on a miniature scenario."""
import pytest

from fiberguide.cli import main
from fiberguide.harness import read_sweep_csv

TINY_CONFIG = """
[run]
n_trajectories = 10
master_seed = 7

[cloud]
center = 0 0 -150 um
sigma = 3 3 30 um

[integrator]
t_max = 90 ms
"""

SCENARIO_FILES = {
    "density.csv",
    "density.png",
    "flux.csv",
    "flux.png",
    "outcomes.csv",
    "summary.txt",
}


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY_CONFIG)
    return path


def _simulate(config_file, out_dir, *extra):
    return main(
        ["simulate", "--config", str(config_file), "--out", str(out_dir), *extra]
    )


def test_simulate_writes_report(config_file, tmp_path, capsys):
    out = tmp_path / "run"
    assert _simulate(config_file, out) == 0
    assert {p.name for p in out.iterdir()} == SCENARIO_FILES
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == len(SCENARIO_FILES)
    assert all(line.startswith("wrote ") for line in lines)


def test_simulate_worker_count_does_not_change_output(config_file, tmp_path):
    a = tmp_path / "serial"
    b = tmp_path / "parallel"
    assert _simulate(config_file, a, "--workers", "1") == 0
    assert _simulate(config_file, b, "--workers", "4") == 0
    for name in ("flux.csv", "outcomes.csv", "density.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_simulate_seed_override_changes_the_run(config_file, tmp_path):
    a = tmp_path / "seed7"
    b = tmp_path / "seed8"
    assert _simulate(config_file, a) == 0
    assert _simulate(config_file, b, "--seed", "8") == 0
    assert (a / "outcomes.csv").read_bytes() != (b / "outcomes.csv").read_bytes()


def test_sweep_writes_table_and_figure(config_file, tmp_path, capsys):
    out = tmp_path / "sweep"
    rc = main(
        [
            "sweep",
            "--config",
            str(config_file),
            "--depths",
            "4, 8.2",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    assert {p.name for p in out.iterdir()} == {"summary.txt", "sweep.csv", "sweep.png"}
    table = read_sweep_csv(out / "sweep.csv")
    assert table.depths.size == 2
    assert table.depths[0] < table.depths[1]
    capsys.readouterr()


def test_sweep_rejects_garbled_depth_list(config_file, tmp_path, capsys):
    rc = main(
        ["sweep", "--config", str(config_file), "--depths", "4, lots", "--out", str(tmp_path)]
    )
    assert rc == 1
    assert capsys.readouterr().err.startswith("error:")


def test_report_rerenders_saved_tables(config_file, tmp_path, capsys):
    out = tmp_path / "run"
    _simulate(config_file, out)
    for name in ("flux.png", "density.png", "summary.txt"):
        (out / name).unlink()
    capsys.readouterr()
    assert main(["report", "--input", str(out)]) == 0
    assert {p.name for p in out.iterdir()} == SCENARIO_FILES


def test_report_on_empty_directory_fails(tmp_path, capsys):
    rc = main(["report", "--input", str(tmp_path / "nothing_here")])
    assert rc == 1
    assert capsys.readouterr().err.startswith("error:")


def test_fit_recovers_power_law(tmp_path, capsys):
    csv_path = tmp_path / "toy.csv"
    rows = ["x,y"] + [f"{x},{2.0 * x**3}" for x in (1.0, 2.0, 3.0, 4.0)]
    csv_path.write_text("\n".join(rows) + "\n")
    assert main(["fit", "--input", str(csv_path), "--model", "power"]) == 0
    out = capsys.readouterr().out
    assert "model: power" in out
    fitted = {}
    for line in out.splitlines():
        if " = " in line and "+/-" in line:
            name, rest = line.split(" = ")
            fitted[name] = float(rest.split(" +/- ")[0])
    assert fitted["exponent"] == pytest.approx(3.0, rel=1e-9)
    assert fitted["amplitude"] == pytest.approx(2.0, rel=1e-9)


def test_fit_column_selection(tmp_path, capsys):
    csv_path = tmp_path / "toy.csv"
    csv_path.write_text("a,b,c\n1,9,2\n2,9,5\n3,9,8\n4,9,11\n")
    rc = main(
        [
            "fit",
            "--input",
            str(csv_path),
            "--model",
            "linear",
            "--xcol",
            "a",
            "--ycol",
            "c",
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    slope = [l for l in out.splitlines() if l.startswith("slope")][0]
    assert float(slope.split(" = ")[1].split(" +/- ")[0]) == pytest.approx(3.0)


def test_fit_unknown_column_fails(tmp_path, capsys):
    csv_path = tmp_path / "toy.csv"
    csv_path.write_text("x,y\n1,1\n2,2\n3,3\n")
    rc = main(["fit", "--input", str(csv_path), "--model", "linear", "--ycol", "zz"])
    assert rc == 1
    assert "no column 'zz'" in capsys.readouterr().err


def test_fit_missing_file_fails(tmp_path, capsys):
    rc = main(["fit", "--input", str(tmp_path / "absent.csv"), "--model", "linear"])
    assert rc == 1
    assert capsys.readouterr().err.startswith("error:")


def test_unknown_config_section_fails(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[rum]\nn_trajectories = 5\n")
    rc = main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")])
    assert rc == 1
    assert "unknown section" in capsys.readouterr().err


def test_missing_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2


def test_missing_required_option_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["simulate"])
    assert excinfo.value.code == 2
