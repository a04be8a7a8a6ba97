"""End-to-end runs of the command line through jetaero.main.run."""
import pytest

from jetaero.main import run
from jetaero.sim.log import read_log

ORACLE_CFG = "n_configs=2\nn_pitch=5\nn_yaw=4\ninterference=0\nseed=7\n"
HOVER = "reference=hover\nplant_aero=none\ncontroller_aero=none\nduration=0.05\n"


def summary(capsys) -> dict:
    """key=value pairs of the last stdout line."""
    line = capsys.readouterr().out.strip().splitlines()[-1]
    return dict(token.split("=", 1) for token in line.split())


def generate(tmp_path, write_text, *extra) -> tuple:
    path = tmp_path / "ds.csv"
    code = run(["generate-dataset", "--config", str(write_text("oracle.cfg", ORACLE_CFG)),
                "--out", str(path), *extra])
    return code, path


@pytest.fixture
def dataset(tmp_path, write_text):
    code, path = generate(tmp_path, write_text)
    assert code == 0
    return path


def test_generate_dataset(tmp_path, write_text, capsys):
    code, path = generate(tmp_path, write_text)
    assert code == 0
    values = summary(capsys)
    assert values["samples"] == "40"
    assert values["seed"] == "7"
    assert path.is_file()


def test_generate_dataset_with_mirroring(tmp_path, write_text, capsys):
    out = tmp_path / "aug.csv"
    code = run(["generate-dataset", "--config", str(write_text("oracle.cfg", ORACLE_CFG)), "--augment",
                "--out", str(out)])
    assert code == 0
    assert summary(capsys)["samples"] == "80"


def test_fit_and_evaluate_the_axisymmetric_model(dataset, tmp_path, capsys):
    coeffs = tmp_path / "coeffs.txt"
    capsys.readouterr()
    assert run(["fit-axisym", "--dataset", str(dataset), "--lambda", "0", "--out", str(coeffs)]) == 0
    values = summary(capsys)
    assert float(values["val_rel_err"]) < 1e-6
    assert values["links"] == "13"

    per_link = tmp_path / "links.csv"
    assert run(["eval-models", "--dataset", str(dataset), "--coeffs", str(coeffs), "--out", str(per_link)]) == 0
    assert float(summary(capsys)["axisym_rel_err"]) < 1e-6
    assert per_link.read_text(encoding="utf-8").startswith("link,axisym\n")


def test_train_a_small_network(dataset, tmp_path, capsys):
    weights = tmp_path / "net.mlp"
    capsys.readouterr()
    code = run(["train-mlp", "--dataset", str(dataset), "--epochs", "2", "--hidden", "1", "--width", "8",
                "--batch-size", "16", "--out", str(weights)])
    assert code == 0
    values = summary(capsys)
    assert values["epochs"] == "2"
    assert weights.is_file()
    assert len(weights.with_suffix(".history.csv").read_text(encoding="utf-8").splitlines()) == 4

    assert run(["eval-models", "--dataset", str(dataset), "--weights", str(weights)]) == 0
    assert "mlp_rel_err" in summary(capsys)


def test_simulate_and_report(write_text, tmp_path, capsys):
    scenario = write_text("hover.cfg", HOVER)
    out_dir = tmp_path / "logs"
    assert run(["simulate", "--scenario", str(scenario), "--out-dir", str(out_dir)]) == 0
    values = summary(capsys)
    assert values["scenario"] == "hover"
    assert values["status"] == "completed"
    log = read_log(out_dir / "hover.csv")
    assert len(log.rows) == 5

    report = tmp_path / "report.csv"
    assert run(["report", "--logs", str(out_dir / "hover.csv"), "--out", str(report), "--bin", "0.02"]) == 0
    values = summary(capsys)
    assert values["logs"] == "1"
    assert values["bins"] == "3"
    assert report.read_text(encoding="utf-8").startswith("t,hover:com_err_max,hover:tilt_max,")


def test_failed_scenario_exit_code(write_text, tmp_path):
    scenario = write_text("gusty.cfg", "reference=hover\nplant_aero=axisym\ncontroller_aero=none\n"
                                       "wind=0:20,0,0\nduration=0.05\nmax_com_error=1e-9\n")
    assert run(["simulate", "--scenario", str(scenario), "--out-dir", str(tmp_path)]) == 5
    assert not read_log(tmp_path / "gusty.csv").completed


def test_missing_file_is_an_io_error(tmp_path, capsys):
    code = run(["fit-axisym", "--dataset", str(tmp_path / "absent.csv"), "--out", str(tmp_path / "c.txt")])
    assert code == 2
    assert capsys.readouterr().err.startswith("error: ")


def test_malformed_dataset_is_a_validation_error(write_text, tmp_path):
    bad = write_text("bad.csv", "a,b,c\n1,2,3\n")
    assert run(["fit-axisym", "--dataset", str(bad), "--out", str(tmp_path / "c.txt")]) == 3


def test_eval_needs_a_model(dataset):
    assert run(["eval-models", "--dataset", str(dataset)]) == 3


def test_unknown_flag_exits_through_argparse():
    with pytest.raises(SystemExit):
        run(["simulate", "--scenarios", "x.cfg"])
