import pytest

from cinglear import cli


@pytest.fixture(scope="module")
def synth(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    rc = cli.main(["synth", "--out", str(d), "--days", "45", "--hours", "4",
                   "--exog", "2", "--support", "3", "--noise", "0.5",
                   "--seed", "7"])
    assert rc == 0
    return d


def test_version_exits_zero(capsys):
    assert cli.main(["--version"]) == 0
    assert "cinglear" in capsys.readouterr().out


def test_missing_required_option_is_usage_error():
    assert cli.main(["fit"]) == cli.EXIT_USAGE
    assert cli.main(["backtest"]) == cli.EXIT_USAGE
    assert cli.main(["no-such-command"]) == cli.EXIT_USAGE


def test_missing_file_is_data_error(tmp_path):
    rc = cli.main(["fit", "--data", str(tmp_path / "nope.csv"),
                   "--out", str(tmp_path), "--train-days", "30"])
    assert rc == cli.EXIT_DATA


def test_fit_and_forecast(synth, tmp_path, capsys):
    rc = cli.main(["fit", "--data", str(synth / "synth.csv"), "--out",
                   str(tmp_path), "--train-days", "30", "--n-lambda", "10"])
    assert rc == 0
    assert "lambda=" in capsys.readouterr().out
    rc = cli.main(["forecast", "--data", str(synth / "synth.csv"), "--out",
                   str(tmp_path), "--train-days", "30", "--n-lambda", "10",
                   "--models", "snaive,cing"])
    assert rc == 0
    assert (tmp_path / "forecast.csv").exists()


def test_backtest_and_diagnose(synth, tmp_path, capsys):
    rc = cli.main(["backtest", "--data", str(synth / "synth.csv"), "--out",
                   str(tmp_path / "bt"), "--train-days", "30", "--test-days", "2",
                   "--models", "snaive,cing", "--n-lambda", "10",
                   "--n-samples", "500"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "MAE=" in out and "CRPS=" in out
    rc = cli.main(["diagnose", "--coeffs", str(tmp_path / "bt" / "coefficients"),
                   "--data", str(synth / "synth.csv"), "--out",
                   str(tmp_path / "diag"), "--train-days", "30", "--s-max", "3"])
    assert rc == 0
    assert (tmp_path / "diag" / "theta.csv").exists()


def test_numerical_failure_exit_code(synth, tmp_path):
    rc = cli.main(["backtest", "--data", str(synth / "synth.csv"), "--out",
                   str(tmp_path), "--train-days", "7", "--test-days", "2",
                   "--folds", "2", "--models", "arima"])
    assert rc == cli.EXIT_NUMERICAL


def test_config_file_precedence(tmp_path):
    cfgfile = tmp_path / "cfg"
    cfgfile.write_text("n-lambda = 33\nseed=9\n# comment\n\n")
    loaded = cli._load_config(str(cfgfile))
    assert loaded == {"n_lambda": "33", "seed": "9"}

    class Ctx:
        obj = {"config": loaded}

    assert cli._resolve(Ctx(), "n_lambda", None) == 33          # config beats default
    assert cli._resolve(Ctx(), "n_lambda", 12) == 12            # flag beats config
    assert cli._resolve(Ctx(), "max_iter", None) == cli.DEFAULTS["max_iter"]


def test_bad_config_line_is_usage_error(tmp_path):
    cfgfile = tmp_path / "cfg"
    cfgfile.write_text("just-a-word\n")
    rc = cli.main(["--config", str(cfgfile), "synth", "--out", str(tmp_path),
                   "--days", "10"])
    assert rc == cli.EXIT_USAGE


def test_config_file_feeds_commands(synth, tmp_path, capsys):
    cfgfile = tmp_path / "cfg"
    cfgfile.write_text("train-days=30\nn-lambda=10\n")
    rc = cli.main(["--config", str(cfgfile), "fit",
                   "--data", str(synth / "synth.csv"), "--out", str(tmp_path)])
    assert rc == 0
