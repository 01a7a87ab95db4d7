import json

import numpy as np
import pytest

from accelcert import ConfigError, execute, parse_config
from accelcert.harness import (build_objective, load_config, resolve_s,
                               resolve_x0, suite, write_ode_csv)
from accelcert.hires_ode import integrate
from accelcert.objectives import make_quadratic
from accelcert import cli

MINIMAL = {
    "objective": "quad",
    "spectrum": [1, 100],
    "method": "iv-phase",
    "s": "1/L",
    "K": 100,
    "seed": 1,
}


def config_with(**overrides):
    doc = dict(MINIMAL)
    doc.update(overrides)
    return parse_config(json.dumps(doc))


class TestParseConfig:
    def test_minimal_resolves_symbolic_s(self):
        config = config_with()
        f = build_objective(config)
        assert resolve_s(config.s, f) == pytest.approx(0.01)

    def test_quarter_mu_step(self):
        config = config_with(spectrum=[1, 3], s="1/(4mu)")
        f = build_objective(config)
        assert resolve_s(config.s, f) == pytest.approx(0.25)

    def test_missing_method_names_field(self):
        doc = dict(MINIMAL)
        del doc["method"]
        with pytest.raises(ConfigError, match="method"):
            parse_config(json.dumps(doc))

    def test_missing_objective_param_names_field(self):
        doc = dict(MINIMAL)
        del doc["spectrum"]
        with pytest.raises(ConfigError, match="spectrum"):
            parse_config(json.dumps(doc))

    def test_rejects_bad_documents(self):
        with pytest.raises(ConfigError):
            parse_config("not json")
        with pytest.raises(ConfigError):
            parse_config(json.dumps({**MINIMAL, "method": "unknown"}))
        with pytest.raises(ConfigError):
            parse_config(json.dumps({**MINIMAL, "s": "2/L"}))
        with pytest.raises(ConfigError):
            parse_config(json.dumps({**MINIMAL, "s": -1.0}))
        with pytest.raises(ConfigError):
            parse_config(json.dumps({**MINIMAL, "K": -3}))
        with pytest.raises(ConfigError):
            parse_config(json.dumps({**MINIMAL, "bound": "rate-gc"}))

    def test_lossless_round_trip(self):
        config = config_with(x0={"random_ball": {"radius": 2.0}},
                             lyapunov="iv", bound="rate-iv",
                             output_path="r.csv")
        again = parse_config(json.dumps(config.to_dict()))
        assert again == config

    def test_x0_forms(self):
        f = build_objective(config_with())
        explicit = config_with(x0=[1.0, 2.0])
        np.testing.assert_array_equal(resolve_x0(explicit, f), [1.0, 2.0])
        seeded = config_with(x0={"random_ball": {"radius": 2.0}})
        a = resolve_x0(seeded, f)
        b = resolve_x0(seeded, f)
        np.testing.assert_array_equal(a, b)
        assert np.linalg.norm(a) <= 2.0
        with pytest.raises(ConfigError):
            resolve_x0(config_with(x0=[1.0, 2.0, 3.0]), f)


class TestExecute:
    def test_deterministic_bytes(self, tmp_path):
        config = config_with(x0=[1.0, 1.0], bound="rate-iv", lyapunov="iv",
                             output_path="run.csv")
        first = execute(config, out_root=tmp_path / "a")
        second = execute(config, out_root=tmp_path / "b")
        assert first.csv_path.read_bytes() == second.csv_path.read_bytes()
        assert first.summary_path.read_text() == second.summary_path.read_text()

    def test_bound_summary_line(self, tmp_path):
        config = config_with(x0=[1.0, 1.0], bound="rate-iv")
        result = execute(config, out_root=tmp_path)
        assert result.ok
        text = result.summary_path.read_text()
        assert "bound_violations: 0" in text
        assert "bound_guaranteed: true" in text

    def test_unguaranteed_step_flagged(self, tmp_path):
        config = config_with(s=0.02, x0=[0.1, 0.1], bound="rate-iv", K=30)
        with pytest.warns(UserWarning):
            result = execute(config, out_root=tmp_path)
        assert "bound_guaranteed: false" in result.summary_path.read_text()

    def test_csv_schema(self, tmp_path):
        plain = execute(config_with(x0=[1.0, 1.0]), out_root=tmp_path)
        header = plain.csv_path.read_text().splitlines()[0]
        assert header == "k,f_gap,grad_norm"
        full = execute(config_with(x0=[1.0, 1.0], bound="rate-iv",
                                   lyapunov="iv", output_path="full.csv"),
                       out_root=tmp_path)
        header = full.csv_path.read_text().splitlines()[0]
        assert header == "k,f_gap,grad_norm,lyapunov,bound"
        rows = full.csv_path.read_text().splitlines()
        assert len(rows) == 102  # header + K+1 records

    def test_echo_reproduces_run(self, tmp_path):
        config = config_with(x0={"random_ball": {"radius": 2.0}},
                             lyapunov="iv", output_path="orig.csv")
        original = execute(config, out_root=tmp_path / "a")
        echoed = load_config(original.echo_path)
        assert isinstance(echoed.s, float)  # symbolic step resolved
        assert isinstance(echoed.x0, list)  # seeded start made explicit
        replay = execute(echoed, out_root=tmp_path / "b")
        assert original.csv_path.read_bytes() == replay.csv_path.read_bytes()

    def test_logistic_run_resolves_minimizer(self, tmp_path):
        config = parse_config(json.dumps({
            "objective": "reg-logistic", "data_seed": 3, "n_samples": 50,
            "dim": 2, "reg": 0.1, "method": "iv-phase", "s": "1/L",
            "K": 50, "seed": 2, "bound": "rate-iv",
        }))
        result = execute(config, out_root=tmp_path)
        assert result.ok
        assert "bound_violations: 0" in result.summary_path.read_text()


class TestOdeCsv:
    def test_schema_and_units(self, tmp_path):
        f = make_quadratic([1, 4])
        sol = integrate(f, np.array([1.0, 0.5]), s=0.25, T=0.1, h=1e-2)
        path = tmp_path / "ode.csv"
        write_ode_csv(sol, f, 0.25, f.mu, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,X0,X1,Xdot0,Xdot1,f_gap,lyapunov"
        assert len(lines) == 12  # header + 11 samples


class TestSuites:
    def test_figures_suite_writes_files(self, tmp_path):
        assert suite("figures", out_root=tmp_path) == 0
        for method in ("gd", "heavy-ball", "nag-classic", "nag-modified",
                       "iv-phase"):
            path = tmp_path / f"fig_gap_{method}.csv"
            assert path.exists()
            assert path.read_text().splitlines()[0] == "k,f_gap,grad_norm"

    def test_unknown_suite_rejected(self):
        with pytest.raises(ConfigError):
            suite("benchmarks")

    def test_broken_momentum_coefficient_fails_acceptance(self, monkeypatch):
        # mutation check: the two schemes coincide only at the true
        # coefficient, so corrupting it must break the equivalence criterion
        from accelcert import acceptance, optimizers

        def corrupted(mu, s):
            return 1.0 + 2.05 * (mu * s) ** 0.5

        monkeypatch.setattr(optimizers, "momentum_denominator", corrupted)
        result = acceptance.criterion_1()
        assert not result.passed


class TestCli:
    def test_run_exit_codes(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({**MINIMAL, "x0": [1.0, 1.0],
                                    "bound": "rate-iv"}))
        assert cli.main(["run", "--config", str(path),
                         "--out", str(tmp_path)]) == 0

    def test_bad_config_exits_2(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({**MINIMAL, "method": "unknown"}))
        assert cli.main(["run", "--config", str(path),
                         "--out", str(tmp_path)]) == 2

    def test_missing_config_exits_2(self, tmp_path):
        assert cli.main(["run", "--config", str(tmp_path / "nope.json"),
                         "--out", str(tmp_path)]) == 2

    def test_ode_subcommand(self, tmp_path, capsys):
        rc = cli.main(["ode", "--objective", "quad", "--spectrum", "1,4",
                       "--s", "0.25", "--T", "1.0", "--h", "0.001",
                       "--x0", "1.0,0.5", "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "ode.csv").exists()
        assert "bound_violations: 0" in capsys.readouterr().out

    def test_scan_subcommand(self, tmp_path, capsys):
        rc = cli.main(["scan", "--mu", "1", "--spectrum", "1,3",
                       "--s-grid", "0.26,0.30", "--K", "100",
                       "--out", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "scan.csv").read_text().splitlines()
        assert lines[0] == ("s,lambda,discriminant,root1_re,root1_im,"
                            "root2_re,root2_im,predicted_monotone,"
                            "observed_monotone")
        assert len(lines) == 5  # header + 2 s values x 2 eigenvalues
        assert "agreement: true" in capsys.readouterr().out

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["suite", "nonexistent"])
        assert err.value.code == 2

    def test_output_root_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ACCELCERT_OUT", str(tmp_path / "envroot"))
        path = tmp_path / "config.json"
        path.write_text(json.dumps({**MINIMAL, "x0": [1.0, 1.0]}))
        assert cli.main(["run", "--config", str(path)]) == 0
        assert (tmp_path / "envroot" / "quad_iv-phase_K100.csv").exists()
