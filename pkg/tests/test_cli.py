import json
import math
from importlib import resources

import pytest

import nomasel.analysis as analysis_mod
import nomasel.specfun as specfun_mod
from nomasel import checks
from nomasel.cli import (EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, ConfigError,
                         load_config, main)
from nomasel.montecarlo import Scheme, SweepAxis


def bundled(name):
    return str(resources.files("nomasel").joinpath("configs", name))


class TestLoadConfig:
    def test_defaults_reproduce_reference_scenario(self):
        cfg = load_config(None)
        b = cfg.base
        assert (b.n_bs, b.n_ue1, b.n_ue2) == (2, 2, 2)
        assert (b.d1, b.d2, b.alpha) == (30.0, 100.0, 3.0)
        assert (b.a, b.b) == (0.6, 0.4)
        assert b.sigma_dbm == -70.0
        assert cfg.axis is SweepAxis.PS_DBM
        assert cfg.points == tuple(float(v) for v in range(0, 41, 5))
        assert cfg.defaulted

    def test_bundled_fig_configs_load(self):
        for name, axis in [("fig2.cfg", SweepAxis.PS_DBM), ("fig3.cfg", SweepAxis.N_BS),
                           ("fig4.cfg", SweepAxis.D2), ("fig5.cfg", SweepAxis.B_COEFF),
                           ("fig6.cfg", SweepAxis.B_COEFF)]:
            cfg = load_config(bundled(name))
            assert cfg.axis is axis and not cfg.defaulted

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[system]\nn_bs = 2\nfrequency = 2.4\n")
        with pytest.raises(ConfigError, match="unknown key 'frequency'"):
            load_config(str(path))

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[antenna]\nn = 2\n")
        with pytest.raises(ConfigError, match=r"unknown section \[antenna\]"):
            load_config(str(path))

    def test_power_split_constraint_named(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[system]\nb = 0.6\n")
        with pytest.raises(ConfigError, match="a > b"):
            load_config(str(path))

    def test_empty_file_applies_defaults(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("")
        cfg = load_config(str(path))
        assert cfg.defaulted and cfg.base.b == 0.4

    @pytest.mark.parametrize("body,frag", [
        ("[sweep]\naxis = frequency\n", "unknown sweep axis"),
        ("[sweep]\nschemes = NOMA_XX\n", "unknown scheme"),
        ("[output]\nformat = xml\n", "unknown output format"),
        ("[sweep]\npoints =  \n", "points list is empty"),
    ])
    def test_bad_values_rejected(self, tmp_path, body, frag):
        path = tmp_path / "bad.cfg"
        path.write_text(body)
        with pytest.raises(ConfigError, match=frag):
            load_config(str(path))


class TestSimulateCommand:
    def test_fig2_row_count_and_schema(self, tmp_path):
        out = tmp_path / "fig2.csv"
        rc = main(["simulate", "--config", bundled("fig2.cfg"),
                   "--trials", "5", "--out", str(out)])
        assert rc == EXIT_OK
        lines = out.read_text().splitlines()
        comments = [l for l in lines if l.startswith("#")]
        assert any("schema: nomasel/1" in l for l in comments)
        assert any("config:" in l for l in comments)
        header = next(l for l in lines if not l.startswith("#"))
        assert header == "point,scheme,mean_rsum,mean_r1,mean_r2,mean_eta,stderr,trials"
        rows = [l for l in lines if not l.startswith("#")][1:]
        assert len(rows) == 9 * 7

    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--trials", "50", "--seed", "1234"]
        assert main(args + ["--out", str(out1)]) == EXIT_OK
        assert main(args + ["--out", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()

    def test_defaults_noted_in_header(self, tmp_path, capsys):
        assert main(["simulate", "--trials", "2"]) == EXIT_OK
        text = capsys.readouterr().out
        assert "reference scenario defaults applied" in text

    def test_json_output(self, tmp_path):
        out = tmp_path / "res.json"
        rc = main(["simulate", "--trials", "3", "--format", "json",
                   "--out", str(out)])
        assert rc == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["schema"] == "nomasel/1"
        assert len(doc["rows"]) == 9 * 7
        assert set(doc["rows"][0]) == {"point", "scheme", "mean_rsum", "mean_r1",
                                       "mean_r2", "mean_eta", "stderr", "trials"}

    def test_plot_renders_next_to_output(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["simulate", "--trials", "3", "--out", str(out), "--plot"])
        assert rc == EXIT_OK
        assert (tmp_path / "sweep.png").exists()

    def test_plot_without_out_is_config_error(self, capsys):
        assert main(["simulate", "--trials", "2", "--plot"]) == EXIT_CONFIG
        err = capsys.readouterr().err
        assert err.startswith("error: config:") and err.count("\n") == 1

    def test_missing_config_is_config_error(self, tmp_path, capsys):
        rc = main(["simulate", "--config", str(tmp_path / "nope.cfg")])
        assert rc == EXIT_CONFIG
        assert capsys.readouterr().err.startswith("error: config:")

    def test_verbose_reports_progress(self, tmp_path, capsys):
        cfgfile = tmp_path / "v.cfg"
        cfgfile.write_text("[sweep]\npoints = 10, 20\ntrials = 2\n"
                           "[output]\nverbose = true\n")
        out = tmp_path / "v.csv"
        assert main(["simulate", "--config", str(cfgfile), "--out", str(out)]) == EXIT_OK
        assert "sweep point 10" in capsys.readouterr().err

    def test_workers_do_not_change_output(self, tmp_path):
        out1, out2 = tmp_path / "w1.csv", tmp_path / "w4.csv"
        base = ["simulate", "--trials", "400", "--seed", "9"]
        assert main(base + ["--out", str(out1), "--workers", "1"]) == EXIT_OK
        assert main(base + ["--out", str(out2), "--workers", "4"]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()


class TestAnalyzeCommand:
    def test_closed_vs_quadrature_table(self, tmp_path):
        cfgfile = tmp_path / "one.cfg"
        cfgfile.write_text("[sweep]\npoints = 30\n")
        out = tmp_path / "analysis.csv"
        assert main(["analyze", "--config", str(cfgfile), "--out", str(out)]) == EXIT_OK
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == ("point,aia_closed,a3_closed,aia_quadrature,"
                            "a3_quadrature,aia_rel_gap,a3_rel_gap,flags")
        fields = lines[1].split(",")
        assert float(fields[5]) <= 1e-6 and float(fields[6]) <= 1e-6
        assert fields[7] == ""

    def test_low_snr_flagged(self, tmp_path):
        cfgfile = tmp_path / "cold.cfg"
        cfgfile.write_text("[sweep]\npoints = 0\n")
        out = tmp_path / "cold.csv"
        assert main(["analyze", "--config", str(cfgfile), "--out", str(out)]) == EXIT_OK
        row = [l for l in out.read_text().splitlines() if not l.startswith("#")][1]
        assert row.endswith("low-snr")

    def test_single_triple_closed_forms_coincide(self, tmp_path):
        cfgfile = tmp_path / "one.cfg"
        cfgfile.write_text("[system]\nn_bs = 1\nn_ue1 = 1\nn_ue2 = 1\n"
                           "[sweep]\npoints = 30\n")
        out = tmp_path / "one.csv"
        assert main(["analyze", "--config", str(cfgfile), "--out", str(out)]) == EXIT_OK
        row = [l for l in out.read_text().splitlines() if not l.startswith("#")][1]
        fields = row.split(",")
        assert math.isclose(float(fields[1]), float(fields[2]), rel_tol=1e-12)


class TestValidateCommand:
    def test_exit_zero_when_all_pass(self, monkeypatch, capsys):
        monkeypatch.setattr(checks, "ALL_CHECKS",
                            (lambda: checks.CheckResult("stub", True, "ok"),))
        assert main(["validate"]) == EXIT_OK
        assert "PASS stub" in capsys.readouterr().out

    def test_exit_three_names_first_failure(self, monkeypatch, capsys):
        monkeypatch.setattr(checks, "ALL_CHECKS",
                            (lambda: checks.CheckResult("good", True, "ok"),
                             lambda: checks.CheckResult("broken", False, "bad")))
        assert main(["validate"]) == EXIT_NUMERIC
        captured = capsys.readouterr()
        assert "FAIL broken" in captured.out
        assert "validation failed: broken" in captured.err


class TestMutationCanaries:
    def test_chi_sign_flip_trips_quadrature_check(self, monkeypatch):
        assert checks.check_closed_vs_quadrature().passed
        real = specfun_mod.chi
        monkeypatch.setattr(specfun_mod, "chi", lambda x, b, rho: -real(x, b, rho))
        assert not checks.check_closed_vs_quadrature().passed

    def test_lambda_off_by_one_trips_expansion_check(self, monkeypatch):
        assert checks.check_expansion_correctness().passed
        real = specfun_mod.lambda_coeff
        monkeypatch.setattr(specfun_mod, "lambda_coeff",
                            lambda idx, order: real(idx, order) + (idx == 1))
        try:
            assert not checks.check_expansion_correctness().passed
        finally:
            analysis_mod._aia_primitives.cache_clear()
