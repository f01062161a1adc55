"""End-to-end command-line checks: exit codes, emitted files, stdout text."""

import contextlib
import io
import re

import numpy as np
import pytest

from epictrl import control
from epictrl.cli import main
from epictrl.scenarios import (
    ParseError,
    builtin,
    parse_scenario_text,
    scenario_to_text,
    with_law,
)


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


MEASLES_BODY = """\
mu_per_day = 5.48e-05
omega_per_day = 0.0
beta_per_day = 3.288
sigma_per_day = 0.0982
gamma_per_day = 0.274
n_total = 1000000.0
s0 = 980000.0
e0 = 15000.0
i0 = 5000.0
r0 = 0.0
"""


def write_scenario(directory, name, extra="", beta=None):
    body = MEASLES_BODY
    if beta is not None:
        body = body.replace("beta_per_day = 3.288", f"beta_per_day = {beta}")
    path = directory / f"{name}.scn"
    path.write_text(f"name = {name}\n{body}{extra}")
    return str(path)


@pytest.fixture(scope="module")
def novax_sim(tmp_path_factory):
    d = tmp_path_factory.mktemp("novax")
    code, out, err = run_cli(["simulate", "measles", "--out-dir", str(d)])
    return code, out, err, d


class TestSimulate:
    def test_summary_content(self, novax_sim):
        code, out, err, d = novax_sim
        assert code == 0
        assert "scenario: measles" in out
        assert "law: none" in out
        assert "peak I: 171349 people (17.1349% of N) at day 16.20" in out
        assert "(97.0776% of N removed)" in out
        assert f"wrote {d / 'measles_trajectory.csv'}" in out
        assert err == ""

    def test_csv_structure(self, novax_sim):
        _, _, _, d = novax_sim
        rows = (d / "measles_trajectory.csv").read_text().splitlines()
        assert rows[0] == "t_days,S,E,I,R,S_pct,E_pct,I_pct,R_pct,V,effort_per_day"
        assert len(rows) == 502
        first = rows[1].split(",")
        assert first[:5] == ["0.0", "980000.0", "15000.0", "5000.0", "0.0"]
        assert float(rows[-1].split(",")[0]) == 50.0

    def test_percent_columns_use_six_decimals(self, novax_sim):
        _, _, _, d = novax_sim
        rows = (d / "measles_trajectory.csv").read_text().splitlines()
        for row in rows[1:][::50]:
            cells = row.split(",")
            for cell in cells[5:9]:
                assert re.fullmatch(r"\d+\.\d{6}", cell), cell

    def test_rerun_is_byte_identical(self, novax_sim, tmp_path):
        _, _, _, d = novax_sim
        code, _, _ = run_cli(["simulate", "measles", "--out-dir", str(tmp_path)])
        assert code == 0
        assert (
            (tmp_path / "measles_trajectory.csv").read_bytes()
            == (d / "measles_trajectory.csv").read_bytes()
        )

    def test_svg_artifacts(self, tmp_path):
        code, out, _ = run_cli(
            ["simulate", "measles", "--svg", "--out-dir", str(tmp_path)]
        )
        assert code == 0
        for stem in ("measles_populations.svg", "measles_effort.svg"):
            text = (tmp_path / stem).read_text()
            assert text.startswith("<svg")
            assert "<polyline" in text
            assert f"wrote {tmp_path / stem}" in out

    def test_step_override_changes_sampling(self, tmp_path):
        code, _, _ = run_cli(
            ["simulate", "measles", "--step", "0.02", "--out-dir", str(tmp_path)]
        )
        assert code == 0
        rows = (tmp_path / "measles_trajectory.csv").read_text().splitlines()
        assert len(rows) == 252

    def test_susceptible_feedback_summary(self, tmp_path):
        code, out, err = run_cli(
            ["simulate", "measles", "--law", "law1", "--g", "0.25",
             "--out-dir", str(tmp_path)]
        )
        assert code == 0
        assert "law: law1" in out
        assert "is below the sufficient convergence bound 3.32044" in out
        assert "peak I: 25106.2 people (2.5106% of N) at day 12.70" in out
        assert "(99.6499% of N removed)" in out
        assert "V range over samples: [1.01634, 4177.8]" in out
        assert "epictrl: warning:" in err
        assert "convergence is not certified" in err

    def test_large_gain_runs_without_warning(self, tmp_path):
        code, _, err = run_cli(
            ["simulate", "measles", "--law", "law1", "--g", "3.5",
             "--out-dir", str(tmp_path)]
        )
        assert code == 0
        assert err == ""

    def test_clamped_vaccination_stays_in_unit_range(self, tmp_path):
        code, out, _ = run_cli(
            ["simulate", "measles", "--law", "law1", "--g", "0.25",
             "--clamp-v", "--out-dir", str(tmp_path)]
        )
        assert code == 0
        assert "V range over samples: [0, 1]" in out

    def test_switch_day_for_both_gain_modes(self, tmp_path):
        code, out, _ = run_cli(
            ["simulate", "measles", "--law", "law2", "--g", "0.0999",
             "--g1", "0.1", "--out-dir", str(tmp_path)]
        )
        assert code == 0
        assert "peak I: 54458.6 people (5.4459% of N) at day 14.50" in out
        assert "susceptible population reached zero at day 18.5935" in out
        code, out, _ = run_cli(
            ["simulate", "measles", "--law", "law2", "--g", "0.0999",
             "--g1-mode", "derived", "--out-dir", str(tmp_path)]
        )
        assert code == 0
        assert "g1 = 0.0999548 per day" in out
        assert "peak I: 54503.8 people (5.4504% of N) at day 14.50" in out
        assert "susceptible population reached zero at day 18.6469" in out

    def test_positivity_violation_exits_3(self, tmp_path):
        code, _, err = run_cli(
            ["simulate", "measles", "--law", "law1", "--g", "0.1",
             "--out-dir", str(tmp_path)]
        )
        assert code == 3
        assert "epictrl: invariant violation:" in err
        assert "component R" in err

    def test_env_var_selects_output_directory(self, tmp_path, monkeypatch):
        monkeypatch.setenv("EPICTRL_OUT_DIR", str(tmp_path / "envdir"))
        code, _, _ = run_cli(["simulate", "measles"])
        assert code == 0
        assert (tmp_path / "envdir" / "measles_trajectory.csv").is_file()

    def test_out_dir_collision_exits_4(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("x")
        code, _, err = run_cli(
            ["simulate", "measles", "--out-dir", str(blocker)]
        )
        assert code == 4
        assert "epictrl: i/o error:" in err


class TestEquilibria:
    def test_measles_report(self):
        code, out, _ = run_cli(["equilibria", "measles"])
        assert code == 0
        assert "reproduction ratio: 11.9909" in out
        assert "disease-free point: S = 1e+06, E = 0, I = 0, R = 0" in out
        assert "S = 83396.5 (8.3397%)" in out
        assert "E = 511.221 (0.0511%)" in out
        assert "I = 183.182 (0.0183%)" in out
        assert "R = 915909 (91.5909%)" in out

    def test_below_threshold_reports_no_endemic_point(self, tmp_path):
        path = write_scenario(tmp_path, "subthreshold", beta=0.2)
        code, out, err = run_cli(["equilibria", path])
        assert code == 0
        assert "reproduction ratio: 0.729374" in out
        assert "endemic point: none (reproduction ratio below 1)" in out
        assert "epictrl: warning:" in err
        assert "admissibility preconditions" in err


class TestStability:
    def test_measles_report(self):
        code, out, _ = run_cli(["stability", "measles"])
        assert code == 0
        assert "disease-free point: unstable (beta threshold 0.274208)" in out
        assert (
            "sup-ratio 3.0386 vs 1/beta = 0.304136 -> "
            "frequency-domain condition not met"
        ) in out
        assert "characteristic polynomial stable (Routh-Hurwitz): True" in out
        assert "-0.372427" in out
        assert "verdicts consistent: True" in out

    def test_condition_met_case(self, tmp_path):
        # slow waning, long latency, fast recovery: the frequency sweep
        # stays below 1/beta and both verdicts agree on stability
        path = tmp_path / "coastal.scn"
        path.write_text(
            "name = coastal\n"
            "mu_per_day = 6.34e-05\n"
            "omega_per_day = 0.0046\n"
            "beta_per_day = 2.025\n"
            "sigma_per_day = 0.0102\n"
            "gamma_per_day = 1.18\n"
            "n_total = 1000000.0\n"
            "s0 = 980000.0\ne0 = 15000.0\ni0 = 5000.0\nr0 = 0.0\n"
        )
        code, out, _ = run_cli(["stability", str(path)])
        assert code == 0
        assert "frequency-domain condition met" in out
        assert "frequency-domain condition not met" not in out
        assert "sup-ratio 0.272939 vs 1/beta = 0.493827" in out
        assert "verdicts consistent: True" in out

    def test_below_threshold_df_stable(self, tmp_path):
        path = write_scenario(tmp_path, "subthreshold", beta=0.2)
        code, out, _ = run_cli(["stability", path])
        assert code == 0
        assert "disease-free point: stable" in out
        assert "endemic point: none" in out


class TestCampaign:
    def test_measles_susceptible_feedback(self, tmp_path):
        code, out, _ = run_cli(
            ["campaign", "measles", "--law", "law1", "--g", "0.25",
             "--out-dir", str(tmp_path)]
        )
        assert code == 0
        assert "baseline removed population (no vaccination): 915909" in out
        assert "target population: 80590 people over 50 days" in out
        assert "effort integral: 838559 people" in out
        assert "doses per target individual f: 10.4053" in out
        daily = (tmp_path / "measles_campaign_daily.csv").read_text().splitlines()
        weekly = (tmp_path / "measles_campaign_weekly.csv").read_text().splitlines()
        assert daily[0] == "day,vaccines_per_day"
        assert weekly[0] == "week,vaccines_per_day"
        assert len(daily) == 51
        assert len(weekly) == 9
        assert [row.split(",")[0] for row in daily[1:]] == [
            str(d) for d in range(50)
        ]
        # the final week covers only day 49, so the two tables agree there
        assert weekly[-1].split(",")[1] == daily[-1].split(",")[1]

    def test_window_and_week_length_overrides(self, tmp_path):
        code, out, _ = run_cli(
            ["campaign", "measles", "--law", "law1", "--g", "0.25",
             "--window", "20", "--week-length", "10",
             "--out-dir", str(tmp_path)]
        )
        assert code == 0
        assert "over 20 days" in out
        daily = (tmp_path / "measles_campaign_daily.csv").read_text().splitlines()
        weekly = (tmp_path / "measles_campaign_weekly.csv").read_text().splitlines()
        assert len(daily) == 21
        assert len(weekly) == 3

    def test_no_endemic_point_gives_zero_baseline(self, tmp_path):
        path = write_scenario(tmp_path, "subthreshold", beta=0.2)
        code, out, _ = run_cli(
            ["campaign", path, "--law", "law1", "--g", "0.25",
             "--out-dir", str(tmp_path)]
        )
        assert code == 0
        assert "baseline removed population (no vaccination): 0 people" in out

    def test_unvaccinated_run_rejected(self, tmp_path):
        code, _, err = run_cli(
            ["campaign", "measles", "--out-dir", str(tmp_path)]
        )
        assert code == 2
        assert "epictrl: validation error:" in err
        assert "unvaccinated" in err


class TestSweep:
    def test_gain_sweep_outputs_and_ordering(self, tmp_path):
        path = write_scenario(
            tmp_path,
            "relaxed",
            extra="law = law1\ng_per_day = 0.25\npositivity_tol = 0.05\n",
        )
        code, out, _ = run_cli(
            ["sweep", path, "--param", "g", "--values", "0.1,0.25,0.5",
             "--out-dir", str(tmp_path)]
        )
        assert code == 0
        assert "sweep over g" in out
        combined = (tmp_path / "relaxed_sweep_g.csv").read_text().splitlines()
        assert combined[0] == "t_days,I_0.1,I_0.25,I_0.5"
        assert len(combined) == 502
        summary = (tmp_path / "relaxed_sweep_g_summary.csv").read_text().splitlines()
        assert summary[0] == "value,peak_i,peak_day,r_window_end"
        rows = [tuple(float(x) for x in r.split(",")) for r in summary[1:]]
        assert [r[0] for r in rows] == [0.1, 0.25, 0.5]
        peaks = [r[1] for r in rows]
        days = [r[2] for r in rows]
        ends = [r[3] for r in rows]
        # stronger gain flattens the outbreak and brings the peak forward
        assert peaks[0] > peaks[1] > peaks[2]
        assert days[0] > days[1] > days[2]
        assert ends[0] < ends[1] < ends[2]
        assert peaks[1] == 25106.228159651746
        assert 0.70e6 < ends[0] < 0.80e6

    def test_waning_rate_leaves_infectious_curve_unchanged(self, tmp_path):
        code, _, _ = run_cli(
            ["sweep", "influenza7", "--law", "law1", "--g", "0.1",
             "--horizon", "50", "--param", "omega",
             "--values", "0.14285714285714285,0.06666666666666667",
             "--out-dir", str(tmp_path)]
        )
        assert code == 0
        data = np.loadtxt(
            tmp_path / "influenza7_sweep_omega.csv", delimiter=",", skiprows=1
        )
        assert np.abs(data[:, 1] - data[:, 2]).max() <= 1e-9 * 1000.0

    @pytest.mark.parametrize(
        "argv, needle",
        [
            (["sweep", "measles", "--law", "law1", "--g", "0.25",
              "--param", "g", "--values", " , "],
             "must list at least one value"),
            (["sweep", "measles", "--law", "law1", "--g", "0.25",
              "--param", "g", "--values", "0.1,abc"],
             "'abc' is not a number"),
            (["sweep", "measles", "--law", "law1", "--g", "0.25",
              "--param", "g1", "--values", "0.1"],
             "sweep over 'g1' requires --law law2"),
            (["sweep", "measles", "--param", "g", "--values", "0.1"],
             "requires --law law1 or law2"),
        ],
    )
    def test_rejected_sweeps(self, argv, needle):
        code, _, err = run_cli(argv)
        assert code == 2
        assert "epictrl: validation error:" in err
        assert needle in err


class TestScenarioHandling:
    def test_unknown_builtin(self):
        code, _, err = run_cli(["simulate", "mumps"])
        assert code == 2
        assert "neither a builtin" in err

    def test_law_overrides_require_gains(self):
        code, _, err = run_cli(["simulate", "measles", "--law", "law1"])
        assert code == 2
        assert "--law law1 requires --g" in err
        code, _, err = run_cli(
            ["simulate", "measles", "--law", "law2", "--g", "0.1"]
        )
        assert code == 2
        assert "--g1-mode printed requires --g1" in err

    def test_missing_subcommand_exits_2(self):
        code, _, _ = run_cli([])
        assert code == 2

    def test_parse_error_names_field_and_line(self, tmp_path):
        path = write_scenario(tmp_path, "bad", beta="fast")
        code, _, err = run_cli(["simulate", path])
        assert code == 2
        assert ":4: field beta_per_day: 'fast' is not a number" in err

    @pytest.mark.parametrize(
        "extra, needle",
        [
            ("color = red\n", ":12: unknown field 'color'"),
            ("mu_per_day = 1.0\n", ":12: field 'mu_per_day' already set on line 2"),
            ("law = lockdown\n", "field law: expected none, law1, or law2"),
            ("outputs = csv,json\n", "unknown artifact 'json'"),
        ],
    )
    def test_bad_scenario_files(self, tmp_path, extra, needle):
        path = write_scenario(tmp_path, "bad", extra=extra)
        code, _, err = run_cli(["simulate", path])
        assert code == 2
        assert needle in err

    def test_missing_required_field(self, tmp_path):
        path = tmp_path / "partial.scn"
        path.write_text("name = partial\nmu_per_day = 1e-4\n")
        code, _, err = run_cli(["simulate", str(path)])
        assert code == 2
        assert "missing required field" in err

    def test_serialization_round_trips(self):
        sc = builtin("measles")
        assert parse_scenario_text(scenario_to_text(sc)) == sc
        sc2 = with_law(sc, control.law2(sc.params, g=0.1, g1=0.1, clamp_v=True))
        assert parse_scenario_text(scenario_to_text(sc2)) == sc2
        for name in ("influenza7", "influenza15"):
            sc3 = builtin(name)
            assert parse_scenario_text(scenario_to_text(sc3)) == sc3

    def test_comments_and_blank_lines_ignored(self):
        sc = builtin("measles")
        text = "# header comment\n\n" + scenario_to_text(sc) + "\n# trailing\n"
        assert parse_scenario_text(text) == sc

    def test_inadmissible_initial_state_warns_but_runs(self, tmp_path):
        path = tmp_path / "lowexposed.scn"
        path.write_text(
            "name = lowexposed\n"
            + MEASLES_BODY.replace("e0 = 15000.0", "e0 = 0.0").replace(
                "s0 = 980000.0", "s0 = 995000.0"
            )
        )
        code, out, err = run_cli(["equilibria", str(path)])
        assert code == 0
        assert "reproduction ratio: 11.9909" in out
        assert "admissibility preconditions" in err
