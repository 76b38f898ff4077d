"""Tests for the case catalog, random generator, and study machinery."""

import numpy as np
import pytest
from scipy import stats

from berthplan import scenarios as sc
from berthplan.constraints import corridor_residuals
from berthplan.geometry import collision_residuals
from berthplan.io import bundled_path, load_scenario
from berthplan.solver import SolverOptions
from berthplan.states import State
from berthplan.transcription import build_nlp, linear_initial_guess


@pytest.fixture(scope="module")
def smoke_scenario():
    return load_scenario(bundled_path("scenario_smoke.yaml"))


@pytest.fixture(scope="module")
def random_template():
    return load_scenario(bundled_path("scenario_random_base.yaml"))


@pytest.fixture(scope="module")
def smoke_ladder(smoke_scenario):
    """One real planning ladder on the smoke scenario, shared by tests."""
    return sc.run_with_recomputation(
        smoke_scenario.spec, options=SolverOptions(max_iterations=200),
        attempts=4, seed=7)


class TestCaseCatalog:
    def test_case1_row(self):
        c = sc.case_config(1)
        assert c.start == State(x0=60.0, y0=0.0, psi=3.14, u_s=0.74,
                                v_m=0.0, r=0.0)
        assert c.wind.gamma_t == pytest.approx(0.0)
        assert c.wind.speed == 1.0

    def test_case4_row(self):
        c = sc.case_config(4)
        assert c.start == State(x0=52.8, y0=-10.0, psi=1.57, u_s=0.47,
                                v_m=0.0, r=0.0)
        assert c.wind.gamma_t == pytest.approx(np.deg2rad(45.0))
        assert c.wind.speed == 0.25

    def test_case6_row(self):
        c = sc.case_config(6)
        assert c.start == State(x0=28.8, y0=0.0, psi=3.14, u_s=0.29,
                                v_m=0.0, r=0.0)
        assert c.wind.gamma_t == pytest.approx(np.deg2rad(315.0))
        assert c.wind.speed == 0.75

    def test_all_six_present(self):
        ids = [sc.case_config(i).case_id for i in range(1, 7)]
        assert ids == [1, 2, 3, 4, 5, 6]

    @pytest.mark.parametrize("bad", [0, 7, -1, "one", None])
    def test_bad_ids_rejected(self, bad):
        with pytest.raises(ValueError):
            sc.case_config(bad)

    def test_case_scenario_replaces_start_and_wind(self):
        template = load_scenario(bundled_path("scenario_case1.yaml"))
        s = sc.case_scenario(4, template)
        assert s.spec.x0 == sc.case_config(4).start
        assert s.spec.wind == sc.case_config(4).wind
        # template itself is untouched
        assert template.spec.x0 == sc.case_config(1).start

    def test_case_scenario_windows_scale_with_distance(self):
        template = load_scenario(bundled_path("scenario_case1.yaml"))
        far = sc.case_scenario(3, template)   # ~58.5 m out
        near = sc.case_scenario(5, template)  # ~24.7 m out
        assert far.spec.tf_bounds[0] > near.spec.tf_bounds[0]
        assert far.spec.tf_bounds[1] > near.spec.tf_bounds[1]


class TestTravelTime:
    def test_midpoint_between_extremes(self, smoke_scenario):
        ship = smoke_scenario.spec.ship
        fast = sc.corridor_travel_time(40.0, ship, fraction=1.0)
        mid = sc.corridor_travel_time(40.0, ship, fraction=0.5)
        slow = sc.corridor_travel_time(40.0, ship, fraction=0.0)
        assert fast < mid < slow

    def test_monotone_in_distance(self, smoke_scenario):
        ship = smoke_scenario.spec.ship
        times = [sc.corridor_travel_time(d, ship) for d in (10, 20, 40, 80)]
        assert all(a < b for a, b in zip(times, times[1:]))

    def test_zero_inside_stop_radius(self, smoke_scenario):
        assert sc.corridor_travel_time(0.3, smoke_scenario.spec.ship) == 0.0

    def test_suggested_window_brackets_midpoint(self, smoke_scenario):
        ship = smoke_scenario.spec.ship
        lo, hi = sc.suggest_tf_bounds(60.0, ship)
        mid = sc.corridor_travel_time(60.0, ship)
        assert lo < mid < hi
        assert lo % 50 == 0 and hi % 50 == 0

    def test_substeps_respect_stability(self):
        m = sc.suggest_substeps(2800.0, 30, 0.8)
        # resulting step must sit under the stability bound for |u| = 0.8
        assert 2800.0 / (30 * m) <= 2.78 * 1.0577 / 0.8
        assert sc.suggest_substeps(100.0, 10, 0.1) >= 1


class _ScriptedRng:
    """Replays a fixed list of uniform draws and records the ranges."""

    def __init__(self, values):
        self.values = list(values)
        self.calls = []

    def uniform(self, lo, hi):
        self.calls.append((lo, hi))
        return self.values.pop(0)


class TestMultiplierDraw:
    def test_conditional_branch_low_x_positive_y_multiplier(self):
        # v1 = 0.8 and v3 = 2.0 select the first heading range
        rng = _ScriptedRng([0.8, 1.0, 2.0, 0.5, 0.6, 0.5])
        v = sc.draw_multiplier(rng)
        assert rng.calls[4] == (0.5, 0.85)
        assert v[0] == 0.8 and v[2] == 2.0 and v[4] == 0.6

    def test_conditional_branch_low_x_negative_y_multiplier(self):
        rng = _ScriptedRng([0.8, 1.0, -2.0, 0.5, 1.4, 0.5])
        sc.draw_multiplier(rng)
        assert rng.calls[4] == (1.35, 1.5)

    def test_conditional_branch_far_x_negative_y_multiplier(self):
        rng = _ScriptedRng([2.0, 1.0, -2.0, 0.5, 1.2, 0.5])
        sc.draw_multiplier(rng)
        assert rng.calls[4] == (1.0, 1.5)

    def test_conditional_branch_default(self):
        rng = _ScriptedRng([2.0, 1.0, 2.0, 0.5, 0.7, 0.5])
        sc.draw_multiplier(rng)
        assert rng.calls[4] == (0.5, 1.0)

    def test_ranges_and_branch_coverage(self):
        rng = np.random.default_rng(20260823)
        draws = np.array([sc.draw_multiplier(rng) for _ in range(10000)])
        lows = [0.2, 0.2, -6.0, 0.1, 0.5, 0.1]
        highs = [3.0, 2.54, 4.0, 1.0, 1.5, 1.0]
        assert np.all(draws >= lows) and np.all(draws <= highs)
        v1, v3, v5 = draws[:, 0], draws[:, 2], draws[:, 4]
        b1 = (v1 <= 1.0) & (v3 >= 0.0)
        b2 = (v1 < 1.0) & (v3 < 0.0)
        b3 = (v1 > 1.0) & (v3 < 0.0)
        b4 = ~(b1 | b2 | b3)
        for mask, lo, hi in ((b1, 0.5, 0.85), (b2, 1.35, 1.5),
                             (b3, 1.0, 1.5), (b4, 0.5, 1.0)):
            assert np.count_nonzero(mask) > 100
            assert np.all((v5[mask] >= lo) & (v5[mask] <= hi))

    def test_speed_multiplier_marginal_uniform(self):
        rng = np.random.default_rng(99)
        v2 = np.array([sc.draw_multiplier(rng)[1] for _ in range(10000)])
        result = stats.kstest(v2, stats.uniform(0.2, 2.54 - 0.2).cdf)
        assert result.pvalue > 0.01


class TestGenerator:
    def test_base_start_is_not_admissible(self, random_template):
        # the unscaled base start is far above the corridor at 24.5 m
        base = sc._start_from_multipliers(np.ones(6))
        assert not sc.start_admissible(base, random_template.spec)

    def test_accepted_case_passes_independent_recheck(self, random_template):
        case = sc.generate_random_case(3, template=random_template)
        spec = random_template.spec
        arr = case.start.as_array()
        winding = collision_residuals(arr, spec.basin, spec.domain)
        corridor = corridor_residuals(arr, spec.berth_point, spec.ship,
                                      spec.coefficients)
        assert np.min(winding) >= -1e-6
        assert np.min(corridor) >= 0.0
        assert case.draws >= 1

    def test_determinism(self, random_template):
        a = sc.generate_random_case(11, template=random_template)
        b = sc.generate_random_case(11, template=random_template)
        assert np.array_equal(a.multipliers, b.multipliers)
        assert a.start == b.start
        assert a.wind == b.wind and a.draws == b.draws

    def test_wind_ranges(self, random_template):
        for seed in range(5):
            case = sc.generate_random_case(seed, template=random_template)
            assert 0.0 <= case.wind.gamma_t <= 2.0 * np.pi
            assert 0.0 <= case.wind.speed <= 1.0

    def test_draw_cap_raises(self, random_template):
        from dataclasses import replace
        # an empty corridor makes every draw inadmissible
        from berthplan.constraints import SpeedLimitCoefficients
        tiny = SpeedLimitCoefficients(
            lower=(1e-9, 1e-9, 1e-9), upper=(2e-9, 2e-9, 2e-9))
        spec = replace(random_template.spec, coefficients=tiny)
        template = replace(random_template, spec=spec)
        with pytest.raises(RuntimeError, match="no admissible start"):
            sc.generate_random_case(0, template=template, max_draws=50)

    def test_random_case_scenario_window(self, random_template):
        case = sc.generate_random_case(5, template=random_template)
        scn = sc.random_case_scenario(case, random_template)
        d0 = np.hypot(case.start.x0 - scn.spec.berth_point[0],
                      case.start.y0 - scn.spec.berth_point[1])
        lo, hi = scn.spec.tf_bounds
        assert lo < sc.corridor_travel_time(d0, scn.spec.ship) < hi
        assert scn.spec.x0 == case.start


class TestRecomputation:
    def test_redraw_touches_only_controls(self, smoke_scenario):
        spec = smoke_scenario.spec
        base = linear_initial_guess(spec)
        rng = np.random.default_rng(1)
        redrawn = sc.redraw_controls(base, spec, rng)
        lay = spec.layout
        assert np.array_equal(redrawn[:lay.control_slice.start],
                              base[:lay.control_slice.start])
        assert not np.array_equal(redrawn[lay.control_slice],
                                  base[lay.control_slice])

    def test_redraw_within_actuator_box(self, smoke_scenario):
        spec = smoke_scenario.spec
        base = linear_initial_guess(spec)
        rng = np.random.default_rng(2)
        lay = spec.layout
        act = spec.actuator_bounds
        channels = list(spec.control_channels)
        for _ in range(5):
            controls = sc.redraw_controls(base, spec, rng)[
                lay.control_slice].reshape(lay.n_segments, -1)
            assert np.all(controls >= act.lower[channels] - 1e-12)
            assert np.all(controls <= act.upper[channels] + 1e-12)

    def test_feasible_first_attempt_stops_ladder(self, smoke_ladder):
        assert len(smoke_ladder) == 1
        assert smoke_ladder[0].index == 0
        assert smoke_ladder[0].feasible

    def test_attempt_records_are_complete(self, smoke_ladder):
        a = smoke_ladder[0]
        assert a.status.startswith("feasible")
        assert a.iterations > 0 and a.wall_time > 0.0
        assert a.tf == pytest.approx(a.x[0])

    def test_all_attempts_used_when_infeasible(self, smoke_scenario):
        from dataclasses import replace
        # a final-time window far below the corridor travel time cannot
        # be reached; every attempt must fail and be recorded
        spec = replace(smoke_scenario.spec, tf_bounds=(60.0, 80.0),
                       substeps=4)
        results = sc.run_with_recomputation(
            spec, options=SolverOptions(max_iterations=25, stall_window=10),
            attempts=4, seed=3)
        assert len(results) == 4
        assert not any(r.feasible for r in results)

    def test_attempt_bounds_validated(self, smoke_scenario):
        with pytest.raises(ValueError):
            sc.run_with_recomputation(smoke_scenario.spec, attempts=5)
        with pytest.raises(ValueError):
            sc.run_with_recomputation(smoke_scenario.spec, attempts=0)


class TestAudit:
    def test_solved_plan_passes(self, smoke_scenario, smoke_ladder):
        checks = sc.audit_plan(smoke_scenario.spec, smoke_ladder[0].x)
        assert checks["ok"], checks
        assert checks["max_defect"] <= 1e-6
        assert checks["corridor_min"] >= -1e-6
        assert checks["winding_min"] >= -1e-6

    def test_linear_guess_fails(self, smoke_scenario):
        checks = sc.audit_plan(smoke_scenario.spec,
                               linear_initial_guess(smoke_scenario.spec))
        assert not checks["ok"]
        assert checks["max_defect"] > 1e-3


def _fake_report():
    attempts = [
        sc.PlanAttempt(index=0, status="infeasible", feasible=False,
                       iterations=10, objective=1.0, max_violation=0.1,
                       kkt=1.0, wall_time=2.5, tf=900.0,
                       x=np.zeros(3)),
        sc.PlanAttempt(index=1, status="feasible-optimal", feasible=True,
                       iterations=12, objective=0.0, max_violation=1e-9,
                       kkt=1e-7, wall_time=3.5, tf=950.0,
                       x=np.ones(3)),
    ]
    case = sc.RandomCase(seed=1, multipliers=np.ones(6),
                         start=State(24.0, -5.0, 3.14, 0.29, 0.0, 0.0),
                         wind=sc.WindCondition(0.0, 0.5), draws=4)
    rec0 = sc.CaseRecord(index=0, case=case, attempts=attempts,
                         feasible_attempt=1, wall_time=6.0)
    rec1 = sc.CaseRecord(index=1, case=case, attempts=attempts[:1],
                         feasible_attempt=None, wall_time=2.5)
    return sc.FeasibilityReport(n_cases=2, seed=5, scenario_name="t",
                                records=[rec0, rec1])


class TestReport:
    def test_rates_cumulative_and_monotone(self):
        report = _fake_report()
        rates = report.attempt_rates()
        assert rates == [0.0, 0.5, 0.5, 0.5]
        assert all(a <= b for a, b in zip(rates, rates[1:]))

    def test_canonical_excludes_timing(self):
        report = _fake_report()
        text = report.canonical_json()
        assert "wall_time" not in text
        assert "rates" in text and "multipliers" in text

    def test_canonical_invariant_to_wall_times(self):
        a = _fake_report()
        b = _fake_report()
        rec = b.records[0]
        b.records[0] = sc.CaseRecord(
            index=rec.index, case=rec.case, attempts=rec.attempts,
            feasible_attempt=rec.feasible_attempt, wall_time=999.0)
        assert a.canonical_json() == b.canonical_json()

    def test_full_dict_keeps_timing(self):
        report = _fake_report()
        data = report.to_dict()
        assert "wall_times" in data
        assert "wall_time" in data["cases"][0]

    def test_summary_lines(self):
        lines = _fake_report().summary_lines()
        assert any("attempt 0" in line for line in lines)

    def test_roundtrip_json(self, tmp_path):
        report = _fake_report()
        path = tmp_path / "report.json"
        report.to_json(path)
        import json
        data = json.loads(path.read_text())
        assert data["n_cases"] == 2
