import math

import numpy as np
import pytest

from dwis import (
    DwisConfig,
    GridSpec,
    LevelScheme,
    build_field,
    deploy,
    fit_biharmonic,
    run_dwis,
    run_to_csv,
    spatial_phase,
    temporal_phase,
)

AREA = (0.0, 100.0, 0.0, 100.0)


@pytest.fixture(scope="module")
def small_setup():
    f = build_field(8, 8, 3.0, 10.0, area=AREA, seed=5)
    grid = GridSpec(*AREA, nx=30, ny=30)
    return f, grid


def small_sensors():
    return deploy(400, AREA, seed=7)


def small_config(**overrides):
    defaults = dict(scheme=LevelScheme.U_SG, mu=0.3, spatial_iters=6, seed=0, temporal_steps=0)
    defaults.update(overrides)
    return DwisConfig(**defaults)


class TestDwisConfig:
    def test_delta_min_defaults_to_hundredth(self):
        cfg = DwisConfig(delta0=0.5)
        assert cfg.delta_min == pytest.approx(0.005)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(mu=1.5),
            dict(mu=-0.1),
            dict(p=0),
            dict(m0=0),
            dict(delta0=0.0),
            dict(delta0=0.1, delta_min=0.2),
            dict(spatial_iters=0),
            dict(pilot_fraction=0.0),
            dict(temporal_steps=-1),
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            DwisConfig(**kwargs)


class TestSpatialPhase:
    def test_trajectory_invariants(self, small_setup):
        f, grid = small_setup
        sf = small_sensors()
        cfg = small_config()
        res = spatial_phase(f, sf, cfg, grid)

        # M schedule: m(k) = m0 + (k-1) p exactly
        for rec in res.records:
            assert rec.m == cfg.m0 + (rec.k - 1) * cfg.p

        # range monotonicity under the union rule
        ranges = [res.pilot.range_est] + [r.range_est for r in res.records]
        for (lo1, hi1), (lo2, hi2) in zip(ranges, ranges[1:]):
            assert lo2 <= lo1 and hi2 >= hi1

        # delta floor and first-two-iterations freeze
        assert res.records[0].delta == cfg.delta0
        assert res.records[1].delta == cfg.delta0
        for rec in res.records:
            assert rec.delta >= cfg.delta_min

        # cumulative cost bookkeeping, including the pilot
        running = res.pilot.cost
        assert res.pilot.cumulative_cost == running
        for rec in res.records:
            running += rec.cost
            assert rec.cumulative_cost == running
        assert running == len(sf.reported)  # report-once: ids never repeat

        assert res.final_m == res.records[-1].m
        assert res.final_delta == res.records[-1].delta

    def test_pilot_size_and_cost(self, small_setup):
        f, grid = small_setup
        sf = small_sensors()
        cfg = small_config(pilot_fraction=0.01)
        res = spatial_phase(f, sf, cfg, grid)
        assert res.pilot.cost == math.ceil(0.01 * 400)
        assert res.pilot.k == 0 and res.pilot.m == 0

    def test_requires_fresh_reported_set(self, small_setup):
        f, grid = small_setup
        sf = small_sensors()
        sf.reported.add(3)
        with pytest.raises(ValueError):
            spatial_phase(f, sf, small_config(), grid)

    def test_zero_reply_iterations_survive(self, small_setup):
        # margin so tight no sensor falls in any band: costs 0, recon reused
        f, grid = small_setup
        sf = small_sensors()
        cfg = small_config(delta0=1e-7, delta_min=1e-9)
        res = spatial_phase(f, sf, cfg, grid)
        assert all(r.cost == 0 for r in res.records)
        assert all(r.tracking_rmse == 0.0 for r in res.records)
        assert res.records[-1].cumulative_cost == res.pilot.cost

    def test_archive_refit_matches_public_fit(self, small_setup):
        f, grid = small_setup
        sf = small_sensors()
        res = spatial_phase(f, sf, small_config(spatial_iters=3), grid)
        reference = fit_biharmonic(res.archive_points, res.archive_values)
        np.testing.assert_allclose(res.model.weights, reference.weights, rtol=1e-9, atol=1e-12)

    def test_single_sensor_degenerate_instance(self, small_setup):
        f, grid = small_setup
        sf = deploy(1, AREA, seed=3)
        cfg = small_config(m0=1, p=1, spatial_iters=2, pilot_fraction=0.9)
        res = spatial_phase(f, sf, cfg, grid)
        assert res.pilot.cost == 1
        assert res.records[-1].cumulative_cost == 1  # report-once blocks re-reporting
        assert np.ptp(res.recon) == 0.0  # constant reconstruction at nodes

    def test_lm_fix_keeps_delta_fixed(self, small_setup):
        f, grid = small_setup
        sf = small_sensors()
        res = spatial_phase(f, sf, small_config(scheme=LevelScheme.LM_FIX, mu=0.7), grid)
        assert all(r.delta == res.pilot.delta for r in res.records)

    @pytest.mark.parametrize("scheme", list(LevelScheme))
    def test_all_schemes_run(self, small_setup, scheme):
        f, grid = small_setup
        sf = small_sensors()
        res = spatial_phase(f, sf, small_config(scheme=scheme, spatial_iters=4), grid)
        assert len(res.records) == 4
        assert all(np.isfinite(r.modeling_rmse) for r in res.records)


class TestTemporalPhase:
    def test_records_and_reset(self, small_setup):
        f, grid = small_setup
        sf = small_sensors()
        cfg = small_config(temporal_steps=4)
        spatial = spatial_phase(f, sf, cfg, grid)
        steps = temporal_phase(f, sf, spatial, cfg)
        assert len(steps) == 4
        assert all(s.m == spatial.final_m for s in steps)
        assert all(s.delta == spatial.final_delta for s in steps)
        cum = 0
        for s in steps:
            cum += s.cost
            assert s.cumulative_cost == cum

    def test_frozen_signal_stable_error(self, small_setup):
        f, grid = small_setup
        sf = small_sensors()
        cfg = small_config(temporal_steps=5, drift_sigma=0.0, amp_jitter=0.0)
        spatial = spatial_phase(f, sf, cfg, grid)
        steps = temporal_phase(f, sf, spatial, cfg)
        errs = [s.modeling_rmse for s in steps]
        assert max(errs) < 3 * max(min(errs), 1e-9) or max(errs) < 1.0

    def test_sensors_reply_again_after_each_update(self, small_setup):
        f, grid = small_setup
        sf = small_sensors()
        cfg = small_config(temporal_steps=3, drift_sigma=0.0, amp_jitter=0.0)
        spatial = spatial_phase(f, sf, cfg, grid)
        steps = temporal_phase(f, sf, spatial, cfg)
        # frozen field and identical levels each step: same sensors reply
        costs = [s.cost for s in steps]
        assert costs[0] > 0
        assert costs.count(costs[0]) == len(costs)

    @pytest.mark.parametrize("scheme", [LevelScheme.LM_SG, LevelScheme.LM_FIX])
    def test_lloydmax_schemes_track_drift(self, small_setup, scheme):
        f, grid = small_setup
        sf = small_sensors()
        cfg = small_config(scheme=scheme, spatial_iters=4, temporal_steps=3)
        spatial = spatial_phase(f, sf, cfg, grid)
        steps = temporal_phase(f, sf, spatial, cfg)
        assert len(steps) == 3
        assert all(np.isfinite(s.modeling_rmse) for s in steps)


class TestRunAndSerialization:
    def test_run_result_consistency(self, small_setup):
        f, grid = small_setup
        res = run_dwis(f, small_sensors(), small_config(temporal_steps=2), grid)
        assert res.final_m == res.spatial[-1].m
        assert res.final_delta == res.spatial[-1].delta
        assert len(res.temporal) == 2

    def test_csv_layout(self, small_setup):
        f, grid = small_setup
        res = run_dwis(f, small_sensors(), small_config(temporal_steps=1), grid)
        lines = run_to_csv(res).strip().splitlines()
        assert lines[0] == (
            "phase,k,m,delta,cost,cum_cost,tracking_rmse,modeling_rmse,range_lo,range_hi"
        )
        assert lines[1].startswith("pilot,0,0,")
        assert lines[2].startswith("spatial,1,3,")
        assert lines[-1].startswith("temporal,1,")

    def test_deterministic_rerun_byte_identical(self, small_setup):
        f, grid = small_setup
        cfg = small_config(temporal_steps=2)
        a = run_to_csv(run_dwis(f, small_sensors(), cfg, grid))
        b = run_to_csv(run_dwis(f, small_sensors(), cfg, grid))
        assert a == b

    def test_mu_changes_trajectory(self, small_setup):
        f, grid = small_setup
        a = run_to_csv(run_dwis(f, small_sensors(), small_config(mu=0.3), grid))
        b = run_to_csv(run_dwis(f, small_sensors(), small_config(mu=0.7), grid))
        assert a != b
