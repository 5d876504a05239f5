"""End-to-end tests for single runs and ensembles."""

import math

import pytest

from asuman_sim.bounds import asuman_ub, min_age_limit, single_node_age
import asuman_sim.experiments as experiments
from asuman_sim.engine import EventKind, SimConfig, simulate
from asuman_sim.experiments import derive_seed, replication_configs, run_ensemble, run_sweep
from asuman_sim.scenario import RunPlan, parse_scenario
from asuman_sim.topology import build_partial
from asuman_sim.types import (
    Asuman,
    AsumanFrozen,
    ConfigurationError,
    HeadLinks,
    InvalidArgumentError,
    RateProfile,
)
from tests.utils import clustered_spec, complete_spec, make_spec, ring_spec, scenario_doc, uniform_spec


class TestSimConfig:
    def test_default_warmup_is_a_fifth(self, small_spec):
        assert SimConfig(small_spec, horizon_epochs=100).warmup == 20

    def test_rejects_empty_horizon(self, small_spec):
        with pytest.raises(InvalidArgumentError):
            SimConfig(small_spec, horizon_epochs=0)

    def test_rejects_warmup_past_horizon(self, small_spec):
        with pytest.raises(InvalidArgumentError):
            SimConfig(small_spec, horizon_epochs=10, warmup_epochs=10)

    def test_rejects_negative_seed(self, small_spec):
        with pytest.raises(InvalidArgumentError):
            SimConfig(small_spec, horizon_epochs=10, seed=-1)


class TestSimulate:
    def test_same_seed_same_result(self, small_spec, seed):
        first = simulate(SimConfig(small_spec, horizon_epochs=80, seed=seed))
        second = simulate(SimConfig(small_spec, horizon_epochs=80, seed=seed))
        assert first.node_means == second.node_means
        assert first.event_counts == second.event_counts
        assert first.min_age_series == second.min_age_series

    def test_different_seeds_differ(self, small_spec):
        a = simulate(SimConfig(small_spec, horizon_epochs=80, seed=1))
        b = simulate(SimConfig(small_spec, horizon_epochs=80, seed=2))
        assert a.node_means != b.node_means

    def test_statistics_shape(self, small_spec, seed):
        stats = simulate(SimConfig(small_spec, horizon_epochs=60, seed=seed, replication=4))
        assert stats.n == 6
        assert stats.replication == 4
        assert stats.seed == seed
        assert stats.spec_key == small_spec.key()
        assert stats.window > 0
        assert all(a >= 0 for a in stats.node_means)
        assert stats.network_mean == pytest.approx(sum(stats.node_means) / 6)
        # Every completed epoch but the last is recorded.
        assert len(stats.min_age_series) == 59

    def test_invariants_hold_at_every_event(self, seed):
        spec = ring_spec(7)
        seen = set()

        def observer(event, state):
            seen.add(event.kind)
            versions = state.age.node_versions
            assert all(0 <= v <= state.age.source_version for v in versions)
            assert all(a >= 0 for a in state.age.ages)
            if event.kind is EventKind.GOSSIP:
                assert event.src in state.active_set
                assert event.dst in state.topology.neighbors(event.src)

        simulate(SimConfig(spec, horizon_epochs=100, seed=seed), observer=observer)
        assert {EventKind.SELF_UPDATE, EventKind.DIRECT, EventKind.GOSSIP} <= seen

    def test_trace_lines(self, seed):
        lines = []
        simulate(SimConfig(complete_spec(4), horizon_epochs=20, seed=seed), trace=lines.append)
        assert lines
        kinds = {k.value for k in EventKind}
        for line in lines:
            t, kind, src, dst, epoch = line.split()
            assert float(t) >= 0
            assert kind in kinds
            int(src), int(dst), int(epoch)

    def test_single_node_never_gossips(self, seed):
        stats = simulate(SimConfig(complete_spec(1), horizon_epochs=200, seed=seed))
        assert "gossip" not in stats.event_counts
        assert stats.network_mean >= 0

    def test_no_self_updates_keeps_ages_zero(self, seed):
        spec = complete_spec(4, lambda_e=0.0)
        stats = simulate(SimConfig(spec, horizon_epochs=10, seed=seed, time_budget=50.0))
        assert stats.node_means == (0.0, 0.0, 0.0, 0.0)
        assert stats.min_age_mean is None
        assert stats.window == pytest.approx(40.0)

    def test_uniform_has_no_not_min_fraction(self, seed):
        assert simulate(SimConfig(uniform_spec(5), horizon_epochs=50, seed=seed)).not_min_fraction is None

    def test_asuman_not_min_fraction(self, seed):
        stats = simulate(SimConfig(complete_spec(5), horizon_epochs=50, seed=seed))
        assert len(stats.not_min_fraction) == 5
        assert all(0.0 <= f <= 1.0 for f in stats.not_min_fraction)

    def test_partial_and_frozen_variants_run(self, seed):
        partial = make_spec(build_partial(8, 0.5))
        frozen = complete_spec(6, AsumanFrozen(1.0 / 6))
        for spec in (partial, frozen):
            assert simulate(SimConfig(spec, horizon_epochs=60, seed=seed)).network_mean >= 0

    @pytest.mark.parametrize("links", [HeadLinks.NONE, HeadLinks.RING, HeadLinks.COMPLETE])
    def test_clustered_runs_relay_heads_to_leaves(self, links, seed):
        spec = clustered_spec(3, 3, links)
        stats = simulate(SimConfig(spec, horizon_epochs=80, seed=seed))
        assert stats.event_counts.get("relay", 0) > 0
        assert stats.n == 12
        assert math.isnan(stats.not_min_fraction[spec.topology.heads[0]]) == (links is not HeadLinks.COMPLETE)

    def test_invalid_spec_raises_before_running(self):
        spec = complete_spec(3, profile=RateProfile((1.0, 1.0, 1.0)))
        with pytest.raises(ConfigurationError):
            simulate(SimConfig(spec, horizon_epochs=10))


class TestEnsembles:
    def test_derive_seed_is_stable(self):
        assert derive_seed(0, 0, 0) == derive_seed(0, 0, 0)
        assert derive_seed(0, 0, 0) != derive_seed(0, 0, 1)
        assert derive_seed(0, 1, 0) != derive_seed(0, 0, 0)
        assert 0 <= derive_seed(2**70, 3, 4) < 2**63

    def test_replication_configs(self, small_spec):
        configs = replication_configs(small_spec, RunPlan(epochs=30, warmup_epochs=5, replications=3, seed=9))
        assert [c.replication for c in configs] == [0, 1, 2]
        assert [c.seed for c in configs] == [derive_seed(9, 0, r) for r in range(3)]
        assert all(c.warmup == 5 for c in configs)

    def test_run_ensemble(self, small_spec, seed):
        plan = RunPlan(epochs=40, warmup_epochs=8, replications=3, seed=seed)
        stats = run_ensemble(small_spec, plan)
        assert stats.replications == 3
        assert [r.replication for r in stats.runs] == [0, 1, 2]
        assert len(stats.node_stderr) == 6
        assert stats.spec_key == small_spec.key()

    def test_run_ensemble_rejects_jobs(self, small_spec):
        with pytest.raises(InvalidArgumentError):
            run_ensemble(small_spec, RunPlan(epochs=10, warmup_epochs=0, replications=1), jobs=0)

    def test_run_sweep_in_input_order(self):
        scenario = parse_scenario(scenario_doc(n=4, epochs=30, replications=2))
        points = run_sweep(scenario, "n", [6, 4])
        assert [p.value for p in points] == [6, 4]
        assert [p.scenario.spec.n for p in points] == [6, 4]
        assert points[1].stats.runs[0].seed == derive_seed(scenario.plan.seed, 1, 0)

    def test_sweep_submits_every_point_to_one_pool(self, monkeypatch):
        calls = []

        class InlinePool:
            def __init__(self, max_workers):
                calls.append(("workers", max_workers))

            def __enter__(self):
                return self

            def __exit__(self, *exc):
                return False

            def map(self, fn, items):
                items = list(items)
                calls.append(("tasks", len(items)))
                return map(fn, items)

        monkeypatch.setattr(experiments, "ProcessPoolExecutor", InlinePool)
        scenario = parse_scenario(scenario_doc(n=4, epochs=20, replications=1))
        points = run_sweep(scenario, "n", [4, 5, 6], jobs=4)
        assert calls == [("workers", 3), ("tasks", 3)]
        assert [p.stats.replications for p in points] == [1, 1, 1]

    def test_parallel_sweep_matches_serial(self):
        scenario = parse_scenario(scenario_doc(n=4, epochs=25, replications=2))
        serial = run_sweep(scenario, "n", [4, 5], jobs=1)
        parallel = run_sweep(scenario, "n", [4, 5], jobs=3)
        for a, b in zip(serial, parallel):
            assert [r.seed for r in a.stats.runs] == [r.seed for r in b.stats.runs]
            assert a.stats.network_mean == b.stats.network_mean
            assert list(a.stats.node_means) == list(b.stats.node_means)

    def test_sweep_rejects_jobs(self):
        scenario = parse_scenario(scenario_doc(n=4, epochs=10, replications=1))
        with pytest.raises(InvalidArgumentError):
            run_sweep(scenario, "n", [4], jobs=0)

    def test_policies_share_seeds_across_sweeps(self):
        asuman = parse_scenario(scenario_doc(n=4, epochs=20, replications=2))
        uniform = parse_scenario(scenario_doc(n=4, policy="uniform", epochs=20, replications=2))
        a = run_sweep(asuman, "n", [4, 5])
        u = run_sweep(uniform, "n", [4, 5])
        assert [r.seed for p in a for r in p.stats.runs] == [r.seed for p in u for r in p.stats.runs]


@pytest.mark.slow
class TestAgainstClosedForms:
    def test_single_node_age(self, seed):
        spec = complete_spec(1)
        stats = run_ensemble(spec, RunPlan(epochs=4000, warmup_epochs=400, replications=4, seed=seed))
        assert stats.network_mean == pytest.approx(single_node_age(1.0, 1.0), rel=0.15)

    def test_min_age_limit(self, seed):
        spec = complete_spec(10)
        stats = run_ensemble(spec, RunPlan(epochs=2000, warmup_epochs=400, replications=4, seed=seed))
        assert stats.min_age_mean == pytest.approx(min_age_limit(1.0, 1.0), abs=0.25)

    def test_asuman_below_finite_bound(self, seed):
        spec = complete_spec(20)
        stats = run_ensemble(spec, RunPlan(epochs=1500, warmup_epochs=300, replications=3, seed=seed))
        assert stats.lower_ci() <= asuman_ub(20, 20.0, 1.0, 1.0)

    def test_sensing_delay_costs_little_age(self, seed):
        plan = RunPlan(epochs=1500, warmup_epochs=300, replications=4, seed=seed)
        instant = run_ensemble(complete_spec(30, Asuman(0.0)), plan)
        sensed = run_ensemble(complete_spec(30, Asuman(1.0 / 30)), plan)
        spread = 3 * math.hypot(instant.network_stderr, sensed.network_stderr)
        assert abs(sensed.network_mean - instant.network_mean) <= 0.3 + spread
