"""Tests for the bound registry, renderers and Monte-Carlo recurrences."""

import csv
import io

import numpy as np
import pytest

from asuman_sim.bounds import (
    BOUND_NAMES,
    BoundParams,
    RecurrenceParams,
    bound_table,
    evaluate_bound,
    mc_recurrence,
    min_age_series,
    render_csv,
    render_text,
    reports_as_dicts,
    ring_lb,
)
from asuman_sim.types import BoundKind, InvalidArgumentError


class TestBoundTable:
    def test_evaluate_named_bound(self):
        report = evaluate_bound("asuman-limit", BoundParams(lambda_e=2.0, lambda_total=1.0))
        assert report.value == 5.0
        assert report.kind is BoundKind.LIMIT
        assert report.parameters == {"lambda_e": 2.0, "lambda": 1.0}

    def test_asuman_ub_reports_default_capacity(self):
        report = evaluate_bound("asuman-ub", BoundParams(lambda_e=1.0, lambda_total=1.0, n=2))
        assert report.value == pytest.approx(2.0)
        assert report.parameters["B"] == 2.0

    def test_missing_parameter(self):
        with pytest.raises(InvalidArgumentError, match="--q"):
            evaluate_bound("partial-ub", BoundParams(lambda_e=1.0, lambda_total=1.0))

    def test_unknown_bound(self):
        with pytest.raises(InvalidArgumentError):
            evaluate_bound("nope", BoundParams(lambda_e=1.0, lambda_total=1.0))

    def test_table_skips_unset_and_invalid(self):
        params = BoundParams(lambda_e=1.0, lambda_total=1.0, n=100, q=0.5, c=10, p=0.5)
        values = {r.name: r.value for r in bound_table(params)}
        assert values["asuman-limit"] == pytest.approx(3.0)
        assert values["partial-ub"] == pytest.approx(11.0)
        assert values["cluster-leaf-limit"] == pytest.approx(8.0)
        assert values["disconnected-ub"] == pytest.approx(13.0)
        assert "min-age-mean" not in values
        assert "power-law-ub" not in values
        assert list(values) == [name for name in BOUND_NAMES if name in values]

    def test_table_drops_violated_preconditions(self):
        params = BoundParams(lambda_e=1.0, lambda_total=1.0, n=2)
        names = [r.name for r in bound_table(params)]
        assert "asuman-ub" in names
        assert "ring-lb" not in names

    def test_renderers(self):
        reports = bound_table(BoundParams(lambda_e=1.0, lambda_total=1.0))
        rows = list(csv.reader(io.StringIO(render_csv(reports))))
        assert rows[0] == ["name", "kind", "value", "params"]
        assert ["single-node", "exact", "1.0", "lambda_e=1 lambda=1"] in rows
        text = render_text(reports)
        assert text.splitlines()[0].startswith("name")
        dicts = reports_as_dicts(reports)
        assert dicts[0]["kind"] == "exact"
        assert render_text([]) == ""


class TestRecurrences:
    def test_min_age_matches_series(self):
        est = mc_recurrence("min_age", RecurrenceParams(1.0, 1.0), 20, 20000, seed=1)
        expected = min_age_series(20, 1.0, 1.0)
        assert est.k_max == 20
        assert est.mean[0] == 0.0
        assert np.all(np.abs(est.mean - expected) <= 4 * np.maximum(est.stderr, 1e-12))

    def test_reproducible(self):
        params = RecurrenceParams(1.0, 1.0, q=0.5)
        a = mc_recurrence("partial", params, 10, 200, seed=3)
        b = mc_recurrence("partial", params, 10, 200, seed=3)
        assert np.array_equal(a.mean, b.mean)

    def test_single_replication_has_nan_stderr(self):
        est = mc_recurrence("min_age", RecurrenceParams(1.0, 1.0), 5, 1)
        assert np.all(np.isnan(est.stderr))

    def test_cluster_min_age_reports_head_age(self):
        est = mc_recurrence("cluster_min_age", RecurrenceParams(1.0, 1.0, p=0.5, c=4), 40, 500, seed=2)
        assert est.extras["head_age_mean"] > 0

    @pytest.mark.parametrize(
        "kind, params",
        [
            ("partial", RecurrenceParams(1.0, 1.0)),
            ("ring", RecurrenceParams(1.0, 1.0)),
            ("cluster_min_age", RecurrenceParams(1.0, 1.0, p=0.5)),
            ("bogus", RecurrenceParams(1.0, 1.0)),
        ],
    )
    def test_missing_parameters(self, kind, params):
        with pytest.raises(InvalidArgumentError):
            mc_recurrence(kind, params, 5, 10)

    def test_finite_partial_needs_fanout(self):
        with pytest.raises(InvalidArgumentError):
            mc_recurrence("partial", RecurrenceParams(1.0, 1.0, n=3, q=0.4), 5, 10, limit=False)

    @pytest.mark.slow
    def test_sensing_tail_below_bound(self):
        est = mc_recurrence("sensing", RecurrenceParams(1.0, 1.0), 60, 20000, seed=5)
        assert est.tail_mean(30) <= 4.0 + 4 * float(np.max(est.stderr[30:]))

    def test_time_average_only_for_finite_sensing(self):
        limit = mc_recurrence("sensing", RecurrenceParams(1.0, 1.0), 20, 100, seed=3)
        assert "time_average" not in limit.extras
        params = RecurrenceParams(1.0, 1.0, n=20, c_coeff=0.05)
        finite = mc_recurrence("sensing", params, 20, 100, seed=3, limit=False)
        assert 0 < finite.extras["time_average"] < finite.tail_mean(10)
        assert finite.extras["time_average_stderr"] > 0

    def test_without_gossip_age_grows_one_per_epoch(self):
        params = RecurrenceParams(1.0, 1.0, n=10, gossip_capacity=0.0)
        est = mc_recurrence("sensing", params, 40, 200, seed=4, limit=False)
        # Epochs 20..39 are averaged, weighted by their lengths.
        assert est.extras["time_average"] == pytest.approx(29.5, abs=0.6)
        assert np.array_equal(est.mean[:4], [0.0, 1.0, 2.0, 3.0])


@pytest.mark.slow
class TestRecurrenceLimits:
    @pytest.mark.parametrize("lam_e, expected", [(1.0, 3.0), (2.0, 5.0)])
    def test_time_average_matches_asymptotic_bound(self, lam_e, expected):
        params = RecurrenceParams(lam_e, 1.0, n=100000, c_coeff=0.0)
        est = mc_recurrence("sensing", params, 80, 20000, seed=11, limit=False)
        tol = 4 * est.extras["time_average_stderr"] + 0.02
        assert est.extras["time_average"] == pytest.approx(expected, abs=tol)

    def test_sensing_delay_raises_finite_bound(self):
        def run(c_coeff):
            params = RecurrenceParams(2.0, 1.0, n=50, c_coeff=c_coeff)
            return mc_recurrence("sensing", params, 80, 20000, seed=12, limit=False).extras["time_average"]

        assert run(0.02) > run(0.0) + 0.1

    @pytest.mark.parametrize("n", [30, 60])
    def test_ring_tail_matches_closed_form(self, n):
        est = mc_recurrence("ring", RecurrenceParams(1.0, 1.0, n=n), 20 * n, 5000, seed=13)
        tail = est.tail_mean(10 * n)
        assert tail == pytest.approx(ring_lb(n, 1.0, 1.0), abs=4 * float(np.max(est.stderr[10 * n :])))
