"""Unit tests for context perturbation and the per-mode reporter."""

import numpy as np
import pytest

from src.errors import InvalidParameterError
from src.privacy import ContextReporter, Histogram, PerturbedContext, perturb_context
from src.rng import stream


class TestPerturbContext:
    """Test suite for perturb_context()."""

    @pytest.fixture
    def speed_hist(self):
        return Histogram.uniform(0.0, 100.0, 10, 50.0)

    def test_report_stays_in_true_bin(self, speed_hist, rng):
        """Test a true speed of 37.2 is reported inside [30, 40)."""
        for _ in range(1000):
            assert 30.0 <= perturb_context(37.2, speed_hist, rng) < 40.0

    def test_random_values_stay_in_their_bins(self, rng):
        """Test 10^4 random values over random grids are reported inside their bins."""
        for _ in range(10_000):
            lo = float(rng.uniform(-100.0, 100.0))
            hi = lo + float(rng.uniform(1.0, 2000.0))
            hist = Histogram.uniform(lo, hi, int(rng.integers(1, 200)), 1.0)
            value = float(rng.uniform(lo, hi))
            lo_edge, hi_edge = hist.bin_edges(hist.bin_of(value))

            reported = perturb_context(value, hist, rng)

            assert lo_edge <= reported < hi_edge

    def test_report_mean_is_bin_midpoint(self, speed_hist, rng):
        """Test 1e4 reports of 37.2 average near the bin midpoint 35."""
        reports = [perturb_context(37.2, speed_hist, rng) for _ in range(10000)]

        assert 34.7 < np.mean(reports) < 35.3

    def test_domain_lo_lands_in_first_bin(self, speed_hist, rng):
        """Test a value at domain_lo is reported in the first bin."""
        assert 0.0 <= perturb_context(0.0, speed_hist, rng) < 10.0

    def test_out_of_domain_is_clamped(self, speed_hist, rng):
        """Test values past domain_hi are reported in the last bin."""
        assert 90.0 <= perturb_context(250.0, speed_hist, rng) < 100.0

    def test_report_ignores_released_counts(self, rng):
        """Test the reported bin depends only on the true value."""
        skewed = Histogram(0.0, 100.0, np.array([100.0] + [0.0] * 9))

        assert 50.0 <= perturb_context(55.0, skewed, rng) < 60.0


class TestContextReporter:
    """Test suite for ContextReporter."""

    @pytest.fixture
    def make_reporter(self):
        """Factory fixture building a reporter over a 1000 m position domain."""
        def _make_reporter(mode, epsilon=5.0, seed=0):
            speeds = [10.0, 12.0, 15.0, 22.0, 25.0, 28.0]
            positions = [50.0, 120.0, 480.0, 700.0, 1200.0, 1950.0]
            return ContextReporter.from_release(
                mode,
                epsilon,
                speeds,
                positions,
                speed_domain=(0.0, 40.0),
                speed_bins=8,
                position_domain=(0.0, 1000.0),
                position_bins=20,
                mwem_iterations=5,
                query_depth=3,
                history_passes=0,
                release_rng=stream(seed, "privacy/release"),
                report_rng=stream(seed, "privacy/reports"),
            )
        return _make_reporter

    # ===== Mode Tests =====

    def test_none_mode_reports_truth(self, make_reporter):
        """Test mode none forwards the true speed and position."""
        reporter = make_reporter("none")

        context = reporter.report(17.5, 321.0)

        assert context == PerturbedContext(321.0, 17.5, 0.0)
        assert reporter.released is None

    def test_ldp_mode_reports_within_true_bins(self, make_reporter):
        """Test ldp reports share the true speed and position bins."""
        reporter = make_reporter("ldp")

        for _ in range(200):
            context = reporter.report(17.5, 321.0)
            assert 15.0 <= context.reported_speed < 20.0
            assert 300.0 <= context.reported_position < 350.0

    def test_ldp_report_resolves_like_truth(self, make_reporter):
        """Test ldp reports read at grid resolution equal the true context."""
        truth = make_reporter("none")
        private = make_reporter("ldp")

        expected = truth.resolve(truth.report(17.5, 1530.0))

        assert expected == (1525.0, 17.5)
        for _ in range(200):
            assert private.resolve(private.report(17.5, 1530.0)) == expected

    def test_ldp_release_keeps_mass(self, make_reporter):
        """Test the released histograms carry the true number of vehicles."""
        speed_hist, position_hist = make_reporter("ldp").released

        assert speed_hist.total == pytest.approx(6.0)
        assert position_hist.total == pytest.approx(6.0)
        assert position_hist.domain_hi == 1000.0

    def test_rr_mode_reports_inside_domain(self, make_reporter):
        """Test rr reports always land inside the histogram domains."""
        reporter = make_reporter("rr", epsilon=0.5)

        for _ in range(200):
            context = reporter.report(17.5, 321.0)
            assert 0.0 <= context.reported_speed < 40.0
            assert 0.0 <= context.reported_position < 1000.0

    def test_rr_large_budget_mostly_truthful(self, make_reporter):
        """Test rr with a large budget usually keeps the true bins."""
        reporter = make_reporter("rr", epsilon=40.0)

        hits = sum(
            15.0 <= reporter.report(17.5, 321.0).reported_speed < 20.0 for _ in range(200)
        )

        assert hits >= 195

    def test_position_beyond_domain_keeps_segment_offset(self, make_reporter):
        """Test a road position past the domain keeps its public segment offset."""
        reporter = make_reporter("ldp")

        context = reporter.report(17.5, 1530.0)

        assert context.segment_offset_m == 1000.0
        assert 1500.0 <= context.road_position < 1550.0

    def test_reports_deterministic_for_seed(self, make_reporter):
        """Test identical seeds give identical report sequences."""
        first = make_reporter("rr", seed=4)
        second = make_reporter("rr", seed=4)

        assert [first.report(20.0, 600.0) for _ in range(5)] == [
            second.report(20.0, 600.0) for _ in range(5)
        ]

    # ===== Error Tests =====

    def test_unknown_mode_rejected(self, rng):
        """Test an unknown mode raises InvalidParameterError."""
        grid = Histogram.uniform(0.0, 1.0, 2, 1.0)

        with pytest.raises(InvalidParameterError):
            ContextReporter("laplace", 1.0, grid, grid, rng)

    def test_non_positive_epsilon_rejected(self, rng):
        """Test epsilon <= 0 raises InvalidParameterError."""
        grid = Histogram.uniform(0.0, 1.0, 2, 1.0)

        with pytest.raises(InvalidParameterError):
            ContextReporter("rr", 0.0, grid, grid, rng)
