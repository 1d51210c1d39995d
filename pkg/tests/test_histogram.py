"""Unit tests for histograms and linear queries."""

import numpy as np
import pytest

from src.errors import InvalidParameterError
from src.privacy import Histogram, LinearQuery, dyadic_interval_queries, partition_queries


class TestHistogram:
    """Test suite for Histogram binning and I/O."""

    # ===== bin_of() Tests =====

    def test_bin_of_uses_floor_of_width(self):
        """Test bin index is floor((v - lo) / width)."""
        hist = Histogram.uniform(0.0, 100.0, 10, 10.0)

        assert hist.bin_of(37.2) == 3
        assert hist.bin_of(0.0) == 0
        assert hist.bin_of(99.999) == 9

    def test_bin_of_clamps_outside_domain(self):
        """Test values outside the domain map to the nearest bin."""
        hist = Histogram.uniform(0.0, 100.0, 10, 10.0)

        assert hist.bin_of(-5.0) == 0
        assert hist.bin_of(100.0) == 9
        assert hist.bin_of(1e9) == 9

    def test_bin_edges(self):
        """Test bin edges partition the domain."""
        hist = Histogram.uniform(0.0, 1000.0, 100, 1.0)

        assert hist.bin_edges(0) == (0.0, 10.0)
        assert hist.bin_edges(3) == (30.0, 40.0)

    # ===== Validation Tests =====

    def test_negative_counts_rejected(self):
        """Test that negative counts raise InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            Histogram(0.0, 1.0, np.array([1.0, -1.0]))

    def test_empty_domain_rejected(self):
        """Test that domain_hi <= domain_lo is rejected."""
        with pytest.raises(InvalidParameterError):
            Histogram(5.0, 5.0, np.array([1.0]))

    def test_zero_bins_rejected(self):
        """Test that a histogram needs at least one bin."""
        with pytest.raises(InvalidParameterError):
            Histogram(0.0, 1.0, np.array([]))

    def test_counts_are_read_only(self):
        """Test the stored counts cannot be mutated in place."""
        hist = Histogram.uniform(0.0, 1.0, 4, 4.0)

        with pytest.raises(ValueError):
            hist.counts[0] = 10.0

    # ===== Construction Tests =====

    def test_from_values_counts_and_clamps(self):
        """Test from_values bins observations and clamps outliers."""
        hist = Histogram.from_values([1.0, 15.0, 15.5, 250.0, -3.0], 0.0, 100.0, 10)

        assert hist.total == 5.0
        assert hist.counts[0] == 2.0
        assert hist.counts[1] == 2.0
        assert hist.counts[9] == 1.0

    def test_uniform_spreads_mass(self):
        """Test uniform histogram has equal counts summing to the mass."""
        hist = Histogram.uniform(0.0, 16.0, 16, 100.0)

        assert hist.total == pytest.approx(100.0)
        assert np.allclose(hist.counts, 6.25)

    # ===== Text Format Tests =====

    def test_from_text_parses_fixture(self, tmp_path):
        """Test loading the plain-text fixture format with comments."""
        path = tmp_path / "speeds.txt"
        path.write_text("# speed histogram\n0 100 4\n1\n2\n\n3\n4\n")

        hist = Histogram.from_text(path)

        assert (hist.domain_lo, hist.domain_hi, hist.bin_count) == (0.0, 100.0, 4)
        assert list(hist.counts) == [1.0, 2.0, 3.0, 4.0]

    def test_from_text_count_mismatch(self, tmp_path):
        """Test header/count mismatch raises InvalidParameterError."""
        path = tmp_path / "bad.txt"
        path.write_text("0 100 3\n1\n2\n")

        with pytest.raises(InvalidParameterError) as exc_info:
            Histogram.from_text(path)

        assert "3 bins" in str(exc_info.value)

    def test_from_text_bad_header(self, tmp_path):
        """Test a malformed header raises InvalidParameterError."""
        path = tmp_path / "bad.txt"
        path.write_text("0 100\n1\n")

        with pytest.raises(InvalidParameterError):
            Histogram.from_text(path)

    def test_text_format_preserves_counts(self, tmp_path):
        """Test to_text output loads back to the same histogram."""
        hist = Histogram(0.0, 1000.0, np.array([0.5, 1.25, 3.0]))
        path = tmp_path / "hist.txt"
        path.write_text(hist.to_text())

        loaded = Histogram.from_text(path)

        assert loaded.domain_hi == 1000.0
        assert np.array_equal(loaded.counts, hist.counts)


class TestLinearQuery:
    """Test suite for linear queries and query classes."""

    def test_evaluate_is_weighted_sum(self):
        """Test q(H) = sum of weight * count."""
        hist = Histogram(0.0, 4.0, np.array([1.0, 2.0, 3.0, 4.0]))
        query = LinearQuery(np.array([1.0, -1.0, 0.5, 0.0]))

        assert query.evaluate(hist) == pytest.approx(1.0 - 2.0 + 1.5)

    def test_weights_outside_unit_interval_rejected(self):
        """Test weights must lie in [-1, +1]."""
        with pytest.raises(InvalidParameterError):
            LinearQuery(np.array([0.0, 1.5]))

    def test_evaluate_length_mismatch(self):
        """Test evaluating against a histogram of a different size fails."""
        query = LinearQuery.interval(4, 0, 2)

        with pytest.raises(InvalidParameterError):
            query.evaluate(np.ones(3))

    def test_interval_indicator(self):
        """Test interval queries select [start, stop)."""
        query = LinearQuery.interval(5, 1, 3)

        assert list(query.weights) == [0.0, 1.0, 1.0, 0.0, 0.0]

    def test_dyadic_queries_power_of_two(self):
        """Test dyadic class on 16 bins to depth 3 has 1 + 2 + 4 + 8 queries."""
        queries = dyadic_interval_queries(16, 3)

        assert len(queries) == 15
        assert queries[0].weights.sum() == 16.0
        assert all(q.weights.sum() == 2.0 for q in queries[7:])

    def test_dyadic_queries_skip_duplicates(self):
        """Test intervals that round to the same bins are emitted once."""
        queries = dyadic_interval_queries(3, 4)
        spans = [tuple(np.flatnonzero(q.weights)) for q in queries]

        assert len(spans) == len(set(spans))

    def test_partition_queries_tile_domain(self):
        """Test 8 partition queries over 16 bins cover every bin once."""
        queries = partition_queries(16, 8)

        assert len(queries) == 8
        assert np.array_equal(sum(q.weights for q in queries), np.ones(16))
