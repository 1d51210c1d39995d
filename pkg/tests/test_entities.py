"""Unit tests for entity positions, distances and edge-server bookkeeping."""

import math

import pytest

from src.errors import EntityNotFoundError, InvalidParameterError, InvariantViolationError
from src.mobility import (
    EdgeServer,
    EntityRegistry,
    Position,
    RoadsideUnit,
    VehicleState,
    distance,
    server_id_for,
)


@pytest.fixture
def registry():
    """Two vehicles and one RSU on a 2000 m road."""
    return EntityRegistry(
        vehicles=[
            VehicleState("V000", Position(0.0, 2.0), 20.0, 1e8, 0.1),
            VehicleState("V001", Position(300.0, 6.0), 0.0, 1e8, 0.1),
        ],
        rsus=[RoadsideUnit("R00", Position(250.0, 20.0, 10.0), 1e10, 1.0)],
        wrap_length=2000.0,
    )


class TestPositions:
    """Test suite for position_at() and distance()."""

    def test_vehicle_moves_linearly(self, registry):
        """Test x = 0 + 20 m/s * 5 steps * 1 s = 100 m."""
        assert registry.position_at("V000", 5, 1.0) == Position(100.0, 2.0)

    def test_motion_is_linear_in_step(self, registry):
        """Test p(2k) - p(k) = p(k) - p(0)."""
        p0, p1, p2 = (registry.position_at("V000", k, 0.5).x for k in (0, 7, 14))

        assert p2 - p1 == pytest.approx(p1 - p0)

    def test_stationary_vehicle_stays_put(self, registry):
        """Test a zero-speed vehicle never moves."""
        assert all(
            registry.position_at("V001", k, 1.0) == Position(300.0, 6.0) for k in range(10)
        )

    def test_rsu_is_static(self, registry):
        """Test RSUs keep their initial position."""
        assert registry.position_at("R00", 999, 1.0) == Position(250.0, 20.0, 10.0)

    def test_vehicle_wraps_around_road(self, registry):
        """Test positions wrap modulo the road length."""
        assert registry.position_at("V000", 110, 1.0).x == pytest.approx(200.0)

    def test_unknown_entity(self, registry):
        """Test unknown ids raise EntityNotFoundError with the id."""
        with pytest.raises(EntityNotFoundError) as exc_info:
            registry.position_at("V999", 0, 1.0)

        assert "V999" in str(exc_info.value)

    def test_distance_triangle(self):
        """Test the 3-4-5 triangle and identical points."""
        assert distance(Position(0.0), Position(3.0, 4.0)) == 5.0
        assert distance(Position(1.0, 2.0, 3.0), Position(1.0, 2.0, 3.0)) == 0.0

    def test_distance_to_elevated_rsu(self):
        """Test a 20 m lateral, 10 m high offset gives sqrt(500)."""
        assert distance(Position(0.0), Position(0.0, 20.0, 10.0)) == pytest.approx(
            math.sqrt(500.0)
        )

    def test_non_finite_coordinate_rejected(self):
        """Test NaN coordinates raise InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            Position(float("nan"))

    def test_negative_speed_rejected(self):
        """Test vehicles cannot drive backwards."""
        with pytest.raises(InvalidParameterError):
            VehicleState("V000", Position(0.0), -1.0, 1e8, 0.1)


class TestEdgeServer:
    """Test suite for EdgeServer capacity bookkeeping."""

    def test_commit_and_release(self):
        """Test remaining capacity tracks commits and releases."""
        server = EdgeServer(server_id_for("R00"), "R00", 1e10)

        server.commit(4e9)
        server.commit(6e9)
        assert server.remaining == 0.0

        server.release(6e9)
        assert server.remaining == pytest.approx(6e9)

    def test_over_commit_raises(self):
        """Test committing beyond capacity raises InvariantViolationError."""
        server = EdgeServer("M-R00", "R00", 1e10, committed=9e9)

        with pytest.raises(InvariantViolationError) as exc_info:
            server.commit(2e9)

        assert "M-R00" in str(exc_info.value)

    def test_over_release_raises(self):
        """Test releasing more than committed raises InvariantViolationError."""
        server = EdgeServer("M-R00", "R00", 1e10, committed=1e9)

        with pytest.raises(InvariantViolationError):
            server.release(2e9)

    def test_release_snaps_rounding_residue(self):
        """Test float residue after releases resets to exactly zero."""
        server = EdgeServer("M-R00", "R00", 1.0)
        for amount in (0.1, 0.2, 0.3):
            server.commit(amount)
        for amount in (0.3, 0.2, 0.1):
            server.release(amount)

        assert server.committed == 0.0

    def test_negative_commit_rejected(self):
        """Test negative allocations raise InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            EdgeServer("M-R00", "R00", 1.0).commit(-0.5)

    def test_server_id_for_host(self):
        """Test server ids are derived from host ids."""
        assert server_id_for("V007") == "M-V007"
