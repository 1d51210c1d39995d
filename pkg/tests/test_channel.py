"""Unit tests for the Shannon-rate channel model."""

import logging
import math

import pytest

from src.errors import InvalidParameterError
from src.mobility import ChannelModel, ChannelParams, Position, shannon_rate, snr
from src.rng import stream


class TestShannonRate:
    """Test suite for snr() and shannon_rate()."""

    def test_unit_snr_gives_bandwidth(self):
        """Test SNR = 1 makes R equal to B."""
        params = ChannelParams(
            bandwidth_hz=10.0, ref_gain=1e-3, path_loss_exp=3.0, noise_power_w=1e-6
        )

        assert snr(1.0, 1.0, 10.0, params) == pytest.approx(1.0, rel=1e-12)
        assert shannon_rate(1.0, 1.0, 10.0, params) == pytest.approx(10.0, rel=1e-12)

    def test_vehicle_power_at_100m(self):
        """Test P=0.1 W, d=100 m, theta=2, alpha^2=1e-9 gives SNR 10."""
        params = ChannelParams(
            bandwidth_hz=1e7, ref_gain=1e-3, path_loss_exp=2.0, noise_power_w=1e-9
        )

        assert snr(0.1, 1.0, 100.0, params) == pytest.approx(10.0, rel=1e-12)
        assert shannon_rate(0.1, 1.0, 100.0, params) == pytest.approx(
            1e7 * math.log2(11.0), rel=1e-12
        )

    def test_rate_decreases_with_distance(self, rng):
        """Test doubling the distance strictly lowers the rate."""
        for _ in range(100):
            params = ChannelParams(
                bandwidth_hz=float(rng.uniform(1e5, 1e8)),
                ref_gain=float(rng.uniform(1e-5, 1e-2)),
                path_loss_exp=2.0,
                noise_power_w=float(rng.uniform(1e-14, 1e-9)),
            )
            power = float(rng.uniform(0.01, 2.0))
            dist = float(rng.uniform(1.0, 500.0))

            assert shannon_rate(power, 1.0, 2 * dist, params) < shannon_rate(
                power, 1.0, dist, params
            )

    def test_non_positive_power_rejected(self):
        """Test zero transmit power raises InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            shannon_rate(0.0, 1.0, 10.0, ChannelParams())

    @pytest.mark.parametrize(
        "field", ["bandwidth_hz", "ref_gain", "path_loss_exp", "noise_power_w"]
    )
    def test_non_positive_params_rejected(self, field):
        """Test every physical constant must be positive."""
        with pytest.raises(InvalidParameterError):
            ChannelParams(**{field: 0.0})

    def test_unknown_fading_rejected(self):
        """Test unknown fading models raise InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            ChannelParams(fading="rician")


class TestChannelModel:
    """Test suite for ChannelModel link rates."""

    @pytest.fixture
    def params(self):
        return ChannelParams(path_loss_exp=2.0, noise_power_w=1e-9)

    def test_uplink_and_downlink_differ_by_power(self, params):
        """Test the two directions differ only through transmit power."""
        model = ChannelModel(params, stream(0, "channel"))
        car, rsu = Position(0.0, 2.0), Position(100.0, 20.0, 10.0)

        up = model.transmission_rate("V000", car, 0.1, "R00", rsu, 0)
        down = model.transmission_rate("R00", rsu, 1.0, "V000", car, 0)

        dist = math.dist((0.0, 2.0, 0.0), (100.0, 20.0, 10.0))
        base = params.ref_gain * dist ** -2.0 / params.noise_power_w
        assert up == pytest.approx(params.bandwidth_hz * math.log2(1 + 0.1 * base), rel=1e-12)
        assert down == pytest.approx(params.bandwidth_hz * math.log2(1 + 1.0 * base), rel=1e-12)
        assert down > up

    def test_zero_distance_is_clamped(self, params, caplog):
        """Test co-located endpoints use the minimum distance and log it."""
        model = ChannelModel(params, stream(0, "channel"))
        here = Position(5.0)

        rate = model.transmission_rate("V000", here, 0.1, "V001", here, 3)

        assert rate == pytest.approx(shannon_rate(0.1, 1.0, 1.0, params), rel=1e-12)
        assert "clamped" in caplog.text

    def test_repeated_clamp_warns_once(self, params, caplog):
        """Test only the first clamp is a warning; later ones go to debug."""
        model = ChannelModel(params, stream(0, "channel"))
        here = Position(5.0)

        with caplog.at_level(logging.DEBUG, logger="src.mobility.channel"):
            for step in range(5):
                model.transmission_rate("V000", here, 0.1, "V001", here, step)

        clamps = [r for r in caplog.records if "clamped" in r.getMessage()]
        assert [r.levelno for r in clamps] == [logging.WARNING] + [logging.DEBUG] * 4

    def test_deterministic_fading_is_pure(self, params):
        """Test the same geometry always yields the same rate."""
        a = ChannelModel(params, stream(0, "channel"))
        b = ChannelModel(params, stream(99, "channel"))
        args = ("V000", Position(0.0), 0.1, "R00", Position(40.0, 20.0, 10.0), 7)

        assert a.transmission_rate(*args) == b.transmission_rate(*args)

    def test_exponential_fading_cached_within_step(self):
        """Test the realized gain is reused within a step and varies across steps."""
        params = ChannelParams(fading="exponential")
        model = ChannelModel(params, stream(0, "channel"))
        args = ("V000", Position(0.0), 0.1, "R00", Position(40.0, 20.0, 10.0))

        first = model.transmission_rate(*args, 1)
        again = model.transmission_rate(*args, 1)
        later = [model.transmission_rate(*args, step) for step in range(2, 6)]

        assert first == again
        assert any(rate != first for rate in later)

    def test_expected_rate_ignores_fading(self):
        """Test expected=True evaluates the link with unit gain."""
        params = ChannelParams(fading="exponential")
        model = ChannelModel(params, stream(0, "channel"))
        rx = Position(40.0, 20.0, 10.0)

        rate = model.transmission_rate("V000", Position(0.0), 0.1, "R00", rx, 1, expected=True)

        dist = math.dist((0.0, 0.0, 0.0), (40.0, 20.0, 10.0))
        assert rate == pytest.approx(shannon_rate(0.1, 1.0, dist, params), rel=1e-12)
