"""Shannon-rate transmission model with distance path loss and optional fading."""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from src.errors import InvalidParameterError
from src.mobility.entities import Position, distance

logger = logging.getLogger(__name__)

FADING_MODELS = ("deterministic", "exponential")


@dataclass(frozen=True)
class ChannelParams:
    """Link-level constants.

    Attributes:
        bandwidth_hz: Channel bandwidth B
        ref_gain: Reference path gain k0 at 1 m
        path_loss_exp: Path-loss exponent theta
        noise_power_w: Noise power (alpha squared)
        fading: ``deterministic`` (h = 1) or ``exponential`` (unit-mean power)
        min_distance_m: Distances below this are clamped
    """

    bandwidth_hz: float = 1.0e7
    ref_gain: float = 1.0e-3
    path_loss_exp: float = 3.0
    noise_power_w: float = 1.0e-13
    fading: str = "deterministic"
    min_distance_m: float = 1.0

    def __post_init__(self):
        positive = ("bandwidth_hz", "ref_gain", "path_loss_exp", "noise_power_w", "min_distance_m")
        for name in positive:
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"channel {name} must be positive")
        if self.fading not in FADING_MODELS:
            raise InvalidParameterError(
                f"channel fading must be one of {FADING_MODELS}, got '{self.fading}'"
            )


def snr(power_w: float, gain: float, dist_m: float, params: ChannelParams) -> float:
    """P * h * k0 * d^-theta / alpha^2."""
    return power_w * gain * params.ref_gain * dist_m ** (-params.path_loss_exp) / (
        params.noise_power_w
    )


def shannon_rate(power_w: float, gain: float, dist_m: float, params: ChannelParams) -> float:
    """R = B * log2(1 + SNR) in bit/s."""
    if not power_w > 0:
        raise InvalidParameterError(f"transmit power must be positive, got {power_w}")
    return params.bandwidth_hz * math.log2(1.0 + snr(power_w, gain, dist_m, params))


class ChannelModel:
    """Link rates between entities at a time step.

    Fading gains are drawn once per (tx, rx, step) and cached, so repeated
    queries within a step agree. The decision center's estimates use the
    expected gain (h = 1) through ``expected=True``.
    """

    def __init__(self, params: ChannelParams, rng: np.random.Generator):
        self.params = params
        self.rng = rng
        self._fading: Dict[Tuple[str, str, int], float] = {}
        self._cache_step = None
        self._warned_clamp = False

    def _gain(self, tx_id: str, rx_id: str, step: int) -> float:
        if self.params.fading == "deterministic":
            return 1.0
        if step != self._cache_step:
            self._fading.clear()
            self._cache_step = step
        key = (tx_id, rx_id, step)
        if key not in self._fading:
            self._fading[key] = float(self.rng.exponential(1.0))
        return self._fading[key]

    def transmission_rate(
        self,
        tx_id: str,
        tx_position: Position,
        tx_power: float,
        rx_id: str,
        rx_position: Position,
        step: int,
        expected: bool = False,
    ) -> float:
        """Rate in bit/s from ``tx`` to ``rx`` at ``step``.

        Args:
            tx_id: Transmitting entity id (fading cache key)
            tx_position: Transmitter position
            tx_power: Transmit power in W
            rx_id: Receiving entity id
            rx_position: Receiver position
            step: Time step t_k
            expected: Use h = 1 instead of the realized fading gain

        Returns:
            B * log2(1 + P h k0 d^-theta / alpha^2)
        """
        dist = distance(tx_position, rx_position)
        if dist < self.params.min_distance_m:
            log = logger.debug if self._warned_clamp else logger.warning
            log(
                "Link %s -> %s at step %d: distance %.3f m clamped to %.1f m",
                tx_id, rx_id, step, dist, self.params.min_distance_m,
            )
            self._warned_clamp = True
            dist = self.params.min_distance_m
        gain = 1.0 if expected else self._gain(tx_id, rx_id, step)
        return shannon_rate(tx_power, gain, dist, self.params)
