# Mobility and channel package exports
from .channel import FADING_MODELS, ChannelModel, ChannelParams, shannon_rate, snr
from .entities import (
    EdgeServer,
    EntityRegistry,
    Position,
    RoadsideUnit,
    VehicleState,
    distance,
    server_id_for,
)

__all__ = [
    "FADING_MODELS",
    "ChannelModel",
    "ChannelParams",
    "shannon_rate",
    "snr",
    "EdgeServer",
    "EntityRegistry",
    "Position",
    "RoadsideUnit",
    "VehicleState",
    "distance",
    "server_id_for",
]
