from .base import StrictSerializer, describe_schema, flatten_errors
from .config import (
    EXPERIMENTS,
    SYSTEMS,
    ExperimentConfigSerializer,
    GeometrySerializer,
    LayoutSerializer,
    PairPotentialSerializer,
    ScheduleSerializer,
)

__all__ = [
    'EXPERIMENTS',
    'SYSTEMS',
    'StrictSerializer',
    'describe_schema',
    'flatten_errors',
    'ExperimentConfigSerializer',
    'GeometrySerializer',
    'LayoutSerializer',
    'PairPotentialSerializer',
    'ScheduleSerializer',
]
