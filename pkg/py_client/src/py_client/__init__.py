"""Thin HTTP client for the reward service plus group-advantage computation."""

from .client import (
    DEFAULT_URL_ENV,
    RewardClient,
    RewardServiceError,
    group_advantages,
)

__all__ = [
    "DEFAULT_URL_ENV",
    "RewardClient",
    "RewardServiceError",
    "group_advantages",
]

__version__ = "0.1.0"
