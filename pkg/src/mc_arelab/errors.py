"""Exception types shared across the package."""

from __future__ import annotations


class ParameterError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class SearchError(RuntimeError):
    """An iterative search could not bracket or reach its target.

    Raised for example when the response peak sits on the search-horizon
    boundary, or when a threshold scan exhausts its cap.
    """


class ConfigError(ParameterError):
    """A configuration value is invalid; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key
