"""Shared exception types."""


class ContractViolation(ValueError):
    """An operation was called with arguments that break its contract."""


class ConfigError(ValueError):
    """A run configuration is malformed or contains unknown keys."""


class CheckpointError(RuntimeError):
    """A checkpoint archive is corrupt or incompatible with the requested model."""


class DataIOError(RuntimeError):
    """A dataset file is missing or unreadable; the message names the path."""
