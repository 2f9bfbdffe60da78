"""Error types shared across modules."""


class ConfigurationError(ValueError):
    """Invalid configuration: empty vocabularies, missing classes,
    inconsistent dimensions, unresolvable grid selections."""


class LeakageError(RuntimeError):
    """Test-period data reached a training path. Always fatal."""
