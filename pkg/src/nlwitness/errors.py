"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid run configuration or CLI input (exit code 2)."""


class NumericalContractError(RuntimeError):
    """A numerical invariant of the pipeline was violated (exit code 3)."""


class WitnessConstructionError(ValueError):
    """Witness construction failed: target separable or degenerate."""
