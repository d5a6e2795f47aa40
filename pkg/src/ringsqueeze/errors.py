"""Exception types shared across the package."""


class DomainError(ValueError):
    """A knob or parameter lies outside its allowed range."""

    def __init__(self, name: str, value, allowed: str):
        self.name = name
        self.value = value
        super().__init__(f"{name}={value!r} outside allowed range {allowed}")


class AliasingError(ValueError):
    """Time grid too coarse to resolve one ring round trip."""


class WindowError(RuntimeError):
    """An extremum sits on the boundary of the integration window."""


class IntegrationError(RuntimeError):
    """The ODE integrator failed to reach the end of the window."""


class InfeasibleError(RuntimeError):
    """No knob set in the search domain reaches the squeezing target.

    ``best_db`` and ``best_knobs`` record the best squeezing that was found.
    """

    def __init__(self, target_db: float, best_db: float, best_knobs: dict):
        self.target_db = target_db
        self.best_db = best_db
        self.best_knobs = dict(best_knobs)
        super().__init__(
            f"target {target_db:.3f} dB infeasible; best achievable "
            f"{best_db:.3f} dB at {self.best_knobs}"
        )


class ConfigError(ValueError):
    """Invalid run configuration; ``field`` is the dotted path of the culprit."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
