"""Exception types raised by the library."""


class ModrotorError(Exception):
    """Base class for all errors raised by this package."""


class AssemblyError(ModrotorError):
    """Structure assembly failed (grid collision, mixed frame sizes, degenerate map)."""


class AllocationError(ModrotorError):
    """Thrust allocation is impossible for the structure's actuation rank."""


class ControlDegeneracyError(ModrotorError):
    """Desired-attitude construction hit a degenerate input (vanishing thrust or alignment)."""


class IntegrationError(ModrotorError):
    """The integrator produced a non-finite state."""


class SimulationError(ModrotorError):
    """Closed-loop run aborted; message carries the failing timestep."""


class ConfigError(ModrotorError):
    """Configuration text failed to parse or validate."""
