"""Exception types raised by the simulator."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class StateIntegrityError(SimulationError):
    """A pose, command, or timestep contained a non-finite or invalid value."""


class DegenerateGeometryError(SimulationError):
    """A geometric query was made with coincident or unusable positions."""


class ScenarioError(SimulationError):
    """A scenario document failed validation."""


class ReplayMismatchError(SimulationError):
    """A recorded episode log could not be reproduced tick for tick."""
