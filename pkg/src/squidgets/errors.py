"""Exception hierarchy for the squidgets engine."""


class SquidgetError(Exception):
    """Base class for all engine errors."""


class GeometryError(SquidgetError):
    """Bad curve input: degenerate strokes, count mismatches, rank deficiency."""


class SceneError(SquidgetError):
    """Unknown objects or attributes, range violations, bad hierarchies."""


class GestureError(SquidgetError):
    """A stroke does not qualify for the requested create-mode operation."""


class SolveError(SquidgetError):
    """Scalar attribute search cannot run (missing range, bad target)."""


class SessionError(SquidgetError):
    """Malformed or out-of-order input events."""


class DocumentError(SquidgetError):
    """Scene document or event log cannot be parsed or fails its schema."""
