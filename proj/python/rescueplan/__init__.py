"""Python bindings for the rescueplan engine."""

from ._core import RescuePlanError, Session, format_program

__all__ = ["RescuePlanError", "Session", "format_program"]
