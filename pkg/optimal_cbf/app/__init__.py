"""Optimal control barrier functions under control bounds."""

__version__ = "0.1.0a1.dev"
