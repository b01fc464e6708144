"""Explicitly named incremental computation: names, indices, types and effects."""

__version__ = "0.1.0"
