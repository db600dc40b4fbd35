"""Highlight-driven live commentary for fighting games."""

__version__ = "0.1.0"
