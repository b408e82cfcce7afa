"""Exact verification engine for the Gauss map of the anchor ring (torus)."""

__version__ = "0.1.0"
