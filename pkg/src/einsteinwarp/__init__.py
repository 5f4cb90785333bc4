"""Gradient Einstein-type warped products: construction, verification, classification."""

__version__ = "0.1.0"
