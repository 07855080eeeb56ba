"""Provenance-based access control with a four-valued decision algebra."""

__version__ = "0.1.0"
