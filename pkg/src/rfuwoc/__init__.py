"""Secrecy outage of two-hop decode-and-forward RF/underwater-optical links."""

__version__ = "0.1.0"
