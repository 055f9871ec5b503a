"""Activation sheaves, local homology and forwarding load for CSMA wireless networks."""

__version__ = "0.1.0"
