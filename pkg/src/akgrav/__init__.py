"""Symbolic derivation and numeric verification of N-connection splittings,
d-connections and the almost Kähler structures they induce."""

__version__ = "0.1.0"
