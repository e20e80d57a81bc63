"""Combinatorics of Arthur packets for classical p-adic groups."""

__version__ = "0.1.0"
