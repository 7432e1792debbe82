"""Triad-position features for temporal graphs: node prominence and link prediction."""

__version__ = "0.1.0"
