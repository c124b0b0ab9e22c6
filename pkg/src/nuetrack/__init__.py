"""Exact and certified computations around a taffy-puller construction of
non-uniquely ergodic laminations on the seven-punctured sphere."""

__version__ = "0.1.0"
