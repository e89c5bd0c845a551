"""Numerical toolkit for multipartite entanglement measures and their additivity."""

__version__ = "0.1.0"
