"""Finite ultrafilter calculus, pattern witness search, sumsets and limits."""

__version__ = "0.1.0"
