"""Exact tools for positive graphs, Sidorenko counterexamples and graph codes."""

__version__ = "0.1.0"
