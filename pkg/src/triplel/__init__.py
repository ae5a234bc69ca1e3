"""Exact local and bookkeeping layers for triple product L-values."""

__version__ = "0.1.0"
