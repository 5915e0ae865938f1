"""Univariate time-series forecasting with difference attention and error correction."""

__version__ = "0.1.0"
