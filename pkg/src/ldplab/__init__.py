"""Locally private estimation: mechanisms, estimators, lower bounds and exact oracles."""

__version__ = "0.1.0"
