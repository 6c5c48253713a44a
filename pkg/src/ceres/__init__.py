"""Probabilistic famine early-warning pipeline with prospective verification."""

__version__ = "0.1.0"
