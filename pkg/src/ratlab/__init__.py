"""Desk-scale lab: tiny transformer, redundancy-aware layer tuning, two-pass
key-value retrieval, instruction-data pipeline, and an evaluation harness."""

__version__ = "0.1.0"
