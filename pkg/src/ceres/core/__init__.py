"""Shared domain types, canonical serialization, and invariant checks."""
