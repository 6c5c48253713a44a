"""Test suite package root."""
