"""Routers for the public v1 endpoints."""
