"""Test suite package.

Contains unit, integration, API-level, E2E, and performance testing artifacts.
"""
