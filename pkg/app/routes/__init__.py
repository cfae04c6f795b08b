"""Flask route blueprints.

This package contains the HTTP layer (Flask blueprints) of the lab's JSON API.
"""
