"""Persistence layer (repositories).

Repositories read and write scenario/group TOML, field and curve CSV, report
JSON and the SQLite run archive.
"""
