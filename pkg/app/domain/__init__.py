"""Domain layer.

Holds core business concepts (models, enums, exceptions) and pure business rules.
"""
