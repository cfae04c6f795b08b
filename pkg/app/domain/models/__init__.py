"""Domain models.

Dataclasses for groups, sampled fields, characteristics, parameterizations,
scenarios and verification reports.
"""
