"""Service layer.

Services orchestrate domain rules + persistence (repositories) into the lab's
operations: group checks, field/datum construction and scenario runs.
"""
