"""Pure numerical rules.

Group law and norm, graph geometry, the intrinsic derivative, characteristics,
Lagrangian parameterizations and mollification. No I/O here; arrays in, arrays
or domain models out.
"""
