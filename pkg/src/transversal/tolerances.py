"""Global numerical tolerances.

Strict inequalities are tested with a margin: ``lhs < rhs`` is accepted only
when ``lhs <= rhs - TOL_STRICT`` unless a caller asks for a different margin.
"""

TOL_FEAS = 1e-9
TOL_OBJ = 1e-8
TOL_MEMBER = 1e-9
TOL_STRICT = 1e-7
DYKSTRA_MAX_SWEEPS = 10_000
