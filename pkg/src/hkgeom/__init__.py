"""hkgeom: exact lattice and quadratic-form arithmetic, period-domain and
twistor-conic geometry, chart-based Riemannian curvature numerics, and
counting generating functions, with cross-checked desk-scale computations.
"""

__version__ = "0.1.0"
