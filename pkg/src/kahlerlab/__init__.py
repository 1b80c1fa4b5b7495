"""kahlerlab: exact Chern-number arithmetic, toric delta estimators, radial
Kahler energy functionals, a twisted Kahler-Einstein solver, and curvature
diagnostics for canonical extensions, wrapped in a small compute service."""

__version__ = "0.1.0"
