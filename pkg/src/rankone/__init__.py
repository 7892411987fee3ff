"""Numerical companion for rank-one Lie groups SO(n,1) and SU(n,1).

Orbit growth and critical exponents of discrete subgroups, spherical
functions and their decay bounds, exact L^p exponent bookkeeping, cusp
integrability exponents, and tree actions with their wall cocycles.
"""
__version__ = "0.1.0"
