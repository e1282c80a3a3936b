"""Linear stability of elliptic Lagrangian triangle orbits.

Numerical toolkit for the planar three-body triangle family parametrized by
the mass parameter beta in [0, 9] and eccentricity e in (-1, 1): monodromy
matrices and their stability classes, omega-Maslov-type indices by two
independent routes (operator Morse index and path crossing count), the
degeneracy curves in the (beta, e) plane, and the hyperbolic boundary.
"""

__version__ = "0.1.0"
