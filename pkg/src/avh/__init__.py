"""Exact computations with AV-modules: the algebra A#U(V) of polynomials and
polynomial vector fields, its factorization D (x) U(L_+), growth of modules
and Grothendieck differentiability of the L_+-action.

All arithmetic is over the rationals (``fractions.Fraction``).
"""

__version__ = "0.1.0"
