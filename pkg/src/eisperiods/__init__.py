"""Exact and arbitrary-precision machinery for level-N Eisenstein series:
Fourier expansions, completed L-values, period cocycles on coset functions,
rationality certification, and lattice invariants of imaginary quadratic
orders.
"""

__version__ = "0.1.0"
