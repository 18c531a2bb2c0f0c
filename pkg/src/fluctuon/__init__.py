"""Entropy production, entropic pressures and fluctuation relations.

Submodules: ``convex`` (Legendre transforms and structure data), ``markov``,
``meanfield``, ``ising``, ``tent`` (tent map and the square map),
``exponents`` (hypothesis testing) and ``cli``.
"""

__version__ = "0.1.0"
