"""Exact-arithmetic toolkit for one-dimensional linear cellular automata.

Subpackages cover the symbol algebra over Z_p[u,1/u], automaton transforms
(rescaling, product, mirror, dual), Green-function rows and their
classification, the isolation property B(x,y,l,r), finite-scale sampling of
the scale-free characteristic set X_p, table-driven 2x2 substitution systems,
and the simulation-obstruction replay for the Gamma / Gamma^-1 pair.
"""

__version__ = "0.1.0"
