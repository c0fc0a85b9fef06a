"""Exact metric groups of skew-symmetric biextensions of the perfectized additive group.

Modules: ``gf`` (finite fields), ``ore`` (twisted Laurent polynomials),
``ppoly`` (Artin-Schreier solutions), ``biext`` (kernels, q and B, descent,
pullback), ``mgrp`` (metric groups, Witt classes, Gauss sums), ``cli``.
"""

from ._core import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
