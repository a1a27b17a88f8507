"""ulocal: exact local computations on GU(2,1) and GL3 over Q_l.

Layers: exactnum/ratfn (exact scalars and rational functions), grouptheory
(matrix models), cosetlab (coset canonicalization, decomposition, indices),
heckecore (Hecke algebras and actions), whitzeta (Whittaker tables and zeta
integrals), cyclicity (bimodule generation certificates), branching
(algebraic representations), cli (verification suites).
"""

__version__ = "0.1.0"
