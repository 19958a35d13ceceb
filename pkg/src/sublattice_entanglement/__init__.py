"""Sublattice entanglement of quadratic fermionic Hamiltonians.

Submodules
----------
model        Hamiltonian builders, sublattice checks, Majorana map.
freefermion  Paired normal modes, eigenstate labels, correlation-matrix entropies.
majorana     Normal forms of antisymmetric matrices and covariance matrices.
fockoracle   Brute-force Fock-space reference, including interactions.
expcli       Experiment runner and command line interface.
"""

__version__ = "0.1.0"
