"""
tracefluct: a workbench for the second-order (fluctuation) statistics of
Gaussian and compound Wishart random matrices.

Three independently implemented engines compute the same limit covariances:

- ``theory``: sums over annular non-crossing pairings/permutations/partitions
  (built on ``perm``, ``annular``, ``algebra``);
- ``fock``: cyclic-Fock-space inner products of vacuum vectors;
- ``rmt``: exact finite-N oracles plus seeded Monte Carlo simulation.

Their agreement, together with the abstract freeness axioms in ``sof``, is
what the acceptance suite certifies.
"""

__version__ = "0.1.0"
