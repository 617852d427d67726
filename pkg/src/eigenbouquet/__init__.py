"""eigenbouquet: symbolic-numeric resolution of eigenspace bundles.

Given a polynomial family of normal matrices over a parameter space, the
package builds the quadratic ideal cutting out the union of eigenspaces,
computes its maximal Fitting ideal, applies configured blowup charts until
the ideal is chart-wise principal, and on resolved charts extracts
orthogonal eigenspace sub-bundles, sampled orthonormal frames and
eigenvalue functions, each cross-validated by an independent floating-point
eigendecomposition.
"""

__version__ = "0.1.0"
