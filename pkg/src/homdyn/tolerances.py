"""Numerical tolerances shared across modules.

Tests import these directly so a change here is visible everywhere.
"""

#: band around trace +-2 inside which an SL(2,R) element is treated as parabolic
TAU_CLS = 1e-8
#: |det - 1| allowed for group elements
DET_TOL = 1e-9
#: relative bound for Jordan reconstruction and commutation
JORDAN_REL = 1e-9
#: eigenvalues closer than this (relative) are merged into one generalized eigenspace
EIG_CLUSTER = 1e-6
#: nilpotency threshold for log/exp of unipotent/nilpotent matrices
NILPOTENT_TOL = 1e-8
#: ad-eigenvalues within this distance of an integer are snapped to it
WEIGHT_SNAP = 1e-8
#: rank cutoff for subspace computations (relative to the largest singular value)
RANK_TOL = 1e-9
#: membership residual for subalgebra tests
SUBSPACE_RESIDUAL = 1e-8
#: boundary slack for the fundamental domain
FD_BOUNDARY = 1e-12
#: zero threshold for quadratic-form eigenvalues, relative to ||B||
SIGNATURE_ZERO = 1e-10
#: |r1 - r2| below which joint divergence is reported as diagonal
JOINT_DIAGONAL = 1e-10
