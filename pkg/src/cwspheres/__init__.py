"""Constant-displacement isometry analysis for homogeneous Randers spheres.

Library + CLI that constructs homogeneous Randers metrics on odd spheres,
certifies Killing fields of constant length through closed-form identities
and Monte-Carlo orbit sampling, and cross-checks displacement constancy of
the induced isometry flows with a brute-force geodesic-distance oracle.

Modules
-------
matrixcore
    Skew-Hermitian exponentials, eigenvalue phases, Haar U(n)/Sp(n),
    quaternion pairs, su(2) dictionary, seeded RNG streams.
randers
    Tangent vectors, metric parameter containers, norm evaluation, JSON.
cosets
    Coset model spaces, projection to the tangent model, orbit sampling,
    symplectic completions, closed-form symplectic orbit projection.
killing
    Closed-form metric solver and constant-length identities, orbit
    length reports, witness constructions.
flows
    Isometry flows, endpoint focusing, spectral phase-interval and
    commutator checkers, geodesic non-intersection probe.
geodesy
    Sampled sphere graphs and the shortest-path distance oracle.
cli
    Command-line front end.
"""

__version__ = "0.1.0"
