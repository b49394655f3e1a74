#!/usr/bin/env python3
"""Spectral resolutions, functional calculus, and the unitary group.

Builds a Hermitian matrix with a deliberately near-degenerate eigenvalue
pair, shows how clustering merges it into one stable projection, and then
drives the functional calculus: indicator projections, the one-parameter
unitary group, and the interchange of nested commutators with spectral
projections.
"""

import numpy as np

from derivlab import (
    borel_calculus,
    projection_commutation_check,
    spectral_projection,
    spectral_resolution,
    unitary_group,
)
from derivlab.numlin import frob

rng = np.random.default_rng(1)

# a 5x5 Hermitian matrix whose two smallest eigenvalues differ by 1e-12
values = np.array([1.0, 1.0 + 1e-12, 2.5, 4.0, 6.0])
g = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
q, _ = np.linalg.qr(g)
d = q @ np.diag(values) @ q.conj().T
d = (d + d.conj().T) / 2

res = spectral_resolution(d, cluster_tol=1e-8)
print("cluster representatives:", np.round(res.values, 6))
print("multiplicities:        ", [int(m) for m in res.multiplicities])
print("reconstruction error:  ", frob(d - res.reconstruct()))

# functional calculus: f = 1 gives the identity, f = id rebuilds D
print("\n|| f=1 applied - I ||   =", frob(borel_calculus(res, np.ones(res.n_clusters)) - np.eye(5)))
print("|| f=id applied - D ||  =", frob(borel_calculus(res, res.values) - d))

# an indicator of [2, 5] picks out the middle clusters
p = spectral_projection(res, [(2.0, 5.0)])
print("rank of the [2,5] spectral projection:", round(np.trace(p).real))

# the unitary group e^{itD}: group law and unitarity
u_s, u_t = unitary_group(res, 0.7), unitary_group(res, -0.2)
print("\ngroup law defect:", frob(u_s @ u_t - unitary_group(res, 0.5)))
print("unitarity defect:", frob(u_s.conj().T @ u_s - np.eye(5)))

# nested commutators with any spectral projection can be interchanged:
# [P, [D, x]] = [D, [P, x]] identically
x = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
print("\nprojection interchange residual:", projection_commutation_check(res, x))
