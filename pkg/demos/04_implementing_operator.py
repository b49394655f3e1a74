#!/usr/bin/env python3
"""From an equilibrium state to a Hermitian implementing operator.

A state omega with omega(delta(a)) = 0 for every a turns the GNS
representation of omega into a stage where the derivation delta acts as a
commutator with a single Hermitian operator S.  The script builds the
representation, extracts S, and confirms the implementation identity, the
flow intertwining, and kernel stabilization transported through pi.
"""

import numpy as np

from derivlab import (
    abstract_kernel_stabilization,
    analytic_norm_series,
    equilibrium_check,
    gns_construct,
    implementation_check,
    implementing_operator,
    inner_derivation,
    state_from_density,
)
from derivlab.gns import flow_intertwining_residual, kernel_correspondence_distance
from derivlab.numlin import frob

# a faithful state and a generator diagonal in the same basis: the state
# commutes with the generator, which is exactly the equilibrium condition
rng = np.random.default_rng(3)
g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
u, _ = np.linalg.qr(g)
p = np.array([0.4, 0.3, 0.2, 0.1])
rho = u @ np.diag(p) @ u.conj().T
a = u @ np.diag([0.0, 1.0, 1.0, 3.0]) @ u.conj().T

omega = state_from_density((rho + rho.conj().T) / 2)
delta = inner_derivation((a + a.conj().T) / 2)
print("equilibrium residual max_b |omega(delta(b))| =",
      equilibrium_check(omega, delta))

rep = gns_construct(omega)
print("GNS space dimension:", rep.hilbert_dim)
print("<f, f> =", rep.inner(rep.cyclic_vector, rep.cyclic_vector).real)

s, symmetry = implementing_operator(rep, delta)
print("\n||S - S*|| =", symmetry)
print("spectrum of S:", np.round(np.linalg.eigvalsh((s + s.conj().T) / 2), 6))
print("implementation residual ||pi(delta(a)) - [iS, pi(a)]|| =",
      implementation_check(rep, delta, s))

for t in (0.5, 1.0):
    print(f"flow intertwining residual at t={t}:",
          flow_intertwining_residual(rep, delta, s, t))

print("\nkernel correspondence distance:",
      kernel_correspondence_distance(rep, delta, s))

report = abstract_kernel_stabilization(delta, n_max=5)
print("kernel dims through power 5:", report.kernel_dims,
      "->", "PASS" if report.passed else "FAIL")

# every matrix is an analytic vector: the norm series converges
x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
sums = analytic_norm_series(delta, x, t=1.0, k_max=24)
print("\nanalytic norm series: first term", round(sums[0], 6),
      "limit", round(sums[-1], 6),
      "bound", round(frob(x) * np.exp(delta.map.norm()), 6))
