"""States on M_n, the GNS construction, and the operator implementing a
derivation under an equilibrium state.

Conventions.  A state is omega(a) = tr(rho a) for a density matrix rho.
The GNS inner product <a, b> = omega(b* a) is linear in the first slot.
Derivations are normalized as delta(x) = [i g, x] for a Hermitian
generator g; the implementing operator S is defined on the dense (here:
full) domain pi(M_n) f by S pi(a) f = -i pi(delta(a)) f, which makes S
Hermitian exactly when omega is an equilibrium state, and gives the
implementation identity pi(delta(a)) = [iS, pi(a)].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .derivation import Superoperator, ad_superoperator, superoperator_stabilization_report
from .errors import NotDerivation, NotEquilibrium, NotFaithful, NotDensity
from .numlin import (
    DEFAULT_RANK_TOL,
    OperatorSubspace,
    as_cmatrix,
    frob,
    hermitian_eig,
    kron,
    require_hermitian,
    subspace_distance,
    unvec,
    vec,
)
from .spectral import spectral_resolution

FAITHFULNESS_TOL = 1e-10
EQUILIBRIUM_TOL = 1e-9
LEIBNIZ_TOL = 1e-9
STAR_TOL = 1e-10


@dataclass(frozen=True)
class State:
    """A state on M_n, stored through its density matrix."""

    rho: np.ndarray = field(repr=False)
    n: int
    faithful: bool
    min_eigenvalue: float

    def expectation(self, a) -> complex:
        return complex(np.trace(self.rho @ as_cmatrix(a)))


def state_from_density(rho, faithfulness_tol: float = FAITHFULNESS_TOL) -> State:
    """Validate a density matrix and wrap it as a State.

    Rejects non-Hermitian matrices, trace away from 1 by more than 1e-12,
    and eigenvalues below -1e-12.  The faithful flag records whether the
    smallest eigenvalue clears faithfulness_tol.
    """
    rho = as_cmatrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise NotDensity(f"density matrix must be square, got {rho.shape}")
    if frob(rho - rho.conj().T) > 1e-12 * max(1.0, frob(rho)):
        raise NotDensity("density matrix is not Hermitian")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > 1e-12:
        raise NotDensity(f"trace {tr} is not 1")
    w, _ = hermitian_eig(rho)
    if w.min() < -1e-12:
        raise NotDensity(f"negative eigenvalue {w.min():.3e}")
    return State(
        rho=rho,
        n=rho.shape[0],
        faithful=bool(w.min() > faithfulness_tol),
        min_eigenvalue=float(w.min()),
    )


@dataclass(frozen=True)
class Derivation:
    """A derivation of M_n: its superoperator plus provenance.

    kind is "inner" (map = ad_ig for a Hermitian generator) or "abstract"
    (a raw superoperator validated against the Leibniz rule and adjoint
    compatibility at construction).
    """

    ambient_dim: int
    map: Superoperator
    kind: str
    generator: np.ndarray | None = field(default=None, repr=False)


def _validate_derivation(sop: Superoperator, rng=None):
    rng = rng or np.random.default_rng(20240401)
    n = sop.ambient_dim
    for _ in range(4):
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        leibniz = sop.apply(x @ y) - sop.apply(x) @ y - x @ sop.apply(y)
        if frob(leibniz) > LEIBNIZ_TOL * (1.0 + frob(x) * frob(y)):
            raise NotDerivation(
                f"Leibniz residual {frob(leibniz):.3e} on a random pair"
            )
        star = sop.apply(x.conj().T) - sop.apply(x).conj().T
        if frob(star) > STAR_TOL * max(1.0, frob(x)):
            raise NotDerivation(f"adjoint-compatibility residual {frob(star):.3e}")


def inner_derivation(a) -> Derivation:
    """The derivation x -> [i a, x] of a Hermitian generator a."""
    a = require_hermitian(a)
    return Derivation(
        ambient_dim=a.shape[0],
        map=ad_superoperator(a),
        kind="inner",
        generator=a,
    )


def abstract_derivation(matrix) -> Derivation:
    """Wrap a raw n^2 x n^2 matrix as a derivation, rejecting maps that
    fail the Leibniz or adjoint checks (every derivation of M_n is inner,
    so near-derivations are detectable)."""
    matrix = as_cmatrix(matrix)
    n2 = matrix.shape[0]
    n = int(round(np.sqrt(n2)))
    if n * n != n2 or matrix.shape[1] != n2:
        raise NotDerivation(f"matrix of shape {matrix.shape} is not n^2 x n^2")
    sop = Superoperator(n, matrix, "abstract derivation")
    _validate_derivation(sop)
    return Derivation(ambient_dim=n, map=sop, kind="abstract")


def equilibrium_check(omega: State, delta: Derivation) -> float:
    """Max of |omega(delta(b))| over the n^2 matrix units b.

    For an inner derivation this residual is the largest entry of
    i[rho, generator]; it vanishes iff the state commutes with the
    generator.
    """
    if omega.n != delta.ambient_dim:
        raise NotEquilibrium(
            f"state on M_{omega.n} cannot pair with a derivation of "
            f"M_{delta.ambient_dim}"
        )
    # tr(rho delta(E_rc)) for all units rc in one matrix-vector product
    weights = vec(omega.rho.T) @ delta.map.matrix
    return float(np.max(np.abs(weights)))


@dataclass(frozen=True)
class GNSRepresentation:
    """The GNS triple (pi, H, f) of a faithful state on M_n.

    H is M_n with inner product omega(b* a), orthonormalized through the
    Gram factor R (so coordinates of a are R vec(a)); pi acts by left
    multiplication expressed in those coordinates; f is the class of the
    identity.
    """

    hilbert_dim: int
    state: State
    gram_factor: np.ndarray = field(repr=False)
    gram_factor_inv: np.ndarray = field(repr=False)
    cyclic_vector: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.state.n

    def embed(self, a) -> np.ndarray:
        """Coordinates of pi(a) f, i.e. of the class of a."""
        return self.gram_factor @ vec(a)

    def pi(self, a) -> np.ndarray:
        """The representation: left multiplication by a in GNS coordinates."""
        a = as_cmatrix(a)
        left = kron(np.eye(self.n), a)
        return self.gram_factor @ left @ self.gram_factor_inv

    def inner(self, u, v) -> complex:
        """Hilbert-space inner product, linear in the first argument."""
        return complex(np.vdot(v, u))


def gns_construct(omega: State) -> GNSRepresentation:
    """Build the GNS representation of a faithful state.

    The Gram matrix of the matrix units under omega(b* a) is rho^T (x) I;
    its Cholesky factor turns M_n into coordinates where the inner
    product is standard.  Non-faithful states are rejected (no quotient).
    """
    if not omega.faithful:
        raise NotFaithful(
            f"minimal eigenvalue {omega.min_eigenvalue:.3e} is below the "
            f"faithfulness tolerance; the quotient construction is unsupported"
        )
    n = omega.n
    gram = kron(omega.rho.T, np.eye(n))
    try:
        lower = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise NotFaithful(f"Gram matrix is not positive definite: {exc}") from exc
    r = lower.conj().T
    r_inv = scipy.linalg.solve_triangular(r, np.eye(n * n), lower=False)
    f = r @ vec(np.eye(n))
    return GNSRepresentation(
        hilbert_dim=n * n,
        state=omega,
        gram_factor=r,
        gram_factor_inv=r_inv,
        cyclic_vector=f,
    )


def implementing_operator(
    gns: GNSRepresentation, delta: Derivation
) -> tuple[np.ndarray, float]:
    """The operator S with S pi(a) f = -i pi(delta(a)) f, plus its
    symmetry defect ||S - S*||.

    Requires an equilibrium state (residual <= 1e-9); under that
    hypothesis S is Hermitian up to roundoff and satisfies
    pi(delta(a)) = [iS, pi(a)].
    """
    residual = equilibrium_check(gns.state, delta)
    if residual > EQUILIBRIUM_TOL:
        raise NotEquilibrium(
            f"equilibrium residual {residual:.3e} exceeds {EQUILIBRIUM_TOL:.1e}"
        )
    s = -1j * (gns.gram_factor @ delta.map.matrix @ gns.gram_factor_inv)
    return s, frob(s - s.conj().T)


def implementation_check(gns: GNSRepresentation, delta: Derivation, s) -> float:
    """Max over basis elements a and basis vectors h of
    ||pi(delta(a)) h - [iS, pi(a)] h||."""
    s = as_cmatrix(s)
    n = gns.n
    worst = 0.0
    for c in range(n):
        for r in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[r, c] = 1.0
            pa = gns.pi(unit)
            lhs = gns.pi(delta.map.apply(unit))
            rhs = 1j * (s @ pa - pa @ s)
            # column norms = residual on every coordinate basis vector h
            worst = max(worst, float(np.max(np.linalg.norm(lhs - rhs, axis=0))))
    return worst


def flow_intertwining_residual(
    gns: GNSRepresentation, delta: Derivation, s, t: float
) -> float:
    """Max over matrix units a of
    ||exp(iSt) pi(a) exp(-iSt) - pi(exp(t map)(a))||."""
    s = as_cmatrix(s)
    n = gns.n
    u = scipy.linalg.expm(1j * t * s)
    u_inv = scipy.linalg.expm(-1j * t * s)
    propagated = scipy.linalg.expm(t * delta.map.matrix)
    worst = 0.0
    for c in range(n):
        for r in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[r, c] = 1.0
            lhs = u @ gns.pi(unit) @ u_inv
            rhs = gns.pi(unvec(propagated @ vec(unit), n))
            worst = max(worst, frob(lhs - rhs))
    return worst


def kernel_correspondence_distance(
    gns: GNSRepresentation, delta: Derivation, s, rank_tol: float = DEFAULT_RANK_TOL
) -> float:
    """Distance between the kernel of [iS, .] restricted to the range of
    pi and the image under pi of ker(map).

    [iS, .] preserves the range of pi (that is the implementation
    identity), so the restriction is computed in an orthonormal basis of
    that range; both sides are compared as subspaces of the d x d matrix
    space, d = hilbert_dim.
    """
    s = as_cmatrix(s)
    n = gns.n
    d = gns.hilbert_dim

    units = []
    for c in range(n):
        for r in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[r, c] = 1.0
            units.append(unit)

    range_stack = np.stack([vec(gns.pi(u)) for u in units]).T  # (d^2, n^2)
    q, _ = np.linalg.qr(range_stack)
    range_basis = [unvec(q[:, j], d) for j in range(q.shape[1])]

    # matrix of [iS, .] in the orthonormal range basis
    restricted = np.zeros((len(range_basis), len(range_basis)), dtype=complex)
    for j, b in enumerate(range_basis):
        image = 1j * (s @ b - b @ s)
        for i, c in enumerate(range_basis):
            restricted[i, j] = np.vdot(c, image)

    _, sing, null = np.linalg.svd(restricted)
    smax = sing[0] if sing.size else 0.0
    rank = int(np.sum(sing > rank_tol * max(smax, 1.0)))
    kernel_mats = []
    for row in null[rank:]:
        mat = sum(coef * b for coef, b in zip(row.conj(), range_basis))
        kernel_mats.append(mat)
    restricted_kernel = OperatorSubspace.from_spanning(d, kernel_mats)

    map_kernel = delta.map.kernel(rank_tol)
    pushed = OperatorSubspace.from_spanning(
        d, [gns.pi(b) for b in map_kernel.basis]
    )
    return subspace_distance(restricted_kernel, pushed)


def abstract_kernel_stabilization(
    delta: Derivation,
    n_max: int,
    rank_tol: float = DEFAULT_RANK_TOL,
    distance_tol: float = 1e-8,
):
    """Kernel stabilization report for an arbitrary derivation's map."""
    spectrum = multiplicities = None
    if delta.kind == "inner" and delta.generator is not None:
        res = spectral_resolution(delta.generator)
        spectrum = tuple(float(v) for v in res.values)
        multiplicities = tuple(int(m) for m in res.multiplicities)
    return superoperator_stabilization_report(
        delta.map,
        n_max,
        rank_tol=rank_tol,
        distance_tol=distance_tol,
        spectrum=spectrum,
        multiplicities=multiplicities,
    )


def analytic_norm_series(delta: Derivation, a, t: float, k_max: int) -> np.ndarray:
    """Partial sums of sum_k t^k / k! ||delta^k(a)|| for k <= k_max.

    Bounded by ||a|| exp(t ||map||), so every matrix is an analytic
    vector at finite dimension.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    a = as_cmatrix(a)
    term = a
    total = frob(a)
    partial = [total]
    factorial = 1.0
    for k in range(1, k_max + 1):
        term = delta.map.apply(term)
        factorial *= k
        total += t**k / factorial * frob(term)
        partial.append(total)
    return np.asarray(partial)


def br_experiment(config: dict) -> dict:
    """Run the full implementing-operator pipeline from a JSON-style dict
    {"n", "rho", "generator", "n_max", "tolerances"} and return a report
    envelope with identity "BR_implementation"."""
    from . import numlin

    n = int(config["n"])
    rho = numlin.matrix_from_json(config["rho"])
    generator = numlin.matrix_from_json(config["generator"])
    n_max = int(config.get("n_max", 5))
    tol = {
        "rank": DEFAULT_RANK_TOL,
        "subspace": 1e-8,
        "residual": EQUILIBRIUM_TOL,
        **{k: float(v) for k, v in config.get("tolerances", {}).items()},
    }
    if rho.shape != (n, n) or generator.shape != (n, n):
        raise NotDensity(f"matrices do not match n={n}")

    omega = state_from_density(rho)
    delta = inner_derivation(generator)
    eq_residual = equilibrium_check(omega, delta)
    gns = gns_construct(omega)
    s, symmetry = implementing_operator(gns, delta)
    impl = implementation_check(gns, delta, s)
    stab = abstract_kernel_stabilization(
        delta, n_max, rank_tol=tol["rank"], distance_tol=tol["subspace"]
    )
    passed = (
        eq_residual <= tol["residual"]
        and symmetry <= tol["residual"]
        and impl <= tol["residual"]
        and stab.passed
    )
    return {
        "identity": "BR_implementation",
        "n": n,
        "equilibrium_residual": eq_residual,
        "symmetry_residual": symmetry,
        "implementation_residual": impl,
        "kernel_dims": list(stab.kernel_dims),
        "distances": list(stab.distances),
        "pass": bool(passed),
        "tolerances": tol,
    }
