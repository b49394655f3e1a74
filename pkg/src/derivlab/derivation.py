"""The commutator derivation ad_iD as a superoperator, its powers and
kernels, the flow alpha_t, and the differentiability checks.

At finite dimension every matrix is differentiable along the flow
alpha_t(x) = u(t) x u(-t): the uniform and weak notions of the derivative
coincide and are both realized by the bounded commutator map
x -> i(Dx - xD).  One object therefore carries both roles here, and the
difference-quotient check below certifies the limit in the strongest
(norm) sense.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroT
from .numlin import (
    DEFAULT_RANK_TOL,
    OperatorSubspace,
    as_cmatrix,
    frob,
    kron,
    nullspace,
    require_hermitian,
    subspace_distance,
    unvec,
    vec,
)
from .spectral import DEFAULT_CLUSTER_TOL, SpectralResolution, spectral_resolution, unitary_group

DEFAULT_DISTANCE_TOL = 1e-8
# geometric grid exposing first-order convergence without over/underflow
DEFAULT_T_GRID = tuple(1e-2 * 2.0**-j for j in range(7))


@dataclass(frozen=True)
class Superoperator:
    """A linear map on M_n stored as its n^2 x n^2 matrix acting on vec(x)."""

    ambient_dim: int
    matrix: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        m = as_cmatrix(self.matrix)
        n2 = self.ambient_dim**2
        if m.shape != (n2, n2):
            raise ValueError(
                f"superoperator matrix {m.shape} does not match ambient "
                f"dimension {self.ambient_dim}"
            )
        object.__setattr__(self, "matrix", m)

    def apply(self, x) -> np.ndarray:
        return unvec(self.matrix @ vec(x), self.ambient_dim)

    def power(self, k: int) -> "Superoperator":
        if k < 1:
            raise ValueError("power requires k >= 1")
        return Superoperator(
            self.ambient_dim,
            np.linalg.matrix_power(self.matrix, k),
            f"({self.label})^{k}" if self.label else f"power {k}",
        )

    def norm(self) -> float:
        """Operator 2-norm (largest singular value) of the map."""
        return float(np.linalg.norm(self.matrix, 2))

    def kernel(self, rank_tol: float = DEFAULT_RANK_TOL) -> OperatorSubspace:
        # scale floor 1: a map that is pure roundoff has full kernel
        return OperatorSubspace.from_vec_columns(
            self.ambient_dim, nullspace(self.matrix, rank_tol, scale=1.0)
        )


def ad_superoperator(d) -> Superoperator:
    """The superoperator of x -> i(Dx - xD) for Hermitian D.

    Under column stacking its matrix is i(I (x) D - D^T (x) I); the
    spectrum is {i(lambda_r - lambda_c)} over eigenvalue pairs of D.
    """
    d = require_hermitian(d)
    n = d.shape[0]
    eye = np.eye(n)
    mat = 1j * (kron(eye, d) - kron(d.T, eye))
    return Superoperator(n, mat, f"ad_i on M_{n}")


def ad_apply(d, x) -> np.ndarray:
    """Direct commutator formula i(Dx - xD), bypassing the superoperator."""
    d = as_cmatrix(d)
    x = as_cmatrix(x)
    return 1j * (d @ x - x @ d)


def iterated_commutator(d, x, k: int) -> np.ndarray:
    """k-fold nested commutator of x with iD, by repeated direct
    commutation.  For diagonal integer D the entries are exactly
    (i (d_r - d_c))^k x_rc, with no rounding on integer data."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = as_cmatrix(x)
    for _ in range(k):
        out = ad_apply(d, out)
    return out


def derivation_kernel(d, k: int = 1, rank_tol: float = DEFAULT_RANK_TOL) -> OperatorSubspace:
    """Kernel of the k-th power of ad_iD, as an HS-orthonormal subspace.

    Powers are taken on the superoperator matrix (one SVD per k); the
    nonzero singular values are |lambda_r - lambda_c|^k, so conditioning
    is governed by the spectral gaps of D.
    """
    return ad_superoperator(d).power(k).kernel(rank_tol)


@dataclass(frozen=True)
class KernelStabilizationReport:
    """Per-power kernel dimensions and distances to the first kernel."""

    ambient_dim: int
    k_values: tuple
    kernel_dims: tuple
    distances: tuple
    per_k_pass: tuple
    passed: bool
    rank_tol: float
    distance_tol: float
    spectrum: tuple | None = None
    multiplicities: tuple | None = None

    def to_json_dict(self) -> dict:
        return {
            "n": self.ambient_dim,
            "spectrum": list(self.spectrum) if self.spectrum is not None else None,
            "multiplicities": (
                list(self.multiplicities) if self.multiplicities is not None else None
            ),
            "k_values": list(self.k_values),
            "kernel_dims": list(self.kernel_dims),
            "distances": list(self.distances),
            "per_k_pass": list(self.per_k_pass),
            "pass": self.passed,
            "tolerances": {"rank": self.rank_tol, "subspace": self.distance_tol},
        }


def superoperator_stabilization_report(
    sop: Superoperator,
    n_max: int,
    rank_tol: float = DEFAULT_RANK_TOL,
    distance_tol: float = DEFAULT_DISTANCE_TOL,
    spectrum=None,
    multiplicities=None,
) -> KernelStabilizationReport:
    """Check ker(map^k) = ker(map) for k = 1..n_max.

    Failures are report content, never exceptions: each k gets a flag
    requiring equal dimension and subspace distance <= distance_tol.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    kernels = [sop.power(k).kernel(rank_tol) for k in range(1, n_max + 1)]
    base = kernels[0]
    dims = tuple(k.dim for k in kernels)
    dists = tuple(subspace_distance(k, base) for k in kernels)
    flags = tuple(
        dim == base.dim and dist <= distance_tol for dim, dist in zip(dims, dists)
    )
    return KernelStabilizationReport(
        ambient_dim=sop.ambient_dim,
        k_values=tuple(range(1, n_max + 1)),
        kernel_dims=dims,
        distances=dists,
        per_k_pass=flags,
        passed=all(flags),
        rank_tol=rank_tol,
        distance_tol=distance_tol,
        spectrum=spectrum,
        multiplicities=multiplicities,
    )


def kernel_stabilization_report(
    d,
    n_max: int,
    rank_tol: float = DEFAULT_RANK_TOL,
    distance_tol: float = DEFAULT_DISTANCE_TOL,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
) -> KernelStabilizationReport:
    """Kernel stabilization of ad_iD: dims and distances for k <= n_max."""
    res = spectral_resolution(d, cluster_tol)
    return superoperator_stabilization_report(
        ad_superoperator(d),
        n_max,
        rank_tol=rank_tol,
        distance_tol=distance_tol,
        spectrum=tuple(float(v) for v in res.values),
        multiplicities=tuple(int(m) for m in res.multiplicities),
    )


def flow(res: SpectralResolution, x, t: float) -> np.ndarray:
    """alpha_t(x) = u(t) x u(-t) for the unitary group of the resolution."""
    u_plus = unitary_group(res, t)
    u_minus = unitary_group(res, -t)
    return u_plus @ as_cmatrix(x) @ u_minus


@dataclass(frozen=True)
class DifferenceQuotientReport:
    """Difference-quotient residuals r(t) = ||(alpha_t(x) - x)/t - ad_iD(x)||
    and Lipschitz ratios ||alpha_t(x) - x|| / |t| on a t-grid.

    Bounds (Frobenius norms): r(t) <= ||D||^2 ||x|| |t| and the ratio is
    at most ||ad_iD(x)|| + ||D||^2 ||x|| |t|.  Pass thresholds are fields
    of the report, not test-only constants.
    """

    t_values: tuple
    residuals: tuple
    lipschitz_ratios: tuple
    residual_bounds: tuple
    lipschitz_bounds: tuple
    monotone: bool
    passed: bool


def difference_quotient_check(
    res: SpectralResolution, d, x, t_list=DEFAULT_T_GRID
) -> DifferenceQuotientReport:
    d = as_cmatrix(d)
    x = as_cmatrix(x)
    t_values = [float(t) for t in t_list]
    if any(t == 0.0 for t in t_values):
        raise ZeroT("difference quotients need t != 0")
    derivative = ad_apply(d, x)
    d_norm = frob(d)
    x_norm = frob(x)
    ad_norm = frob(derivative)

    residuals, ratios, r_bounds, l_bounds = [], [], [], []
    for t in t_values:
        moved = flow(res, x, t)
        residuals.append(frob((moved - x) / t - derivative))
        ratios.append(frob(moved - x) / abs(t))
        r_bounds.append(d_norm**2 * x_norm * abs(t))
        l_bounds.append(ad_norm + d_norm**2 * x_norm * abs(t))

    order = np.argsort(np.abs(t_values))[::-1]  # largest |t| first
    ordered = [residuals[i] for i in order]
    # slack absorbs roundoff when the residuals themselves are noise
    # (x in the kernel), where monotonicity is vacuous
    slack = 1e-12 * max(1.0, d_norm**2 * x_norm)
    monotone = all(a >= b - slack for a, b in zip(ordered[:-1], ordered[1:]))
    passed = monotone and all(
        r <= rb + 1e-14 and l <= lb + 1e-12
        for r, rb, l, lb in zip(residuals, r_bounds, ratios, l_bounds)
    )
    return DifferenceQuotientReport(
        t_values=tuple(t_values),
        residuals=tuple(residuals),
        lipschitz_ratios=tuple(ratios),
        residual_bounds=tuple(r_bounds),
        lipschitz_bounds=tuple(l_bounds),
        monotone=monotone,
        passed=passed,
    )


def pairing_derivative_check(
    res: SpectralResolution, d, x, h, k, t: float, delta: float
) -> float:
    """Central-difference residual for d/ds <alpha_s(x) h, k> at s = t
    against <alpha_t(ad_iD(x)) h, k>.

    The residual is O(delta^2) with constant ||D||^3 ||x|| ||h|| ||k||.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    x = as_cmatrix(x)
    h = np.asarray(h, dtype=complex).reshape(-1)
    k = np.asarray(k, dtype=complex).reshape(-1)

    def pairing(s):
        return complex(np.vdot(k, flow(res, x, s) @ h))

    central = (pairing(t + delta) - pairing(t - delta)) / (2.0 * delta)
    exact = complex(np.vdot(k, flow(res, ad_apply(d, x), t) @ h))
    return abs(central - exact)
