"""Commutants, bicommutants, and the algebra generated by a spectral
resolution, together with the identity ker ad_iD = {D}' = P_D'."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .derivation import ad_superoperator
from .errors import ShapeMismatch
from .numlin import (
    DEFAULT_RANK_TOL,
    OperatorSubspace,
    as_cmatrix,
    containment_residual,
    is_hermitian,
    kron,
    nullspace,
    subspace_distance,
)
from .spectral import DEFAULT_CLUSTER_TOL, SpectralResolution, spectral_resolution

DEFAULT_DISTANCE_TOL = 1e-8
DEFAULT_CONTAINMENT_TOL = 1e-8


def _commutation_rows(g: np.ndarray) -> np.ndarray:
    # vec([g, x]) = (I (x) g - g^T (x) I) vec(x)
    eye = np.eye(g.shape[0])
    return kron(eye, g) - kron(g.T, eye)


def commutant(gens, rank_tol: float = DEFAULT_RANK_TOL) -> OperatorSubspace:
    """Orthonormal basis of {x : [g, x] = 0 for every generator g}.

    One SVD of the vertically stacked commutation superoperators; the
    identity always belongs to the result.
    """
    mats = [as_cmatrix(g) for g in gens]
    if not mats:
        raise ShapeMismatch("generator list must be nonempty")
    n = mats[0].shape[0]
    for g in mats:
        if g.shape != (n, n):
            raise ShapeMismatch("generators must be square and of equal size")
    stacked = np.vstack([_commutation_rows(g) for g in mats])
    # scale floor 1: generators proportional to I commute with everything
    return OperatorSubspace.from_vec_columns(
        n, nullspace(stacked, rank_tol, scale=1.0)
    )


def bicommutant(gens, rank_tol: float = DEFAULT_RANK_TOL) -> OperatorSubspace:
    """Commutant applied twice.

    Non-self-adjoint generator lists are first augmented with their
    adjoints so that the first commutant is a *-algebra.
    """
    mats = [as_cmatrix(g) for g in gens]
    augmented = list(mats)
    for g in mats:
        if not is_hermitian(g):
            augmented.append(g.conj().T)
    first = commutant(augmented, rank_tol)
    return commutant(list(first.basis), rank_tol)


def spectral_vn_algebra(
    res: SpectralResolution, rank_tol: float = DEFAULT_RANK_TOL
) -> OperatorSubspace:
    """Bicommutant of the spectral projections; equals their linear span,
    so its dimension is the number of clusters."""
    return bicommutant(list(res.projections), rank_tol)


@dataclass(frozen=True)
class KernelCommutantReport:
    """Pairwise distances among ker ad_iD, {D}', and the commutant of the
    spectral projections, plus containment of the generated algebra."""

    ambient_dim: int
    kernel_dim: int
    commutant_dim: int
    projection_commutant_dim: int
    algebra_dim: int
    distance_kernel_commutant: float
    distance_kernel_projection: float
    distance_commutant_projection: float
    algebra_containment: float
    passed: bool
    rank_tol: float
    distance_tol: float
    containment_tol: float

    def to_json_dict(self) -> dict:
        return {
            "identity": "ker=MD_prime",
            "n": self.ambient_dim,
            "dims": {
                "kernel": self.kernel_dim,
                "commutant": self.commutant_dim,
                "projection_commutant": self.projection_commutant_dim,
                "algebra": self.algebra_dim,
            },
            "distances": {
                "kernel_vs_commutant": self.distance_kernel_commutant,
                "kernel_vs_projection_commutant": self.distance_kernel_projection,
                "commutant_vs_projection_commutant": self.distance_commutant_projection,
            },
            "algebra_containment": self.algebra_containment,
            "pass": self.passed,
            "tolerances": {
                "rank": self.rank_tol,
                "subspace": self.distance_tol,
                "containment": self.containment_tol,
            },
        }


def kernel_commutant_check(
    d,
    rank_tol: float = DEFAULT_RANK_TOL,
    distance_tol: float = DEFAULT_DISTANCE_TOL,
    containment_tol: float = DEFAULT_CONTAINMENT_TOL,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
) -> KernelCommutantReport:
    """Compare the three realizations of the same subspace — the kernel of
    ad_iD, the commutant of {D}, and the commutant of the spectral
    projections — and check that the algebra generated by the projections
    sits inside the kernel."""
    d = as_cmatrix(d)
    res = spectral_resolution(d, cluster_tol)
    kernel = ad_superoperator(d).kernel(rank_tol)
    comm = commutant([d], rank_tol)
    proj_comm = commutant(list(res.projections), rank_tol)
    algebra = spectral_vn_algebra(res, rank_tol)

    d_kc = subspace_distance(kernel, comm)
    d_kp = subspace_distance(kernel, proj_comm)
    d_cp = subspace_distance(comm, proj_comm)
    contain = containment_residual(algebra, kernel)
    passed = (
        max(d_kc, d_kp, d_cp) <= distance_tol
        and contain <= containment_tol
        and kernel.dim == comm.dim == proj_comm.dim
    )
    return KernelCommutantReport(
        ambient_dim=d.shape[0],
        kernel_dim=kernel.dim,
        commutant_dim=comm.dim,
        projection_commutant_dim=proj_comm.dim,
        algebra_dim=algebra.dim,
        distance_kernel_commutant=d_kc,
        distance_kernel_projection=d_kp,
        distance_commutant_projection=d_cp,
        algebra_containment=contain,
        passed=passed,
        rank_tol=rank_tol,
        distance_tol=distance_tol,
        containment_tol=containment_tol,
    )


__all__ = [
    "commutant",
    "bicommutant",
    "spectral_vn_algebra",
    "kernel_commutant_check",
    "KernelCommutantReport",
]
