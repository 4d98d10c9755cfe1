"""Two-variant hyperelastic material: densities, derivatives, interface cost.

The base density is a compressible planar Mooney-Rivlin form

    W(F) = alpha * tr(F^T F) + delta1 * (det F)^2 - delta2 * ln(det F),

restricted to det F > 0 and treated as +infinity otherwise.  With
delta2 = 2*alpha + 2*delta1 the minimum sits exactly on SO(2) with value
2*alpha + delta1.  The two martensite variants are sheared copies of that
well: variant v has density W(F @ Fv^{-1}), minimized on SO(2) @ Fv.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InadmissibleDeformationError

#: Default coefficients: alpha, delta1 (delta2 follows), shear, dissipation.
DEFAULT_ALPHA = 1.0
DEFAULT_DELTA1 = 1.0
DEFAULT_EPSILON = 0.3
DEFAULT_BETA = 0.1


@dataclass(frozen=True)
class MaterialParams:
    """Validated material coefficients plus the derived stretching matrices.

    ``delta2`` may be omitted, in which case it is derived from the well
    relation delta2 = 2*alpha + 2*delta1; an explicit value that breaks the
    relation is rejected because the wells would drift off SO(2)*Fv.
    """

    alpha: float = DEFAULT_ALPHA
    delta1: float = DEFAULT_DELTA1
    delta2: float | None = None
    epsilon: float = DEFAULT_EPSILON
    beta: float = DEFAULT_BETA
    alpha_i: float = 0.0
    alpha_s: float = 0.0
    F1: np.ndarray = field(init=False, repr=False, compare=False)
    F2: np.ndarray = field(init=False, repr=False, compare=False)
    F1_inv: np.ndarray = field(init=False, repr=False, compare=False)
    F2_inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.delta1 <= 0:
            raise ValueError(f"delta1 must be > 0, got {self.delta1}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.alpha_i < 0:
            raise ValueError(f"alpha_i must be >= 0, got {self.alpha_i}")
        if self.alpha_s < 0:
            raise ValueError(f"alpha_s must be >= 0, got {self.alpha_s}")
        derived = 2.0 * self.alpha + 2.0 * self.delta1
        if self.delta2 is None:
            object.__setattr__(self, "delta2", derived)
        elif self.delta2 != derived:
            raise ValueError(
                f"delta2 must equal 2*alpha + 2*delta1 = {derived}, got {self.delta2}"
            )
        eps = self.epsilon
        f1 = np.array([[1.0, eps], [0.0, 1.0]])
        f2 = np.array([[1.0, -eps], [0.0, 1.0]])
        f1_inv = np.array([[1.0, -eps], [0.0, 1.0]])
        f2_inv = np.array([[1.0, eps], [0.0, 1.0]])
        for name, mat in (("F1", f1), ("F2", f2), ("F1_inv", f1_inv), ("F2_inv", f2_inv)):
            mat.setflags(write=False)
            object.__setattr__(self, name, mat)

    @property
    def well_energy(self) -> float:
        """Density value at the bottom of each well (2*alpha + delta1)."""
        return 2.0 * self.alpha + self.delta1

    def variant_inverse(self, variant: int) -> np.ndarray:
        if variant == 1:
            return self.F1_inv
        if variant == 2:
            return self.F2_inv
        raise ValueError(f"variant must be 1 or 2, got {variant}")


def cof2d(F: np.ndarray) -> np.ndarray:
    """Cofactor matrix of a 2x2 matrix."""
    return np.array([[F[1, 1], -F[1, 0]], [-F[0, 1], F[0, 0]]])


def mooney_rivlin(F: np.ndarray, params: MaterialParams) -> float:
    """Base density; raises on det F <= 0 (energy is +infinity there)."""
    det = F[0, 0] * F[1, 1] - F[0, 1] * F[1, 0]
    if det <= 0.0:
        raise InadmissibleDeformationError(f"det F = {det} is not positive")
    trace = float(np.sum(F * F))
    return params.alpha * trace + params.delta1 * det * det - params.delta2 * np.log(det)


def variant_density(F: np.ndarray, variant: int, params: MaterialParams) -> float:
    """Density of one martensite variant: W(F @ Fv^{-1})."""
    return mooney_rivlin(F @ params.variant_inverse(variant), params)


def variant_density_gradient(F: np.ndarray, variant: int, params: MaterialParams) -> np.ndarray:
    """First Piola-Kirchhoff stress of a variant density.

    With G = F @ Fv^{-1}:  dW/dG = 2*alpha*G + (2*delta1*(det G)^2 - delta2) * G^{-T},
    and the chain rule appends Fv^{-T}.
    """
    fv_inv = params.variant_inverse(variant)
    G = F @ fv_inv
    det = G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0]
    if det <= 0.0:
        raise InadmissibleDeformationError(f"det F = {det} is not positive")
    g_inv_t = np.array([[G[1, 1], -G[1, 0]], [-G[0, 1], G[0, 0]]]) / det
    dw_dg = 2.0 * params.alpha * G + (2.0 * params.delta1 * det * det - params.delta2) * g_inv_t
    return dw_dg @ fv_inv.T


def variant_density_via_C(F: np.ndarray, variant: int, params: MaterialParams) -> float:
    """Alternate evaluation through the right Cauchy-Green tensor C = F^T F.

    Used for cross-validation only: with B = Fv^{-T} C Fv^{-1},
    value = alpha*tr(B) + delta1*det(B) - (delta2/2)*ln(det B).
    """
    fv_inv = params.variant_inverse(variant)
    C = F.T @ F
    B = fv_inv.T @ C @ fv_inv
    det = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
    if det <= 0.0:
        raise InadmissibleDeformationError(f"det C transform = {det} is not positive")
    return params.alpha * (B[0, 0] + B[1, 1]) + params.delta1 * det - 0.5 * params.delta2 * np.log(det)


def edge_stretch(F: np.ndarray, tangent: np.ndarray) -> float:
    """Deformed-to-reference length ratio of an interface with unit tangent t.

    Equals |cof(F(I - n (x) n)) n| for the edge normal n; in 2D that reduces
    to |F t|, so either adjacent triangle of a conforming P1 field gives the
    same value.
    """
    ft = F @ tangent
    return float(np.hypot(ft[0], ft[1]))


def surface_cofactor_normal(F: np.ndarray, normal: np.ndarray) -> float:
    """|cof(F(I - n (x) n)) n| evaluated literally (test/reference path)."""
    n = np.asarray(normal, dtype=float)
    Fsurf = F @ (np.eye(2) - np.outer(n, n))
    return float(np.linalg.norm(cof2d(Fsurf) @ n))


def sign_prev(z_old: int) -> int:
    """Linearization sign for the dissipation term: s(0) = 1, s(1) = -1."""
    if z_old == 0:
        return 1
    if z_old == 1:
        return -1
    raise ValueError(f"phase value must be 0 or 1, got {z_old}")


def dissipation_increment(z_new: int, z_old: int, beta: float, area: float) -> float:
    """Dissipated energy beta * |z_new - z_old| * area for one triangle."""
    if z_new not in (0, 1) or z_old not in (0, 1):
        raise ValueError("phase values must be 0 or 1")
    return beta * abs(z_new - z_old) * area
