"""Dilation pushforwards and the small-scale limit of a structure.

Two rescalings are used throughout: the isotropic one Z -> Z/delta, under
which every smooth structure with J(0) = J_st flattens to the standard
one at rate O(delta), and the anisotropic one
(z, w) -> (z/delta, w/sqrt(delta)) adapted to a codimension-m splitting,
whose limit keeps the first-order coupling of the z-rows against the
w-columns evaluated along w.  The surviving block is nilpotent, so the
limit J_st + L0(w) satisfies the structure constraint exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StructureError
from .linalg import jst_matrix
from .structures import AlmostComplexStructure, polynomial_structure


def dilate_isotropic(J, E, delta):
    """Pushforward of (J, E) under Z -> Z/delta.

    Matrix conjugation by a scalar dilation is the identity, so
    J_delta(Z) = J(delta Z); the usable coordinate ball grows to
    (domain radius)/delta, which is recorded on the result.
    """
    if delta <= 0:
        raise StructureError("dilation scale must be positive")
    d = float(delta)

    def ev(points):
        return J.eval(d * points)

    jac = None
    if J._jac is not None:
        def jac(points):  # chain rule multiplies each derivative by delta
            return d * J._jac(d * points)

    J_delta = AlmostComplexStructure(
        J.n, ev, jac, regularity=J.regularity,
        domain_radius=J.domain_radius / d,
        label=f"{J.label}@iso{delta:g}",
    )
    E_delta = E.dilate(delta, anisotropic=False) if E is not None else None
    return J_delta, E_delta


def anisotropic_scaling(n, m, delta) -> np.ndarray:
    """Diagonal of the map (z, w) -> (z/delta, w/sqrt(delta)) on R^{2n}."""
    s = np.empty(2 * n)
    s[: 2 * m] = 1.0 / delta
    s[2 * m :] = 1.0 / np.sqrt(delta)
    return s


def dilate_anisotropic(J, E, delta, m=None):
    """Pushforward under the codimension-adapted dilation.

    J_delta(Z) = S J(S^{-1} Z) S^{-1} with S the diagonal block scaling;
    requires the coordinate split, taken from ``E`` unless given.
    """
    if delta <= 0:
        raise StructureError("dilation scale must be positive")
    if m is None:
        if E is None:
            raise StructureError(
                "anisotropic dilation needs the coordinate split: pass E or m"
            )
        m = E.m
    s = anisotropic_scaling(J.n, m, delta)
    s_inv = 1.0 / s

    def ev(points):
        inner = J.eval(points * s_inv)
        return s[:, None] * inner * s_inv[None, :]

    jac = None
    if J._jac is not None:
        def jac(points):
            inner = J._jac(points * s_inv)
            return s[:, None, None] * inner * s_inv[None, :, None] * s_inv[None, None, :]

    J_delta = AlmostComplexStructure(
        J.n, ev, jac, regularity=J.regularity,
        domain_radius=J.domain_radius / max(delta, np.sqrt(delta)),
        label=f"{J.label}@aniso{delta:g}",
    )
    E_delta = E.dilate(delta, anisotropic=True) if E is not None else None
    return J_delta, E_delta


@dataclass(frozen=True)
class LimitStructure:
    """First-order data of a structure at 0 and its anisotropic limit.

    ``coeffs`` are the projected anti-linear derivative matrices G_k
    (d J / d Z_k at 0); ``J0`` is the limit structure J_st + L0(w);
    ``lam0`` is the complex tensor of the surviving block:
    Lambda0[j, q, k] is the coefficient of real w-coordinate k in the
    complex entry (z-row j, w-column q), under the identification
    (anti-linear map) v -> Lambda conj(v).  The defects record what the
    block projection and the reference-line condition removed.
    """

    n: int
    m: int
    coeffs: np.ndarray          # (2n, 2n, 2n): G[:, :, k]
    J0: AlmostComplexStructure
    lam0: np.ndarray            # (m, n-m, 2(n-m)) complex
    block_defect: float
    line_defect: float

    def linear_field(self, points) -> np.ndarray:
        """Full first-order field L(Z) = sum_k Z_k G_k (before blocking)."""
        points = np.asarray(points, dtype=float)
        return np.einsum("ijk,...k->...ij", self.coeffs, points)

    def lam0_entry(self, w_complex) -> np.ndarray:
        """Lambda0 evaluated at w: complex (..., m, n-m)."""
        w_complex = np.asarray(w_complex, dtype=complex)
        wreal = np.empty(w_complex.shape[:-1] + (2 * w_complex.shape[-1],))
        wreal[..., 0::2] = w_complex.real
        wreal[..., 1::2] = w_complex.imag
        return np.einsum("jqk,...k->...jq", self.lam0, wreal)


def linear_part_and_limit(J: AlmostComplexStructure, m: int,
                          origin_tol: float = 1e-9) -> LimitStructure:
    """Extract the first-order part of J at 0 and assemble its limit.

    Requires J(0) = J_st.  The extracted derivative matrices are
    projected onto the anti-linear part (the constraint forces it), the
    block pattern of the anisotropic limit is applied (z-rows against
    w-columns, dependence on w only), and the last w-column is made
    independent of the last w-coordinate, which is the condition for the
    reference line (0,...,0,zeta) to remain holomorphic in the limit.
    """
    n = J.n
    d = 2 * n
    origin = np.zeros(d)
    J0_val = J.eval(origin)
    jst = jst_matrix(n)
    if np.max(np.abs(J0_val - jst)) > origin_tol:
        raise StructureError(
            f"structure does not equal the standard one at 0 "
            f"(defect {np.max(np.abs(J0_val - jst)):.3e})"
        )
    G = J.jacobian(origin)  # (2n, 2n, 2n)
    # anti-linear projection: A -> (A + J_st A J_st)/2 keeps anti-commuting part
    G = 0.5 * (G + np.einsum("ia,abk,bj->ijk", jst, G, jst))

    blocked = np.zeros_like(G)
    blocked[: 2 * m, 2 * m :, 2 * m :] = G[: 2 * m, 2 * m :, 2 * m :]
    block_defect = float(np.max(np.abs(G - blocked))) if G.size else 0.0

    # reference-line condition: entries in the last w-column may not depend
    # on the last complex w-coordinate
    line = blocked.copy()
    removed = line[: 2 * m, d - 2 :, d - 2 :]
    line_defect = float(np.max(np.abs(removed))) if removed.size else 0.0
    line[: 2 * m, d - 2 :, d - 2 :] = 0.0

    monomials = {tuple(0 for _ in range(d)): jst}
    for k in range(2 * m, d):
        if np.max(np.abs(line[:, :, k])) == 0.0:
            continue
        exps = [0] * d
        exps[k] = 1
        monomials[tuple(exps)] = line[:, :, k]
    J0 = polynomial_structure(
        n, monomials, retract=False, regularity=J.regularity,
        domain_radius=np.inf, label=f"{J.label}@limit",
    )

    nm = n - m
    lam0 = np.zeros((m, nm, 2 * nm), dtype=complex)
    for k in range(2 * nm):
        A = line[:, :, 2 * m + k]
        # complex matrix of the anti-linear map, z-rows x w-columns
        cols = A[:, 2 * m :][:, 0::2]
        lam0[:, :, k] = cols[0 : 2 * m : 2, :] + 1j * cols[1 : 2 * m : 2, :]
    return LimitStructure(
        n=n, m=m, coeffs=G, J0=J0, lam0=lam0,
        block_defect=block_defect, line_defect=line_defect,
    )
