"""Quasi-linear holomorphy: the structure coefficient, the residual of
the holomorphy system, and the normalization to ordinary holomorphy.

A disc f is holomorphic for the structure J exactly when

    df/d(conj zeta) + Q(f) conj(df/dzeta) = 0,

where Q(Z) is the complex matrix of the anti-linear operator
-(J_st + J(Z))^{-1} (J_st - J(Z)) under the identification
A v = Q conj(v).  Adding the area-integral primitive of the coupling
term turns the system into plain holomorphy:

    f  ->  g = f + T(Q(f) conj(f_zeta))

is holomorphic iff f solves the system, and for small deviations from
the standard structure the map is inverted by Picard iteration, whose
contraction factor is observable (roughly the sup of |Q| along the disc).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discfun import DiscFunction
from .errors import ConvergenceError, DomainError, StructureError
from .linalg import antilinear_to_complex, jst_matrix, to_real
from .operators import cauchy_green, dbar, dzeta, holomorphic_from_coeffs


def structure_coefficient(J, points, antilinearity_tol=1e-9) -> np.ndarray:
    """Q(Z) at the given real points, shape (..., n, n) complex.

    Raises if J_st + J(Z) is singular (structure too far from standard)
    or if the computed operator fails to be anti-linear, which signals an
    invalid structure.
    """
    points = np.asarray(points, dtype=float)
    Jv = J.eval(points)
    jst = jst_matrix(J.n)
    S = jst + Jv
    D = jst - Jv
    try:
        A = -np.linalg.solve(S, D)
    except np.linalg.LinAlgError as exc:
        raise StructureError("J_st + J(Z) is singular; structure too far from "
                             "the standard one") from exc
    defect = np.max(np.abs(A @ jst + jst @ A))
    scale = max(1.0, float(np.max(np.abs(A))))
    if defect > antilinearity_tol * scale:
        raise StructureError(
            f"structure coefficient is not anti-linear (defect {defect:.3e}); "
            "the input field does not satisfy J^2 = -Id"
        )
    return antilinear_to_complex(A)


class QField:
    """Cached pointwise structure coefficient of one structure."""

    def __init__(self, J, antilinearity_tol=1e-9):
        self.J = J
        self.tol = antilinearity_tol

    def __call__(self, points) -> np.ndarray:
        return structure_coefficient(self.J, points, self.tol)


def disc_points(f: DiscFunction) -> tuple[np.ndarray, np.ndarray]:
    """Real ambient coordinates of a vector disc's samples.

    Returns interior points (n_r, n_theta, 2n) and boundary points
    (n_theta, 2n).
    """
    interior = to_real(np.moveaxis(f.values, 0, -1))
    boundary = to_real(np.moveaxis(f.boundary, 0, -1))
    return interior, boundary


def _check_range(points, J, what="disc"):
    radius = np.max(np.linalg.norm(points, axis=-1))
    if radius > J.domain_radius:
        raise DomainError(
            f"{what} leaves the structure's domain: reach {radius:.3g} exceeds "
            f"radius {J.domain_radius:.3g}"
        )


def coupling_term(f: DiscFunction, J) -> DiscFunction:
    """Q(f) conj(f_zeta) on the grid, the defect of ordinary holomorphy."""
    interior, boundary = disc_points(f)
    _check_range(interior, J)
    fz = dzeta(f)
    Qi = structure_coefficient(J, interior)
    Qb = structure_coefficient(J, boundary)
    vals = np.einsum("rtij,jrt->irt", Qi, np.conj(fz.values))
    bnd = np.einsum("tij,jt->it", Qb, np.conj(fz.boundary))
    return DiscFunction(f.grid, vals, bnd)


def holomorphy_residual(f: DiscFunction, J) -> DiscFunction:
    """f_[conj zeta] + Q(f) conj(f_zeta); zero iff f is J-holomorphic."""
    return dbar(f) + coupling_term(f, J)


def to_holomorphic_frame(f: DiscFunction, J) -> DiscFunction:
    """g = f + T(Q(f) conj(f_zeta)); holomorphic when f solves the system."""
    return f + cauchy_green(coupling_term(f, J))


@dataclass(frozen=True)
class FixedPointInfo:
    iterations: int
    final_step: float
    contraction_ratio: float


def from_holomorphic_frame(g: DiscFunction, J, tol=1e-10, max_iter=80
                           ) -> tuple[DiscFunction, FixedPointInfo]:
    """Invert the normalization by Picard iteration seeded at g.

    Divergence (three consecutive step increases) raises with the advice
    that applies in practice: rescale the problem with a smaller
    dilation so the structure sits closer to the standard one.
    """
    f = g
    prev = np.inf
    increases = 0
    ratios = []
    step = 0.0
    for it in range(1, max_iter + 1):
        f_new = g - cauchy_green(coupling_term(f, J))
        step = f_new.distance(f)
        if np.isfinite(prev) and prev > 0:
            ratios.append(step / prev)
        if step <= tol:
            ratio = float(np.median(ratios)) if ratios else 0.0
            return f_new, FixedPointInfo(it, float(step), ratio)
        if step > prev:
            increases += 1
            if increases >= 3:
                raise ConvergenceError(
                    "fixed-point iteration is not contracting; the structure "
                    "deviation is too large on the disc's range -- rescale "
                    "with a smaller dilation delta",
                    residual=float(step),
                )
        else:
            increases = 0
        prev = step
        f = f_new
    raise ConvergenceError(
        f"fixed-point iteration did not reach tol={tol:g} in {max_iter} steps",
        residual=float(step),
    )


def disc_through(J, center, direction, grid, tol=1e-11, max_iter=60,
                 reach=0.35) -> tuple[DiscFunction, float]:
    """Small J-holomorphic disc with prescribed center and x-derivative.

    Returns (f, scale): f(0) = center and df(0)/d(Re zeta) = scale * direction,
    with the scale chosen so the disc stays well inside the structure's
    domain.  Second-order quantities along the disc are 2-homogeneous in
    the direction, so callers divide by scale**2.
    """
    p = np.asarray(center, dtype=complex)
    v = np.asarray(direction, dtype=complex)
    vnorm = float(np.linalg.norm(v))
    if vnorm == 0.0:
        raise DomainError("direction must be nonzero")
    room = J.domain_radius - float(np.linalg.norm(p))
    if room <= 0:
        raise DomainError("center lies outside the structure's domain")
    scale = min(reach, 0.45 * room) / vnorm
    target = scale * v

    q = p.copy()
    u = target.copy()
    f = None
    for _ in range(max_iter):
        coeffs = np.stack([q, u], axis=-1)  # (n, 2): q + u zeta
        g = holomorphic_from_coeffs(grid, coeffs)
        f, _ = from_holomorphic_frame(g, J)
        a0 = f.center_value()
        a1 = f.center_x_derivative()
        err = max(np.max(np.abs(a0 - p)), np.max(np.abs(a1 - target)))
        if err <= tol:
            return f, scale
        q = q + (p - a0)
        u = u + (target - a1)
    raise ConvergenceError(
        "could not match the disc's center and derivative constraints",
        residual=float(err),
    )
