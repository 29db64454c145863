"""Almost complex structures as matrix fields on a ball in C^n.

A structure is a field Z -> J(Z) of real 2n x 2n matrices with
J(Z)^2 = -Id.  Everything lives in a single coordinate chart; points are
real vectors in the interleaved ordering (x_1, y_1, ..., x_n, y_n).

User-supplied fields that satisfy the constraint only approximately can
be repaired by the retraction J -> J (-J^2)^{-1/2} (principal inverse
square root, computed by a Newton-Schulz iteration), which keeps
perturbation constructors closed under the constraint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StructureError
from .linalg import complex_to_antilinear, jst_matrix

_FD_STEP = 1e-5


class AlmostComplexStructure:
    """Field of complex-structure operators on (a ball in) R^{2n}.

    Parameters
    ----------
    n : complex dimension
    eval_fn : maps points (..., 2n) to matrices (..., 2n, 2n)
    jacobian_fn : optional; maps points (..., 2n) to (..., 2n, 2n, 2n),
        last axis = differentiation coordinate.  Central differences with
        step 1e-5 are used when absent.
    regularity : smoothness order used by the discrete norms (non-integer)
    domain_radius : radius of the ball on which the field is trusted
    """

    def __init__(self, n, eval_fn, jacobian_fn=None, regularity=2.5,
                 domain_radius=np.inf, label="structure"):
        self.n = int(n)
        self._eval = eval_fn
        self._jac = jacobian_fn
        self.regularity = float(regularity)
        self.domain_radius = float(domain_radius)
        self.label = label

    def eval(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != 2 * self.n:
            raise StructureError(
                f"points have dimension {points.shape[-1]}, expected {2 * self.n}"
            )
        return self._eval(points)

    def __call__(self, points) -> np.ndarray:
        return self.eval(points)

    def jacobian(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if self._jac is not None:
            return self._jac(points)
        d = 2 * self.n
        out = np.empty(points.shape[:-1] + (d, d, d))
        for k in range(d):
            h = np.zeros(d)
            h[k] = _FD_STEP
            out[..., k] = (self.eval(points + h) - self.eval(points - h)) / (2 * _FD_STEP)
        return out

    def directional_derivative(self, point, direction) -> np.ndarray:
        """(D_w J)(p) by analytic jacobian if present, else central differences."""
        point = np.asarray(point, dtype=float)
        w = np.asarray(direction, dtype=float)
        if self._jac is not None:
            return np.einsum("...ijk,...k->...ij", self._jac(point), w)
        return (self.eval(point + _FD_STEP * w) - self.eval(point - _FD_STEP * w)) / (
            2 * _FD_STEP
        )

    def constraint_defect(self, points) -> float:
        """sup |J(Z)^2 + Id| over the given points."""
        J = self.eval(points)
        eye = np.eye(2 * self.n)
        return float(np.max(np.abs(J @ J + eye)))


# -- constructors ----------------------------------------------------------


def standard_structure(n: int) -> AlmostComplexStructure:
    J = jst_matrix(n)

    def ev(points):
        return np.broadcast_to(J, points.shape[:-1] + J.shape).copy()

    def jac(points):
        d = 2 * n
        return np.zeros(points.shape[:-1] + (d, d, d))

    return AlmostComplexStructure(n, ev, jac, domain_radius=np.inf, label="standard")


class PolynomialMatrixField:
    """sum over monomials of  coeff * Z^alpha, alpha over real coordinates."""

    def __init__(self, dim_real, monomials):
        self.dim_real = dim_real
        self.monomials = {tuple(int(e) for e in k): np.asarray(v, dtype=float)
                          for k, v in monomials.items()}
        for exps in self.monomials:
            if len(exps) != dim_real:
                raise StructureError(
                    f"monomial exponent vector {exps} has wrong length"
                )

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        first = next(iter(self.monomials.values()))
        out = np.zeros(points.shape[:-1] + first.shape)
        for exps, coeff in self.monomials.items():
            mono = np.ones(points.shape[:-1])
            for k, e in enumerate(exps):
                if e:
                    mono = mono * points[..., k] ** e
            out += mono[..., None, None] * coeff
        return out

    def jacobian(self, points):
        points = np.asarray(points, dtype=float)
        first = next(iter(self.monomials.values()))
        d = self.dim_real
        out = np.zeros(points.shape[:-1] + first.shape + (d,))
        for exps, coeff in self.monomials.items():
            for k, e in enumerate(exps):
                if not e:
                    continue
                mono = np.full(points.shape[:-1], float(e))
                for j, ej in enumerate(exps):
                    p = ej - 1 if j == k else ej
                    if p:
                        mono = mono * points[..., j] ** p
                out[..., k] += mono[..., None, None] * coeff
        return out


def polynomial_structure(n, monomials, retract=False, regularity=2.5,
                         domain_radius=np.inf, label="polynomial"):
    """Structure from a polynomial matrix field over the real coordinates.

    With ``retract=True`` the field is projected onto the constraint
    J^2 = -Id pointwise; the jacobian then falls back to differences.
    """
    field = PolynomialMatrixField(2 * n, monomials)
    if not retract:
        return AlmostComplexStructure(
            n, field, field.jacobian, regularity=regularity,
            domain_radius=domain_radius, label=label,
        )

    def ev(points):
        return retract_to_structure(field(points))

    return AlmostComplexStructure(
        n, ev, None, regularity=regularity, domain_radius=domain_radius, label=label
    )


def linear_perturbation(n, coefficient_matrices, retract=True, domain_radius=None,
                        label="perturbed"):
    """J_st + sum_k Z_k * M_k, repaired onto the constraint by default.

    ``coefficient_matrices`` maps a real coordinate index k to a 2n x 2n
    matrix M_k (anti-commuting matrices keep the constraint to first
    order; the retraction removes the quadratic defect).
    """
    mono = {tuple(0 for _ in range(2 * n)): jst_matrix(n)}
    scale = 0.0
    for k, M in coefficient_matrices.items():
        exps = [0] * (2 * n)
        exps[int(k)] = 1
        mono[tuple(exps)] = np.asarray(M, dtype=float)
        scale += float(np.max(np.abs(M)))
    if domain_radius is None:
        domain_radius = np.inf if scale == 0 else 0.5 / scale
    return polynomial_structure(
        n, mono, retract=retract, domain_radius=domain_radius, label=label
    )


def retract_to_structure(J: np.ndarray, iterations: int = 30, tol: float = 1e-14):
    """Project matrices onto J^2 = -Id via J (-J^2)^{-1/2}.

    Newton-Schulz iteration for the inverse square root; converges for
    fields reasonably close to the constraint (|Id + J^2| < 1).
    """
    J = np.asarray(J, dtype=float)
    d = J.shape[-1]
    eye = np.eye(d)
    A = -J @ J
    Y = A.copy()
    Z = np.broadcast_to(eye, A.shape).copy()
    for _ in range(iterations):
        T = 0.5 * (3.0 * eye - Z @ Y)
        Y = Y @ T
        Z = T @ Z
        if np.max(np.abs(Y - eye)) < tol:
            break
    return J @ Z


def pushforward_structure(base, forward_jac, inverse_map, n, label="pushforward",
                          domain_radius=np.inf):
    """Direct image of a structure under a diffeomorphism.

    J'(P) = dPhi(Q) J(Q) dPhi(Q)^{-1} with Q = Phi^{-1}(P); ``forward_jac``
    returns dPhi at Q, both callables batched.
    """

    def ev(points):
        q = inverse_map(points)
        M = forward_jac(q)
        return M @ base.eval(q) @ np.linalg.inv(M)

    return AlmostComplexStructure(n, ev, None, regularity=base.regularity,
                                  domain_radius=domain_radius, label=label)


# -- validation ------------------------------------------------------------


@dataclass(frozen=True)
class StructureValidation:
    max_defect: float
    worst_point: tuple
    passed: bool
    tolerance: float
    points_checked: int


def validate_structure(J: AlmostComplexStructure, sample_points,
                       tolerance: float = 1e-9) -> StructureValidation:
    """Check J(Z)^2 = -Id over the sample points; flags failure above tol."""
    pts = np.asarray(sample_points, dtype=float).reshape(-1, 2 * J.n)
    eye = np.eye(2 * J.n)
    try:
        vals = J.eval(pts)
    except Exception as exc:  # report the offending point if possible
        raise StructureError(f"evaluation failed on validation batch: {exc}") from exc
    defect = np.max(np.abs(vals @ vals + eye), axis=(-2, -1))
    worst = int(np.argmax(defect))
    return StructureValidation(
        max_defect=float(defect[worst]),
        worst_point=tuple(float(x) for x in pts[worst]),
        passed=bool(defect[worst] <= tolerance),
        tolerance=tolerance,
        points_checked=pts.shape[0],
    )


# -- distances and sampling --------------------------------------------------


def structure_distance(J1, J2, points, derivative_order: int = 0) -> float:
    """Max over the grid of entrywise sup-norm differences.

    ``derivative_order=1`` adds the first-derivative differences (each
    structure's own jacobian rule, central differences by default).
    """
    pts = np.asarray(points, dtype=float)
    d0 = float(np.max(np.abs(J1.eval(pts) - J2.eval(pts))))
    if derivative_order == 0:
        return d0
    if derivative_order != 1:
        raise StructureError("derivative_order must be 0 or 1")
    d1 = float(np.max(np.abs(J1.jacobian(pts) - J2.jacobian(pts))))
    return max(d0, d1)


def sample_ball(n, radius, count, seed) -> np.ndarray:
    """Deterministic sample of ``count`` points in the real 2n-ball."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((count, 2 * n))
    raw /= np.linalg.norm(raw, axis=1)[:, None]
    scales = rng.uniform(0.0, 1.0, count) ** (1.0 / (2 * n))
    return radius * raw * scales[:, None]


def ball_grid(n, radius, per_axis=3) -> np.ndarray:
    """Small tensor grid intersected with the real 2n-ball (origin included)."""
    axis = np.linspace(-radius, radius, per_axis)
    mesh = np.stack(np.meshgrid(*([axis] * (2 * n)), indexing="ij"), axis=-1)
    pts = mesh.reshape(-1, 2 * n)
    keep = np.linalg.norm(pts, axis=1) <= radius + 1e-12
    return pts[keep]


def random_antilinear(n, rng, scale=1.0) -> np.ndarray:
    """Random real matrix anti-commuting with multiplication by i."""
    Q = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    A = complex_to_antilinear(Q)
    return scale * A / max(np.max(np.abs(A)), 1e-30)
