"""Closed-form disc families attached to the model manifolds.

Three families are assembled exactly, as polynomials in zeta and
conj(zeta):

* the affine family (i c, p + v zeta) attached to a flat hyperplane;
* the classical holomorphic family attached to the normalized quadric
  (codimension n-1), parametrized by (t, lambda, y, c), whose
  evaluation at zeta = -lambda sweeps a one-sided neighborhood;
* its generalization to the anisotropic limit structure J_st + L0(w):
  the coupling along the standard ansatz w-part is constant in zeta, so
  the z-components gain an exact a_j conj(zeta) - conj(a_j) zeta
  correction, with a_j = (i/2) Lambda0_{j,last}(c') t/(1+lambda), and the
  boundary condition is matched mode by mode through the Schwarz lift
  (degree-one trigonometric data, so the matching is a two-term formula).

The boundary-matching route is used for every component; the classical
printed formulas drop out as the special case and are pinned by tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dilation import LimitStructure
from .discfun import BoundarySignal, DiscFunction
from .errors import ManifoldError
from .grid import default_grid
from .linalg import to_real
from .manifolds import QuadricModel
from .operators import cauchy_green, dzeta
from .errors import RankGapError


@dataclass(frozen=True)
class FamilyParams:
    """Parameters (t, lambda, y, c) of one member of a model family."""

    t: float
    lam: float
    y: tuple
    c: tuple
    delta: float = 0.0

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("t must be positive")
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError("lambda must lie in [0, 1]")
        object.__setattr__(self, "y", tuple(float(v) for v in np.atleast_1d(self.y)))
        object.__setattr__(self, "c", tuple(complex(v) for v in np.atleast_1d(self.c)))


class ClosedFormDisc:
    """Disc whose components are polynomials in zeta and conj(zeta)."""

    def __init__(self, pos_coeffs: np.ndarray, neg_coeffs: np.ndarray | None = None):
        self.pos = np.atleast_2d(np.asarray(pos_coeffs, dtype=complex))
        if neg_coeffs is None:
            neg_coeffs = np.zeros((self.pos.shape[0], 0))
        self.neg = np.atleast_2d(np.asarray(neg_coeffs, dtype=complex))

    @property
    def n(self) -> int:
        return self.pos.shape[0]

    def eval(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex)
        out = np.zeros((self.n,) + zeta.shape, dtype=complex)
        for k in range(self.pos.shape[1]):
            out += self.pos[:, k].reshape((-1,) + (1,) * zeta.ndim) * zeta**k
        zb = np.conj(zeta)
        for k in range(self.neg.shape[1]):
            out += self.neg[:, k].reshape((-1,) + (1,) * zeta.ndim) * zb ** (k + 1)
        return out

    def on_grid(self, grid=None) -> DiscFunction:
        grid = grid or default_grid()
        return DiscFunction(grid, self.eval(grid.zeta), self.eval(grid.boundary_zeta))

    def center(self) -> np.ndarray:
        return self.pos[:, 0].copy()


# -- flat hyperplane -------------------------------------------------------------


def flat_disc(p, v, c) -> ClosedFormDisc:
    """(i c, p + v zeta): affine disc with boundary in {Re z = 0}."""
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    pos = np.zeros((1 + p.size, 2), dtype=complex)
    pos[0, 0] = 1j * float(c)
    pos[1:, 0] = p
    pos[1:, 1] = v
    return ClosedFormDisc(pos)


# -- quadric family (codimension n-1) ----------------------------------------------


def boggess_pitts(params: FamilyParams, n: int) -> ClosedFormDisc:
    """Holomorphic family attached to {Re z_j = 0, 2 Re z_{n-1} = |w|^2}.

    Printed-form coefficients; the scalar c is the last entry of
    ``params.c`` and y has length n-1.
    """
    t, lam = params.t, params.lam
    y = np.asarray(params.y, dtype=float)
    if y.size != n - 1:
        raise ValueError(f"y must have length {n - 1}")
    c = complex(params.c[-1])
    one = 1.0 + lam
    pos = np.zeros((n, 2), dtype=complex)
    for j in range(n - 2):
        pos[j, 0] = 1j * y[j]
    pos[n - 2, 0] = (
        0.5 * (c * np.conj(c) + t**2 * (lam**2 + 1.0) / one**2)
        + t * lam * np.conj(c) / one
        + 1j * y[n - 2]
    )
    pos[n - 2, 1] = t * np.conj(c) / one + t**2 * lam / one**2
    pos[n - 1, 0] = c + t * lam / one
    pos[n - 1, 1] = t / one
    return ClosedFormDisc(pos)


def bp_attachment(params: FamilyParams, n: int) -> np.ndarray:
    """The member evaluated at zeta = -lambda (interior for lambda < 1)."""
    return boggess_pitts(params, n).eval(np.array(-params.lam + 0j))[..., 0]


def bp_attachment_limit(t, y, c, n) -> np.ndarray:
    """Limit of the attachment as lambda -> 1: (i y', |c|^2/2 + i y_last, c)."""
    y = np.asarray(y, dtype=float)
    c = complex(c)
    out = np.zeros(n, dtype=complex)
    out[: n - 2] = 1j * y[: n - 2]
    out[n - 2] = 0.5 * c * np.conj(c) + 1j * y[n - 2]
    out[n - 1] = c
    return out


# -- rank diagnostics ---------------------------------------------------------------


@dataclass(frozen=True)
class RankReport:
    rank: int
    singular_values: np.ndarray
    gap: float
    jacobian: np.ndarray
    lambda_direction: np.ndarray


def _decide_rank(sv: np.ndarray, gap_tol: float) -> tuple[int, float]:
    sv = np.asarray(sv, dtype=float)
    floor = max(sv[0], 1.0) * 1e-15
    padded = np.concatenate([sv, [floor]])
    ratios = padded[1:] / np.maximum(padded[:-1], floor)
    r = int(np.argmin(ratios)) + 1
    gap = 1.0 / max(ratios[r - 1], 1e-300)
    if ratios[r - 1] > gap_tol:
        raise RankGapError(
            f"no singular-value gap at ratio threshold {gap_tol:g}",
            singular_values=sv,
        )
    return r, float(gap)


def attachment_map_jacobian(attach_fn, theta0, h=1e-5):
    """Central-difference Jacobian of a map R^k -> C^n at theta0, as a
    real (2n, k) matrix."""
    theta0 = np.asarray(theta0, dtype=float)
    cols = []
    for i in range(theta0.size):
        e = np.zeros_like(theta0)
        e[i] = h
        cols.append(to_real(attach_fn(theta0 + e) - attach_fn(theta0 - e)) / (2 * h))
    return np.stack(cols, axis=1)


def bp_attach_jacobian(t, n, at=(1.0, None, 0.0), h=1e-5,
                       gap_tol=1e-6) -> RankReport:
    """Differential of (lambda, y, c) -> member(-lambda) with rank decision.

    The rank is read off the singular values through a relative gap; an
    ambiguous spectrum raises with the values attached.  Also returns the
    lambda-derivative, whose component transverse to the quadric's
    tangent space is the attachment direction of the swept manifold.
    """
    lam0, y0, c0 = at
    y0 = np.zeros(n - 1) if y0 is None else np.asarray(y0, dtype=float)
    theta0 = np.concatenate([[lam0], y0, [np.real(c0), np.imag(c0)]])

    def attach(theta):
        lam = min(max(theta[0], 0.0), 1.0)
        y = theta[1:n]
        c = theta[n] + 1j * theta[n + 1]
        return bp_attachment(FamilyParams(t=t, lam=lam, y=tuple(y), c=(c,)), n)

    Jac = attachment_map_jacobian(attach, theta0, h=h)
    sv = np.linalg.svd(Jac, compute_uv=False)
    rank, gap = _decide_rank(sv, gap_tol)
    return RankReport(
        rank=rank,
        singular_values=sv,
        gap=gap,
        jacobian=Jac,
        lambda_direction=Jac[:, 0].copy(),
    )


# -- discs for the anisotropic limit structure ---------------------------------------


def _ansatz_w(params: FamilyParams, nm: int) -> tuple[np.ndarray, np.ndarray]:
    """w(zeta) = u + v zeta of the standard ansatz: constants except the
    last component c_last + t(lambda + zeta)/(1 + lambda)."""
    c = np.asarray(params.c, dtype=complex)
    if c.size != nm:
        raise ValueError(f"c must have length {nm}")
    u = c.copy()
    v = np.zeros(nm, dtype=complex)
    one = 1.0 + params.lam
    u[-1] = c[-1] + params.t * params.lam / one
    v[-1] = params.t / one
    return u, v


def boundary_lift_coefficients(H_j: np.ndarray, u: np.ndarray, v: np.ndarray):
    """Degree-one data of H_j(w(zeta)) on the circle: A + 2 Re(B zeta)."""
    A = np.real(np.einsum("ks,k,s->", H_j, u, np.conj(u))
                + np.einsum("ks,k,s->", H_j, v, np.conj(v)))
    B = complex(np.einsum("ks,k,s->", H_j, v, np.conj(u)))
    return float(A), B


def limit_structure_disc(limit: LimitStructure, quadric: QuadricModel,
                         params: FamilyParams,
                         pattern_tol: float = 1e-9) -> ClosedFormDisc:
    """Exact disc for the limit structure attached to the model quadric.

    Requires the quadric's normalization flags and the limit block
    pattern (raises otherwise).  Each z-component is
    i y_j + a_j conj(zeta) - conj(a_j) zeta + Phi_j(zeta), where Phi_j is
    the Schwarz match of -H_j(w(.))/2 on the boundary, a two-term
    polynomial because the ansatz makes that signal trigonometric of
    degree one.
    """
    n, m = quadric.n, quadric.m
    nm = n - m
    if limit.n != n or limit.m != m:
        raise ManifoldError("limit structure and quadric dimensions disagree")
    if max(limit.block_defect, limit.line_defect) > pattern_tol:
        raise ManifoldError(
            "limit coefficients violate the block pattern: defects "
            f"block={limit.block_defect:.2e} line={limit.line_defect:.2e}"
        )
    defects = quadric.normalization_defects()
    if defects["last_coeff_minus_one"] > pattern_tol or (
        m > 1 and defects["others_without_last"] > pattern_tol
    ):
        raise ManifoldError(
            f"quadric is not normalized for the closed-form family: {defects}"
        )
    y = np.asarray(params.y, dtype=float)
    if y.size != m:
        raise ValueError(f"y must have length {m}")
    u, v = _ansatz_w(params, nm)

    # coupling coefficient: constant along the ansatz, one per z-row
    cprime = np.zeros(nm, dtype=complex)
    cprime[: nm - 1] = u[: nm - 1]
    lam_at = limit.lam0_entry(cprime)  # (m, nm)
    a = 0.5j * lam_at[:, nm - 1] * params.t / (1.0 + params.lam)

    pos = np.zeros((n, 2), dtype=complex)
    neg = np.zeros((n, 1), dtype=complex)
    for j in range(m):
        A, B = boundary_lift_coefficients(quadric.hermitian[j], u, v)
        pos[j, 0] = 1j * y[j] - 0.5 * A
        pos[j, 1] = -B - np.conj(a[j])
        neg[j, 0] = a[j]
    pos[m:, 0] = u
    pos[m:, 1] = v
    return ClosedFormDisc(pos, neg)


def coupling_primitive(w_disc: DiscFunction, limit: LimitStructure) -> DiscFunction:
    """Area-integral primitive of the limit-structure coupling along w.

    The returned Psi has d/d(conj zeta) Psi_j equal to the coupling term
    (i/2) sum_q Lambda0_{jq}(w) conj(dw_q/dzeta); subtracting it from any
    z-part leaves an ordinarily holomorphic function.
    """
    wz = dzeta(w_disc)
    ipts = to_real(np.moveaxis(w_disc.values, 0, -1))
    bpts = to_real(np.moveaxis(w_disc.boundary, 0, -1))
    lam_i = np.einsum("jqk,...k->...jq", limit.lam0, ipts)
    lam_b = np.einsum("jqk,...k->...jq", limit.lam0, bpts)
    vals = 0.5j * np.einsum("rtjq,qrt->jrt", lam_i, np.conj(wz.values))
    bnd = 0.5j * np.einsum("tjq,qt->jt", lam_b, np.conj(wz.boundary))
    integrand = DiscFunction(w_disc.grid, vals, bnd)
    return cauchy_green(integrand)


def standardize_disc(disc: DiscFunction, limit: LimitStructure, m: int
                     ) -> DiscFunction:
    """Map a limit-structure disc to a standard-structure one.

    (z, w) -> (z - Psi(w) + S(Re Psi(w)), w).  The move subtracts the
    holomorphy defect and restores the boundary real part through the
    Schwarz integral, so boundary attachment is preserved exactly: the
    transform is residual-preserving in both directions.
    """
    from .operators import schwarz  # local import to keep module load light

    grid = disc.grid
    n = disc.shape[0]
    w_disc = DiscFunction(grid, disc.values[m:], disc.boundary[m:])
    psi = coupling_primitive(w_disc, limit)
    new_z = []
    for j in range(m):
        zj = disc.component(j)
        pj = psi.component(j)
        lift = schwarz(BoundarySignal(grid, np.real(pj.boundary).astype(complex)))
        new_z.append(zj - pj + lift)
    parts = new_z + [disc.component(k) for k in range(m, n)]
    return DiscFunction.stack(parts)
