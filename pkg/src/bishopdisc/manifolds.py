"""Generating real submanifolds of C^n in graph form.

A codimension-m submanifold through the origin is carried as
r(Z) = a * (Re z - h(Im z, w)) componentwise, with z the first m complex
coordinates, h(0) = 0, grad h(0) = 0 and a fixed linear coefficient
``a`` (1 for plain graphs, 2 for the quadric models written as
2 Re z_j + H_j(w) = 0).  The coefficient matters to solvers that invert
the linearization, so it is stored, not inferred.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ManifoldError
from .linalg import to_complex

_FD_STEP = 1e-6


class GenericSubmanifold:
    """Codimension-m generating submanifold in graph form."""

    def __init__(self, n, m, h_fn, lin_coeff=1.0, grad_h_fn=None, label="manifold"):
        if not (1 <= m <= n):
            raise ManifoldError(f"codimension m={m} out of range for n={n}")
        self.n = int(n)
        self.m = int(m)
        self._h = h_fn
        self._grad_h = grad_h_fn
        self.lin_coeff = float(lin_coeff)
        self.label = label

    # h arguments: y (..., m) real, w (..., 2(n-m)) real coordinates of w
    def h(self, y, w) -> np.ndarray:
        return self._h(np.asarray(y, dtype=float), np.asarray(w, dtype=float))

    def split(self, points):
        """Real points (..., 2n) -> (x (...,m), y (...,m), w (...,2(n-m)))."""
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != 2 * self.n:
            raise ManifoldError(
                f"points have dimension {points.shape[-1]}, expected {2 * self.n}"
            )
        zpart = points[..., : 2 * self.m]
        return zpart[..., 0::2], zpart[..., 1::2], points[..., 2 * self.m:]

    def defining(self, points) -> np.ndarray:
        """Vector defining function r(Z), shape (..., m)."""
        x, y, w = self.split(points)
        return self.lin_coeff * (x - self.h(y, w))

    def defining_gradient(self, points) -> np.ndarray:
        """d r at the given points, shape (..., m, 2n)."""
        points = np.asarray(points, dtype=float)
        d = 2 * self.n
        out = np.empty(points.shape[:-1] + (self.m, d))
        for k in range(d):
            step = np.zeros(d)
            step[k] = _FD_STEP
            out[..., k] = (self.defining(points + step) - self.defining(points - step)) / (
                2 * _FD_STEP
            )
        return out

    def on_manifold(self, points, tol=1e-9) -> bool:
        return bool(np.max(np.abs(self.defining(points))) <= tol)

    def graph_point(self, y, w) -> np.ndarray:
        """Lift (Im z, w) to the manifold point (h + i y, w) in real coords."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        w = np.atleast_1d(np.asarray(w, dtype=float))
        x = self.h(y, w)
        out = np.empty(y.shape[:-1] + (2 * self.n,))
        out[..., 0 : 2 * self.m : 2] = x
        out[..., 1 : 2 * self.m : 2] = y
        out[..., 2 * self.m :] = w
        return out

    def sample_points(self, count, radius, seed) -> np.ndarray:
        """Deterministic manifold points near the origin."""
        rng = np.random.default_rng(seed)
        y = radius * rng.uniform(-1.0, 1.0, (count, self.m))
        w = radius * rng.uniform(-1.0, 1.0, (count, 2 * (self.n - self.m)))
        return self.graph_point(y, w)

    def dilate(self, delta, anisotropic=False) -> "GenericSubmanifold":
        """Rescaled manifold: r_delta(Z) = r(delta z, delta^s w) / delta.

        s = 1 for the isotropic dilation, s = 1/2 for the anisotropic one.
        """
        if delta <= 0:
            raise ManifoldError("dilation scale must be positive")
        s = 0.5 if anisotropic else 1.0
        base_h = self._h
        d, ws = float(delta), float(delta) ** s

        def h_delta(y, w):
            return base_h(d * y, ws * w) / d

        return GenericSubmanifold(
            self.n,
            self.m,
            h_delta,
            lin_coeff=self.lin_coeff,
            label=f"{self.label}@delta={delta:g}" + ("(aniso)" if anisotropic else ""),
        )


def flat_manifold(n, m, label="flat") -> GenericSubmanifold:
    return GenericSubmanifold(n, m, lambda y, w: np.zeros(y.shape), 1.0, label=label)


def graph_from_monomials(n, m, monomials, lin_coeff=1.0, label="graph"):
    """h given as {exponent vector over (y_1..y_m, xw_1, yw_1, ...): R^m coeff}."""
    table = {tuple(int(e) for e in k): np.asarray(v, dtype=float).reshape(m)
             for k, v in monomials.items()}
    dim = m + 2 * (n - m)
    for exps in table:
        if len(exps) != dim:
            raise ManifoldError(f"h exponent vector {exps} must have length {dim}")
        if sum(exps) < 2:
            raise ManifoldError("h must vanish to second order at the origin")

    def h_fn(y, w):
        args = np.concatenate([y, w], axis=-1)
        out = np.zeros(y.shape[:-1] + (m,))
        for exps, coeff in table.items():
            mono = np.ones(args.shape[:-1])
            for k, e in enumerate(exps):
                if e:
                    mono = mono * args[..., k] ** e
            out += mono[..., None] * coeff
        return out

    return GenericSubmanifold(n, m, h_fn, lin_coeff=lin_coeff, label=label)


# -- quadric models ----------------------------------------------------------


def hermitian_value(H, w_complex) -> np.ndarray:
    """H(w) = sum_{k,s} H[j,k,s] w_k conj(w_s), real for Hermitian H."""
    return np.real(
        np.einsum("jks,...k,...s->...j", H, w_complex, np.conj(w_complex))
    )


@dataclass(frozen=True)
class QuadricModel:
    """Model quadric  2 Re z_j + H_j(w) = 0, j = 1..m.

    ``hermitian`` has shape (m, n-m, n-m), each slice Hermitian.  The
    normalized form used by the closed-form disc families has the last
    form carrying coefficient -1 on |w_last|^2 with no other terms in its
    last row/column, and the remaining forms free of |w_last|^2.
    """

    n: int
    m: int
    hermitian: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.hermitian, dtype=complex)
        k = self.n - self.m
        if H.shape != (self.m, k, k):
            raise ManifoldError(f"hermitian forms must have shape ({self.m},{k},{k})")
        if np.max(np.abs(H - np.conj(np.swapaxes(H, -1, -2)))) > 1e-12:
            raise ManifoldError("forms must be Hermitian")
        object.__setattr__(self, "hermitian", H)

    def normalization_defects(self) -> dict:
        H = self.hermitian
        last = self.n - self.m - 1
        off = 0.0
        if self.m > 1:
            off = float(np.max(np.abs(H[: self.m - 1, last, last])))
        cross = 0.0
        if last > 0:
            cross = float(
                max(
                    np.max(np.abs(H[self.m - 1, last, :last])),
                    np.max(np.abs(H[self.m - 1, :last, last])),
                )
            )
        return {
            "last_coeff_minus_one": float(abs(H[self.m - 1, last, last] + 1.0)),
            "others_without_last": off,
            "last_form_cross_terms": cross,
        }

    def is_normalized(self, tol=1e-12) -> bool:
        d = self.normalization_defects()
        return d["last_coeff_minus_one"] <= tol and d["others_without_last"] <= tol

    def normalized(self) -> "QuadricModel":
        """Linear recombination of the defining components enforcing the
        -1 coefficient on |w_last|^2 in the last form and its absence in
        the others (degenerate input raises)."""
        H = self.hermitian.copy()
        last = self.n - self.m - 1
        alpha = np.real(H[:, last, last])
        pivot = int(np.argmax(np.abs(alpha)))
        if abs(alpha[pivot]) < 1e-12:
            raise ManifoldError(
                "no defining component carries |w_last|^2: model is degenerate "
                "along the reference line"
            )
        Hp = H[pivot] / (-alpha[pivot])  # carries exactly -1 on |w_last|^2
        rest = []
        for j in range(self.m):
            if j == pivot:
                continue
            # adding alpha_j * Hp cancels the |w_last|^2 coefficient of H_j
            rest.append(H[j] + np.real(H[j, last, last]) * Hp)
        new = np.stack(rest + [Hp]) if rest else Hp[None]
        return QuadricModel(self.n, self.m, new)

    def value_on_line(self) -> float:
        """Coefficient of the last form on the reference complex line."""
        last = self.n - self.m - 1
        return float(np.real(self.hermitian[self.m - 1, last, last]))

    def submanifold(self) -> GenericSubmanifold:
        """Graph form: 2 Re z_j + H_j(w) = 0 ⇔ Re z_j = -H_j(w)/2."""
        H = self.hermitian

        def h_fn(y, w):
            wc = to_complex(w)
            return -0.5 * hermitian_value(H, wc)

        return GenericSubmanifold(
            self.n, self.m, h_fn, lin_coeff=2.0, label=f"quadric(m={self.m})"
        )


def model_quadric(n, m=None) -> QuadricModel:
    """The normalized reference quadric: Re z_j = 0 (j < m), 2 Re z_m = |w|^2."""
    if m is None:
        m = n - 1
    k = n - m
    H = np.zeros((m, k, k), dtype=complex)
    H[m - 1] = -np.eye(k)
    if m > 1 and k > 1:
        # keep the normalization flags: only the last form sees |w_last|^2
        H[: m - 1] = 0.0
    return QuadricModel(n, m, H)


# -- tangent frames -----------------------------------------------------------


@dataclass(frozen=True)
class TangentFrame:
    """Orthonormal frames of the tangent spaces at a manifold point."""

    point: np.ndarray
    h_basis_complex: np.ndarray  # (n-m, n) complex rows, one per complex direction
    h_basis_real: np.ndarray     # (2(n-m), 2n) real rows, J-stable span
    t_basis_real: np.ndarray     # (2n-m, 2n) real rows of T_p(E)
    stability_defect: float = field(default=0.0)


def holomorphic_tangent(E: GenericSubmanifold, J, p, tol=1e-8) -> TangentFrame:
    """Largest J(p)-invariant subspace of T_p(E), as an orthonormal frame.

    The subspace is the joint real kernel of the rows dr_j and dr_j∘J(p);
    its real dimension must be exactly 2(n-m) (generating point).
    """
    p = np.asarray(p, dtype=float)
    r = E.defining(p)
    if np.max(np.abs(r)) > tol:
        raise ManifoldError(f"point is off the manifold: |r| = {np.max(np.abs(r)):.3e}")
    dr = E.defining_gradient(p)
    Jp = J.eval(p)
    n, m = E.n, E.m

    # full tangent space
    _, s_t, vt_t = np.linalg.svd(dr)
    rank_t = int(np.sum(s_t > tol * max(s_t[0], 1.0)))
    if rank_t != m:
        raise ManifoldError(f"defining gradient has rank {rank_t}, expected {m}")
    t_basis = vt_t[rank_t:]

    M = np.vstack([dr, dr @ Jp])
    _, s, vt = np.linalg.svd(M)
    rank = int(np.sum(s > tol * max(s[0], 1.0)))
    null = vt[rank:]
    if null.shape[0] != 2 * (n - m):
        raise ManifoldError(
            f"holomorphic tangent space has real dimension {null.shape[0]}, "
            f"expected {2 * (n - m)}: point is not generating"
        )

    # orthonormal basis organized in J(p)-stable pairs (u, J u)
    proj = null.T @ null
    basis = []
    defect = 0.0
    for row in null:
        u = row - sum(np.dot(b, row) * b for b in basis) if basis else row
        norm = np.linalg.norm(u)
        if norm < 1e-10:
            continue
        u = u / norm
        ju = Jp @ u
        defect = max(defect, float(np.linalg.norm(ju - proj @ ju)))
        ju = proj @ ju
        ju = ju - np.dot(u, ju) * u
        for b in basis:
            ju = ju - np.dot(b, ju) * b
        norm = np.linalg.norm(ju)
        if norm < 1e-10:
            raise ManifoldError("failed to build a J-stable orthonormal frame")
        basis.extend([u, ju / norm])
        if len(basis) == 2 * (n - m):
            break
    real_basis = np.array(basis)
    complex_basis = to_complex(real_basis[0::2])
    return TangentFrame(
        point=p,
        h_basis_complex=complex_basis,
        h_basis_real=real_basis,
        t_basis_real=t_basis,
        stability_defect=defect,
    )


# -- level-set foliation -------------------------------------------------------


def foliation_leaf(r_fn, epsilon, big_n):
    """Leaf defining function r(Z) + eps |Z|^2 - eps / N (as a callable)."""

    def leaf(points):
        points = np.asarray(points, dtype=float)
        sq = np.sum(points**2, axis=-1)
        return r_fn(points) + epsilon * sq - epsilon / big_n

    return leaf


def leaf_parameter(r_fn, points, big_n, guard_radius=None) -> np.ndarray:
    """The leaf index eps(Z) = r(Z) / (1/N - |Z|^2) through a given point.

    Defined for |Z|^2 < 1/N; by default the domain is guarded at the
    smaller radius 1/(2 sqrt(N)).
    """
    points = np.asarray(points, dtype=float)
    sq = np.sum(points**2, axis=-1)
    if guard_radius is None:
        guard_radius = 0.5 / np.sqrt(big_n)
    if np.any(sq >= 1.0 / big_n):
        raise ManifoldError("leaf parameter undefined: |Z|^2 >= 1/N")
    if np.any(np.sqrt(sq) >= guard_radius):
        raise ManifoldError(
            f"point outside the guarded leaf domain |Z| < {guard_radius:g}"
        )
    return r_fn(points) / (1.0 / big_n - sq)
