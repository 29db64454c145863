"""Levi forms of scalar fields with respect to an almost complex structure.

Normalization fixed package-wide: with the flat Laplacian
d^2/dx^2 + d^2/dy^2 on the disc, the Levi form of |Z|^2 at the origin in
a unit direction equals 4.  Two independent routes are provided:

* ``direct``: the exterior-derivative formula expanded with a constant
  extension of the direction vector,

      L = v'Hv + (Jv)'H(Jv) + grad u . [ (D_{Jv}J) v + J (D_v J) v ],

  with H, grad u by analytic callbacks when the field provides them and
  central differences otherwise.  The first-derivative terms of J are
  exactly what makes the almost complex case differ from the integrable
  one; dropping them is the classic mistake.

* ``disc``: evaluate the Laplacian of u along a small holomorphic disc
  for J through the point in the given direction (quadratic rescaling in
  the direction is applied automatically).
"""

from __future__ import annotations

import numpy as np

from .discfun import DiscFunction
from .errors import ManifoldError
from .holomorphy import disc_through
from .linalg import to_real
from .operators import dbar, dzeta

_GRAD_STEP = 1e-6
_HESS_STEP = 1e-4


def gradient(u, p, step=_GRAD_STEP) -> np.ndarray:
    g = getattr(u, "gradient", None)
    if callable(g):
        return np.asarray(g(p), dtype=float)
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    out = np.empty(d)
    for k in range(d):
        h = np.zeros(d)
        h[k] = step
        out[k] = (u(p + h) - u(p - h)) / (2 * step)
    return out


def hessian(u, p, step=_HESS_STEP) -> np.ndarray:
    hs = getattr(u, "hessian", None)
    if callable(hs):
        return np.asarray(hs(p), dtype=float)
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    out = np.empty((d, d))
    u0 = u(p)
    for i in range(d):
        hi = np.zeros(d)
        hi[i] = step
        out[i, i] = (u(p + hi) + u(p - hi) - 2 * u0) / step**2
        for j in range(i + 1, d):
            hj = np.zeros(d)
            hj[j] = step
            out[i, j] = out[j, i] = (
                u(p + hi + hj) - u(p + hi - hj) - u(p - hi + hj) + u(p - hi - hj)
            ) / (4 * step**2)
    return out


def levi_form_direct_batch(u, J, p, directions) -> np.ndarray:
    """Levi form of u at p on a batch of direction vectors (K, 2n)."""
    p = np.asarray(p, dtype=float)
    V = np.atleast_2d(np.asarray(directions, dtype=float))
    Jp = J.eval(p)
    H = hessian(u, p)
    g = gradient(u, p)
    JV = V @ Jp.T
    quad = np.einsum("ki,ij,kj->k", V, H, V) + np.einsum("ki,ij,kj->k", JV, H, JV)
    # first-derivative terms of J, batched over all directions at once
    B = _directional_J(J, p, JV)   # (K, 2n, 2n) = D_{Jv} J
    A = _directional_J(J, p, V)    # (K, 2n, 2n) = D_v J
    mixed = np.einsum("i,kij,kj->k", g, B, V) + np.einsum(
        "i,ij,kjl,kl->k", g, Jp, A, V
    )
    return quad + mixed


def _directional_J(J, p, W, step=1e-5) -> np.ndarray:
    if J._jac is not None:
        return np.einsum("ijk,lk->lij", J._jac(p), np.asarray(W, dtype=float))
    pts = np.concatenate([p + step * W, p - step * W], axis=0)
    vals = J.eval(pts)
    k = W.shape[0]
    return (vals[:k] - vals[k:]) / (2 * step)


def levi_form(u, J, p, v, method="direct", grid=None) -> float:
    """Levi form L(u)(p)(v); ``method`` selects the route.

    The disc route builds a holomorphic disc for J with center p and
    derivative v (up to the automatic quadratic rescaling) and evaluates
    the Laplacian of u along it at the center, spectrally.
    """
    if method == "direct":
        return float(levi_form_direct_batch(u, J, p, np.asarray(v)[None])[0])
    if method != "disc":
        raise ValueError(f"unknown levi_form method {method!r}")
    from .grid import default_grid

    grid = grid or default_grid()
    p = np.asarray(p, dtype=float)
    pc = p[0::2] + 1j * p[1::2]
    vr = np.asarray(v, dtype=float)
    vc = vr[0::2] + 1j * vr[1::2]
    f, scale = disc_through(J, pc, vc, grid)
    interior = to_real(np.moveaxis(f.values, 0, -1))
    boundary = to_real(np.moveaxis(f.boundary, 0, -1))
    w = DiscFunction(grid, u(interior), u(boundary))
    lap_center = 4.0 * dzeta(dbar(w)).center_value()
    return float(np.real(lap_center)) / scale**2


# -- strictification -----------------------------------------------------------


def _hypersurface_h_frame(r_fn, J, p, tol=1e-8):
    """Orthonormal real basis of the J(p)-stable kernel of dr at p."""
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    dr = np.empty(d)
    for k in range(d):
        h = np.zeros(d)
        h[k] = _GRAD_STEP
        dr[k] = (r_fn(p + h) - r_fn(p - h)) / (2 * _GRAD_STEP)
    Jp = J.eval(p)
    M = np.vstack([dr, dr @ Jp])
    _, s, vt = np.linalg.svd(M)
    rank = int(np.sum(s > tol * max(s[0], 1.0)))
    null = vt[rank:]
    if null.shape[0] != d - 2:
        raise ManifoldError("level set is not a generating hypersurface at p")
    return null


def sphere_directions(dim, count, seed=0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((count, dim))
    return raw / np.linalg.norm(raw, axis=1)[:, None]


def strictify_defining(r_fn, J, p, margin=1e-6, max_doubling=31,
                       directions_per_dim=64, seed=0):
    """Smallest doubling constant C with r + C r^2 strictly positive Levi
    form on the full sampled tangent sphere at p.

    Precondition (checked): the Levi form of r is strictly positive on
    the holomorphic tangent sphere of {r = 0} at p.  Returns (C, field).
    """
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    n_dirs = directions_per_dim * (d - 1)

    null = _hypersurface_h_frame(r_fn, J, p)
    mix = sphere_directions(null.shape[0], n_dirs, seed)
    h_sphere = mix @ null
    base = levi_form_direct_batch(r_fn, J, p, h_sphere)
    if np.min(base) <= 0.0:
        raise ManifoldError(
            f"not strictly pseudoconvex: Levi form reaches {np.min(base):.3e} "
            "on the holomorphic tangent sphere"
        )

    full_sphere = sphere_directions(d, n_dirs, seed + 1)
    C = 1.0
    for _ in range(max_doubling):
        def u(points, C=C):
            r = r_fn(points)
            return r + C * r * r

        values = levi_form_direct_batch(u, J, p, full_sphere)
        if np.min(values) >= margin:
            return C, u
        C *= 2.0
    raise ManifoldError(
        "no doubling constant certified positivity: defining function is "
        "not strictly pseudoconvex within the search cap"
    )
