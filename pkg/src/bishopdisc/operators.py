"""Integral and differential operators on the unit disc.

Sign conventions, fixed here once:

* ``dbar`` is (d/dx + i d/dy)/2 and ``dzeta`` is (d/dx - i d/dy)/2;
* ``cauchy_green`` is the area-integral convolution with 1/(pi zeta)
  normalized so that  dbar(cauchy_green(g)) = g  on the disc (the right
  inverse of dbar); in particular cauchy_green(1) = conj(zeta);
* ``schwarz`` reconstructs the holomorphic function with prescribed
  boundary real part and imaginary part zero at the center.

Everything is spectral in the angle and barycentric-Lagrange in the
radius.  Both dbar and cauchy_green are diagonal over angular modes:
mode k of the output couples only to mode k -/+ 1 of the input, so each
operator reduces to a family of small radial matrices cached on the grid.
"""

from __future__ import annotations

import numpy as np

from .discfun import BoundarySignal, DiscFunction
from .errors import BishopDiscError


def dbar(f: DiscFunction) -> DiscFunction:
    """d/d(conj zeta).  Holomorphic inputs map to zero."""
    return _wirtinger(f, sign=-1.0, shift=1)


def dzeta(f: DiscFunction) -> DiscFunction:
    """d/d(zeta)."""
    return _wirtinger(f, sign=+1.0, shift=-1)


def _wirtinger(f: DiscFunction, sign: float, shift: int) -> DiscFunction:
    # on mode k:  dbar -> (1/2)(d/dr - k/r) into mode k+1
    #             dzeta -> (1/2)(d/dr + k/r) into mode k-1
    grid = f.grid
    fhat = f.angular_modes()
    k = grid.modes
    dfdr = np.einsum("ij,...jm->...im", grid.radial_diff, fhat)
    term = 0.5 * (dfdr + sign * k * fhat / grid.radii[:, None])
    out_hat = np.roll(term, shift, axis=-1)

    dfdr_b = np.einsum("j,...jm->...m", grid.radial_diff_boundary, fhat)
    fhat_b = np.einsum("j,...jm->...m", grid.boundary_interp, fhat)
    term_b = 0.5 * (dfdr_b + sign * k * fhat_b)
    bnd_hat = np.roll(term_b, shift, axis=-1)

    return DiscFunction(grid, grid.from_modes(out_hat), grid.from_modes(bnd_hat))


def cauchy_green(g: DiscFunction) -> DiscFunction:
    """Area-integral right inverse of dbar on the disc.

    The integration absorbs the integrable pole exactly: each angular
    mode k of the output is a one-sided radial integral of input mode
    k+1 against the bounded weight (r</r>)^{|k|}, so no kernel
    regularization is ever needed.
    """
    grid = g.grid
    M = grid.cg_matrices()  # (n_theta, n_r + 1, n_r)
    shifted = np.roll(g.angular_modes(), -1, axis=-1)  # slot k holds input mode k+1
    out = np.einsum("mij,...jm->...im", M, shifted)
    values = grid.from_modes(out[..., : grid.n_r, :])
    boundary = grid.from_modes(out[..., grid.n_r, :])
    return DiscFunction(grid, values, boundary)


def schwarz(h: BoundarySignal, real_tol: float = 1e-10) -> DiscFunction:
    """Holomorphic extension with boundary real part ``h``.

    Mode-wise: the constant mode passes through (taken exactly real, so
    the imaginary part at the center is exactly zero), and each positive
    mode c_k contributes 2 c_k zeta^k.  Content at or above the Nyquist
    mode is not representable and is dropped.
    """
    a = schwarz_coefficients(h, real_tol)
    grid = h.grid
    radial = np.where(
        grid.modes[None, :] >= 0,
        grid.radii[:, None] ** np.abs(grid.modes)[None, :],
        0.0,
    )
    mode_profiles = a[..., None, :] * radial
    out = DiscFunction(grid, grid.from_modes(mode_profiles), grid.from_modes(a))
    out._modes = mode_profiles
    out._bmodes = a
    return out


def schwarz_coefficients(h: BoundarySignal, real_tol: float = 1e-10) -> np.ndarray:
    """Mode coefficients of the Schwarz extension, in FFT slot order.

    Slot 0 is forced exactly real, so the value of the extension at the
    center has imaginary part exactly zero by construction.
    """
    if not h.is_real(real_tol):
        raise BishopDiscError("schwarz requires a real boundary signal")
    grid = h.grid
    c = h.coeffs
    a = np.zeros_like(np.asarray(c, dtype=complex))
    pos = grid.modes > 0
    a[..., pos] = 2.0 * c[..., pos]
    a[..., 0] = np.real(c[..., 0])
    return a


def boundary_to_holomorphic(
    b: BoundarySignal, tol: float = 1e-10
) -> tuple[DiscFunction, float]:
    """Extend boundary data of a holomorphic function into the disc.

    Negative modes (Nyquist included) are discarded; if their energy
    exceeds ``tol`` relative to the total, the input was not boundary
    data of a holomorphic function and an error is raised.  Returns the
    extension together with the discarded energy.
    """
    grid = b.grid
    c = np.asarray(b.coeffs, dtype=complex)
    total = float(np.sum(np.abs(c) ** 2))
    discarded = b.negative_mode_energy()
    if discarded > tol * max(total, 1e-30):
        raise BishopDiscError(
            f"boundary data is not holomorphic: negative-mode energy "
            f"{discarded:.3e} of total {total:.3e} exceeds tolerance {tol:.1e}"
        )
    a = np.where(grid.modes >= 0, c, 0.0)
    radial = np.where(
        grid.modes[None, :] >= 0,
        grid.radii[:, None] ** np.abs(grid.modes)[None, :],
        0.0,
    )
    values = grid.from_modes(a[..., None, :] * radial)
    boundary = grid.from_modes(a)
    return DiscFunction(grid, values, boundary), discarded


def holomorphic_from_coeffs(grid, coeffs: np.ndarray) -> DiscFunction:
    """Build the disc function sum_k coeffs[..., k] zeta^k (k from 0 up)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    deg = coeffs.shape[-1]
    if deg > grid.n_theta // 2:
        raise BishopDiscError("too many holomorphic coefficients for this grid")
    powers_i = grid.zeta[None, ...] ** np.arange(deg)[:, None, None]
    powers_b = grid.boundary_zeta[None, :] ** np.arange(deg)[:, None]
    values = np.einsum("...k,kij->...ij", coeffs, powers_i)
    boundary = np.einsum("...k,kj->...j", coeffs, powers_b)
    return DiscFunction(grid, values, boundary)
