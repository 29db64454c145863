"""Polar tensor grid on the closed unit disc.

Interior nodes are the tensor product of Gauss-Legendre radii on (0, 1)
with uniformly spaced angles; the boundary circle r = 1 is kept as a
separate row of samples.  Angular content is handled through the FFT,
radial content through barycentric Lagrange interpolation and
differentiation on the Gauss nodes.

The grid owns the precomputed linear machinery every operator needs:
the radial differentiation matrix, interpolation matrices to arbitrary
radii, and the per-angular-mode radial quadrature matrices of the area
integral that inverts d/d(conj zeta) (built lazily, cached).
"""

from __future__ import annotations

import numpy as np

from .errors import BishopDiscError

_GRID_CACHE: dict[tuple[int, int], "DiscGrid"] = {}


def _gauss_legendre_01(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    # direct product formula; ratios are all that matter, so normalize
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    w = 1.0 / np.prod(diff, axis=1)
    return w / np.max(np.abs(w))


class DiscGrid:
    """Discretization of the closed unit disc.

    Parameters
    ----------
    n_theta : number of boundary samples / angular modes (power of two)
    n_r     : number of interior Gauss-Legendre radii on (0, 1)
    """

    def __init__(self, n_theta: int = 128, n_r: int = 48):
        if n_theta < 8 or (n_theta & (n_theta - 1)) != 0:
            raise BishopDiscError(f"n_theta must be a power of two >= 8, got {n_theta}")
        if n_r < 4:
            raise BishopDiscError(f"n_r must be >= 4, got {n_r}")
        self.n_theta = int(n_theta)
        self.n_r = int(n_r)
        self.theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        self.radii, self.radial_weights = _gauss_legendre_01(n_r)
        self.boundary_zeta = np.exp(1j * self.theta)
        self.zeta = self.radii[:, None] * self.boundary_zeta[None, :]
        # signed mode numbers in FFT slot order, Nyquist counted negative
        k = np.fft.fftfreq(n_theta, d=1.0 / n_theta)
        self.modes = k.astype(int)
        self._bary = _barycentric_weights(self.radii)
        self._diff = None
        self._diff_bnd = None
        self._cg = None
        self._center_interp = None
        self._boundary_interp = None

    # -- bookkeeping ----------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, DiscGrid)
            and other.n_theta == self.n_theta
            and other.n_r == self.n_r
        )

    def __hash__(self):
        return hash((self.n_theta, self.n_r))

    def __repr__(self):
        return f"DiscGrid(n_theta={self.n_theta}, n_r={self.n_r})"

    def descriptor(self) -> dict:
        return {"n_theta": self.n_theta, "n_r": self.n_r}

    # -- quadrature ------------------------------------------------------

    def integrate(self, values: np.ndarray) -> complex:
        """Area integral over the disc of a field sampled at interior nodes."""
        w = self.radial_weights * self.radii
        return complex(np.einsum("i,...ij->...", w, values) * (2.0 * np.pi / self.n_theta))

    # -- radial interpolation and differentiation ------------------------

    def radial_interp_matrix(self, targets: np.ndarray) -> np.ndarray:
        """Barycentric interpolation matrix from the Gauss radii to ``targets``."""
        t = np.atleast_1d(np.asarray(targets, dtype=float))
        d = t[:, None] - self.radii[None, :]
        exact = np.abs(d) < 1e-14
        d = np.where(exact, 1.0, d)
        M = self._bary[None, :] / d
        M /= M.sum(axis=1)[:, None]
        hit_rows = exact.any(axis=1)
        if np.any(hit_rows):
            M[hit_rows] = 0.0
            M[exact] = 1.0
        return M

    @property
    def radial_diff(self) -> np.ndarray:
        """Differentiation matrix on the Gauss radii."""
        if self._diff is None:
            x, w = self.radii, self._bary
            D = (w[None, :] / w[:, None]) / (x[:, None] - x[None, :] + np.eye(self.n_r))
            np.fill_diagonal(D, 0.0)
            np.fill_diagonal(D, -D.sum(axis=1))
            self._diff = D
        return self._diff

    @property
    def radial_diff_boundary(self) -> np.ndarray:
        """Row vector: derivative of the radial interpolant evaluated at r = 1."""
        if self._diff_bnd is None:
            # p(t) = sum_j c_j(t) f_j / sum_j c_j(t), c_j = w_j/(t - x_j);
            # differentiate at t = 1 (not a node, so this is regular)
            x, w = self.radii, self._bary
            d = 1.0 - x
            c = w / d
            s = c.sum()
            q = c / d
            self._diff_bnd = -q / s + (q.sum() / s) * (c / s)
        return self._diff_bnd

    @property
    def center_interp(self) -> np.ndarray:
        """Row vector: value of the radial interpolant at r = 0."""
        if self._center_interp is None:
            self._center_interp = self.radial_interp_matrix(np.array([0.0]))[0]
        return self._center_interp

    @property
    def boundary_interp(self) -> np.ndarray:
        """Row vector: value of the radial interpolant at r = 1."""
        if self._boundary_interp is None:
            self._boundary_interp = self.radial_interp_matrix(np.array([1.0]))[0]
        return self._boundary_interp

    # -- angular transforms ----------------------------------------------

    def to_modes(self, samples: np.ndarray) -> np.ndarray:
        """Angular FFT, normalized so coefficients are Fourier coefficients."""
        return np.fft.fft(samples, axis=-1) / self.n_theta

    def from_modes(self, coeffs: np.ndarray) -> np.ndarray:
        return np.fft.ifft(coeffs, axis=-1) * self.n_theta

    # -- area-integral inverse of dbar ------------------------------------

    def cg_matrices(self) -> np.ndarray:
        """Per-mode radial matrices of the area integral inverting dbar.

        Output mode k at radius s couples to input mode k+1:
          k >= 0:  -2 int_s^1 g(rho) (s/rho)^k drho      (outer part)
          k <  0:   2 int_0^s g(rho) (rho/s)^{|k|} drho  (inner part)
        Targets are the interior radii followed by r = 1.  Shape
        (n_theta, n_r + 1, n_r), real.
        """
        if self._cg is None:
            nq = max(32, self.n_r // 2 + 8)
            xq, wq = _gauss_legendre_01(nq)
            n_half = self.n_theta // 2
            targets = np.concatenate([self.radii, [1.0]])
            nt = targets.size
            M = np.zeros((self.n_theta, nt, self.n_r))
            # inner integrals: nodes rho = s*xq, factors (rho/s)^p = xq^p
            pow_in = xq[:, None] ** np.arange(1, n_half + 1)[None, :]  # (nq, n_half)
            for i, s in enumerate(targets):
                A_in = self.radial_interp_matrix(s * xq)  # (nq, n_r)
                base = (s * wq)[:, None] * pow_in  # (nq, n_half)
                rows = 2.0 * np.einsum("qp,qr->pr", base, A_in)
                # signed mode -p sits in FFT slot n_theta - p
                M[self.n_theta - np.arange(1, n_half + 1), i, :] = rows
                if s < 1.0:
                    rho = s + (1.0 - s) * xq
                    A_out = self.radial_interp_matrix(rho)
                    b = s / rho
                    pow_out = b[:, None] ** np.arange(0, n_half)[None, :]
                    base = ((1.0 - s) * wq)[:, None] * pow_out
                    rows = -2.0 * np.einsum("qp,qr->pr", base, A_out)
                    M[np.arange(0, n_half), i, :] = rows
            self._cg = M
        return self._cg


def default_grid(n_theta: int = 128, n_r: int = 48) -> DiscGrid:
    """Shared, cached grid instance (grids are immutable)."""
    key = (n_theta, n_r)
    if key not in _GRID_CACHE:
        _GRID_CACHE[key] = DiscGrid(n_theta, n_r)
    return _GRID_CACHE[key]
