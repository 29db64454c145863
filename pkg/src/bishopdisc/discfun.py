"""Fields on the closed unit disc and signals on its boundary circle.

A ``DiscFunction`` stores complex samples at the interior polar nodes of a
``DiscGrid`` together with samples on the boundary circle.  Vector-valued
maps (discs in C^n) use a leading component axis; every operation
broadcasts over leading axes.  A ``BoundarySignal`` is the circle-only
analogue.
"""

from __future__ import annotations

import numpy as np

from .errors import BishopDiscError, DomainError
from .grid import DiscGrid, default_grid


class DiscFunction:
    """Scalar or vector field on the closed disc.

    ``values`` has shape (..., n_r, n_theta), ``boundary`` shape
    (..., n_theta).  Instances are treated as immutable.
    """

    __slots__ = ("grid", "values", "boundary", "_modes", "_bmodes")

    def __init__(self, grid: DiscGrid, values: np.ndarray, boundary: np.ndarray):
        values = np.asarray(values, dtype=complex)
        boundary = np.asarray(boundary, dtype=complex)
        if values.shape[-2:] != (grid.n_r, grid.n_theta):
            raise BishopDiscError(
                f"values shape {values.shape} does not match grid {grid!r}"
            )
        if boundary.shape != values.shape[:-2] + (grid.n_theta,):
            raise BishopDiscError(
                f"boundary shape {boundary.shape} does not match values {values.shape}"
            )
        self.grid = grid
        self.values = values
        self.boundary = boundary
        self._modes = None
        self._bmodes = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_callable(cls, fn, grid: DiscGrid | None = None) -> "DiscFunction":
        """Sample ``fn(zeta)`` on the grid; fn must broadcast over zeta."""
        grid = grid or default_grid()
        return cls(grid, fn(grid.zeta), fn(grid.boundary_zeta))

    @classmethod
    def zeros(cls, grid: DiscGrid, shape: tuple = ()) -> "DiscFunction":
        return cls(
            grid,
            np.zeros(shape + (grid.n_r, grid.n_theta), dtype=complex),
            np.zeros(shape + (grid.n_theta,), dtype=complex),
        )

    @classmethod
    def stack(cls, parts: list["DiscFunction"]) -> "DiscFunction":
        grid = parts[0].grid
        return cls(
            grid,
            np.stack([p.values for p in parts]),
            np.stack([p.boundary for p in parts]),
        )

    # -- structure ---------------------------------------------------------

    @property
    def shape(self) -> tuple:
        return self.values.shape[:-2]

    def component(self, i: int) -> "DiscFunction":
        return DiscFunction(self.grid, self.values[i], self.boundary[i])

    def angular_modes(self) -> np.ndarray:
        """Fourier coefficients of the interior samples, per radius."""
        if self._modes is None:
            self._modes = self.grid.to_modes(self.values)
        return self._modes

    def boundary_modes(self) -> np.ndarray:
        if self._bmodes is None:
            self._bmodes = self.grid.to_modes(self.boundary)
        return self._bmodes

    def boundary_signal(self) -> "BoundarySignal":
        return BoundarySignal(self.grid, self.boundary)

    # -- evaluation ---------------------------------------------------------

    def eval_at(self, zeta) -> np.ndarray:
        """Evaluate the interpolant at arbitrary points of the closed disc."""
        zeta = np.asarray(zeta, dtype=complex)
        flat = zeta.ravel()
        r = np.abs(flat)
        if np.any(r > 1.0 + 1e-10):
            raise DomainError(
                f"evaluation point outside the closed disc, |zeta| = {np.max(r)}"
            )
        r = np.minimum(r, 1.0)
        ang = np.angle(flat)
        A = self.grid.radial_interp_matrix(r)  # (P, n_r)
        prof = np.einsum("pr,...rk->...pk", A, self.angular_modes())
        phase = np.exp(1j * ang[:, None] * self.grid.modes[None, :])
        out = np.einsum("...pk,pk->...p", prof, phase)
        return out.reshape(self.shape + zeta.shape)

    def center_value(self) -> np.ndarray:
        """Value at zeta = 0."""
        prof = np.einsum("r,...rk->...k", self.grid.center_interp, self.angular_modes())
        return prof.sum(axis=-1)

    def center_x_derivative(self) -> np.ndarray:
        """d/d(Re zeta) at the center: limit of mode +1 and -1 profiles over r."""
        modes = self.angular_modes()
        over_r = modes / self.grid.radii[:, None]
        c = self.grid.center_interp
        a1 = np.einsum("r,...r->...", c, over_r[..., :, 1])
        b1 = np.einsum("r,...r->...", c, over_r[..., :, -1])
        return a1 + b1

    # -- norms ---------------------------------------------------------------

    def sup(self) -> float:
        m = np.max(np.abs(self.values)) if self.values.size else 0.0
        b = np.max(np.abs(self.boundary)) if self.boundary.size else 0.0
        return float(max(m, b))

    def distance(self, other: "DiscFunction") -> float:
        return (self - other).sup()

    # -- algebra ---------------------------------------------------------------

    def _binary(self, other, op):
        if isinstance(other, DiscFunction):
            if other.grid != self.grid:
                raise BishopDiscError("grid mismatch in DiscFunction arithmetic")
            return DiscFunction(
                self.grid, op(self.values, other.values), op(self.boundary, other.boundary)
            )
        return DiscFunction(self.grid, op(self.values, other), op(self.boundary, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __radd__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: np.subtract(b, a))

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    def __rmul__(self, other):
        return self._binary(other, np.multiply)

    def __neg__(self):
        return DiscFunction(self.grid, -self.values, -self.boundary)

    def conj(self) -> "DiscFunction":
        return DiscFunction(self.grid, np.conj(self.values), np.conj(self.boundary))

    def real_part(self) -> "DiscFunction":
        return DiscFunction(self.grid, self.values.real + 0j, self.boundary.real + 0j)

    # -- consistency and serialization -------------------------------------

    def boundary_reconstruction_defect(self) -> float:
        """sup |boundary - inverse FFT of its own coefficients| (FFT identity)."""
        back = self.grid.from_modes(self.boundary_modes())
        return float(np.max(np.abs(back - self.boundary)))

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.descriptor(),
            "shape": list(self.shape),
            "values": _complex_to_pairs(self.values),
            "boundary": _complex_to_pairs(self.boundary),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiscFunction":
        grid = default_grid(data["grid"]["n_theta"], data["grid"]["n_r"])
        shape = tuple(data["shape"])
        values = _pairs_to_complex(data["values"]).reshape(
            shape + (grid.n_r, grid.n_theta)
        )
        boundary = _pairs_to_complex(data["boundary"]).reshape(shape + (grid.n_theta,))
        return cls(grid, values, boundary)


class BoundarySignal:
    """Samples on the boundary circle, with their Fourier coefficients."""

    __slots__ = ("grid", "samples", "_coeffs")

    def __init__(self, grid: DiscGrid, samples: np.ndarray):
        samples = np.asarray(samples)
        if samples.shape[-1] != grid.n_theta:
            raise BishopDiscError(
                f"samples shape {samples.shape} does not match grid {grid!r}"
            )
        self.grid = grid
        self.samples = samples
        self._coeffs = None

    @classmethod
    def from_callable(cls, fn, grid: DiscGrid | None = None) -> "BoundarySignal":
        grid = grid or default_grid()
        return cls(grid, fn(grid.boundary_zeta))

    @classmethod
    def from_coeffs(cls, grid: DiscGrid, coeffs: np.ndarray) -> "BoundarySignal":
        return cls(grid, grid.from_modes(np.asarray(coeffs, dtype=complex)))

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            self._coeffs = self.grid.to_modes(self.samples)
        return self._coeffs

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(np.imag(self.samples))) <= tol)

    def sup(self) -> float:
        return float(np.max(np.abs(self.samples))) if self.samples.size else 0.0

    def negative_mode_energy(self) -> float:
        """Energy in strictly negative modes (Nyquist counted negative)."""
        neg = self.grid.modes < 0
        c = self.coeffs
        return float(np.sum(np.abs(c[..., neg]) ** 2))

    def parseval_defect(self) -> float:
        """| mean |samples|^2 - sum |coeffs|^2 |, which vanishes for the DFT."""
        mean_sq = np.mean(np.abs(self.samples) ** 2, axis=-1)
        coef_sq = np.sum(np.abs(self.coeffs) ** 2, axis=-1)
        return float(np.max(np.abs(mean_sq - coef_sq)))

    def fourier_decay_seminorm(self, order: float) -> float:
        """sum over k != 0 of |k|^order |c_k|, a smoothness proxy."""
        k = np.abs(self.grid.modes).astype(float)
        k[0] = 0.0
        weighted = np.abs(self.coeffs) * k**order
        return float(np.sum(weighted[..., self.grid.modes != 0]))

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.descriptor(),
            "shape": list(self.samples.shape[:-1]),
            "coeffs": _complex_to_pairs(self.coeffs),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BoundarySignal":
        grid = default_grid(data["grid"]["n_theta"], data["grid"]["n_r"])
        shape = tuple(data["shape"])
        coeffs = _pairs_to_complex(data["coeffs"]).reshape(shape + (grid.n_theta,))
        sig = cls.from_coeffs(grid, coeffs)
        sig._coeffs = coeffs  # keep the serialized coefficients bit-exact
        return sig


def _complex_to_pairs(a: np.ndarray) -> list:
    flat = np.asarray(a, dtype=complex).ravel()
    out = np.empty(2 * flat.size)
    out[0::2] = flat.real
    out[1::2] = flat.imag
    return out.tolist()


def _pairs_to_complex(pairs: list) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    return arr[0::2] + 1j * arr[1::2]
