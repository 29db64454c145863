"""Solver for the nonlinear boundary problem of disc attachment.

Given a structure J, a generating submanifold E and family parameters
(w, c), find the disc f, holomorphic for the (dilated) structure, whose
boundary circle lies on the (dilated) manifold.  The problem is solved
for the holomorphic unknown g in the normalized frame:

    boundary defect   d(g) = r(Phi^{-1}(g)) |_{boundary}  = 0,

with the w-part of g prescribed and the z-part updated by a
frozen-Jacobian Newton step: the real-part prescription on the boundary
is inverted exactly by the Schwarz integral, and the m kernel directions
(additive imaginary constants) are pinned by Im z(0) = c.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dilation import dilate_anisotropic, dilate_isotropic
from .discfun import BoundarySignal, DiscFunction
from .errors import ConvergenceError
from .grid import default_grid
from .holomorphy import (disc_points, from_holomorphic_frame,
                         holomorphy_residual)
from .operators import holomorphic_from_coeffs, schwarz


@dataclass(frozen=True)
class SolverConfig:
    tol_boundary: float = 1e-11
    tol_interior: float = 1e-6
    max_outer: int = 60
    damping: float = 1.0
    min_damping: float = 1.0 / 64.0
    phi_tol: float = 1e-12
    phi_max_iter: int = 100
    chart_radius: float = 0.75


@dataclass(frozen=True)
class BishopParams:
    """Input data of one disc: prescribed w-part and kernel constants.

    ``w_coeffs``: complex (n-m, K) Taylor coefficients of the holomorphic
    w-part (so no negative modes by construction).  ``c``: real m-vector
    pinning Im z(0).  ``initial_z``: optional (m, K') coefficients seeding
    the z-part (the kernel normalization is re-imposed on the seed).
    """

    w_coeffs: np.ndarray
    c: np.ndarray
    delta: float = 1.0
    dilation: str = "none"  # none | isotropic | anisotropic
    initial_z: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "w_coeffs", np.atleast_2d(np.asarray(self.w_coeffs, dtype=complex)))
        object.__setattr__(self, "c", np.atleast_1d(np.asarray(self.c, dtype=float)))
        if self.dilation not in ("none", "isotropic", "anisotropic"):
            raise ValueError(f"unknown dilation kind {self.dilation!r}")
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    def norm(self) -> float:
        return float(max(np.max(np.abs(self.w_coeffs)), np.max(np.abs(self.c), initial=0.0)))


@dataclass(frozen=True)
class BishopSolution:
    disc: DiscFunction          # f in the dilated frame
    holomorphic: DiscFunction   # g = f + T(coupling), ordinary holomorphic
    params: BishopParams
    boundary_residual: float
    interior_residual: float
    outer_iterations: int
    phi_iterations: int
    contraction_ratio: float
    residual_history: tuple = field(default=())

    def center(self) -> np.ndarray:
        return self.disc.center_value()


def dilated_pair(J, E, params: BishopParams):
    if params.dilation == "isotropic":
        return dilate_isotropic(J, E, params.delta)
    if params.dilation == "anisotropic":
        return dilate_anisotropic(J, E, params.delta)
    return J, E


def _boundary_defect(f: DiscFunction, E) -> np.ndarray:
    """r(f) sampled on the boundary circle, shape (n_theta, m)."""
    _, bpts = disc_points(f)
    return E.defining(bpts)


def bishop_residual(g: DiscFunction, J, E, params: BishopParams | None = None,
                    config: SolverConfig | None = None) -> BoundarySignal:
    """Boundary defect of a holomorphic candidate g (after dilation)."""
    config = config or SolverConfig()
    if params is not None:
        J, E = dilated_pair(J, E, params)
    f, _ = from_holomorphic_frame(g, J, tol=config.phi_tol,
                                  max_iter=config.phi_max_iter)
    defect = _boundary_defect(f, E)
    return BoundarySignal(g.grid, defect.T.astype(complex))


def _assemble(z_parts: list[DiscFunction], w_disc: DiscFunction) -> DiscFunction:
    parts = list(z_parts) + [w_disc.component(q) for q in range(w_disc.shape[0])]
    return DiscFunction.stack(parts)


def _imag_center(zf: DiscFunction) -> float:
    return float(np.imag(zf.center_value()))


def solve_bishop(J, E, params: BishopParams, grid=None,
                 config: SolverConfig | None = None) -> BishopSolution:
    """Solve the disc-attachment problem for the given family parameters.

    Operates in the dilated frame selected by ``params``; the returned
    disc satisfies both residual bounds there.  Outer divergence after
    damping exhaustion raises with the standing advice (smaller delta).
    """
    grid = grid or default_grid()
    config = config or SolverConfig()
    J_d, E_d = dilated_pair(J, E, params)
    m, n = E_d.m, E_d.n
    if params.w_coeffs.shape[0] != n - m:
        raise ValueError(
            f"w has {params.w_coeffs.shape[0]} components, expected {n - m}"
        )
    if params.c.shape != (m,):
        raise ValueError(f"c has shape {params.c.shape}, expected ({m},)")
    if params.norm() > config.chart_radius:
        raise ConvergenceError(
            f"parameters of norm {params.norm():.3g} leave the configured "
            f"chart ball of radius {config.chart_radius:g}"
        )

    w_disc = holomorphic_from_coeffs(grid, params.w_coeffs)
    if params.initial_z is not None:
        z0 = np.atleast_2d(np.asarray(params.initial_z, dtype=complex))
    else:
        z0 = np.zeros((m, 1), dtype=complex)
    z_parts = [holomorphic_from_coeffs(grid, z0[j]) for j in range(m)]
    # kernel normalization Im z(0) = c, maintained for free afterwards
    # because the Schwarz lift has vanishing imaginary part at the center
    z_parts = [
        zf + 1j * (params.c[j] - _imag_center(zf)) for j, zf in enumerate(z_parts)
    ]

    damping = config.damping
    best = None
    history = []
    f = g = None
    phi_iters = 0
    ratio = 0.0
    it = 0
    while it < config.max_outer:
        it += 1
        g = _assemble(z_parts, w_disc)
        f, info = from_holomorphic_frame(g, J_d, tol=config.phi_tol,
                                         max_iter=config.phi_max_iter)
        phi_iters = info.iterations
        ratio = info.contraction_ratio
        defect = _boundary_defect(f, E_d)  # (n_theta, m) real
        sup = float(np.max(np.abs(defect)))
        history.append(sup)
        if best is None or sup < best[0]:
            best = (sup, [zp for zp in z_parts], f, g)
        if sup <= config.tol_boundary:
            break
        if sup > 2.0 * best[0]:
            damping *= 0.5
            if damping < config.min_damping:
                raise ConvergenceError(
                    "outer iteration diverges at minimal damping; the pair "
                    "(J, E) is outside the certified neighborhood -- use a "
                    "smaller dilation delta",
                    residual=sup,
                )
            z_parts = best[1]
            continue
        step = damping / E_d.lin_coeff
        new_parts = []
        for j in range(m):
            lift = schwarz(BoundarySignal(grid, defect[:, j].astype(complex)))
            new_parts.append(z_parts[j] - step * lift)
        z_parts = new_parts
    else:
        sup = best[0] if best else np.inf
        if sup > config.tol_boundary:
            raise ConvergenceError(
                f"boundary defect {sup:.3e} above tolerance after "
                f"{config.max_outer} outer steps",
                residual=sup,
            )

    sup, z_parts, f, g = best
    interior = holomorphy_residual(f, J_d).sup()
    return BishopSolution(
        disc=f,
        holomorphic=g,
        params=params,
        boundary_residual=sup,
        interior_residual=float(interior),
        outer_iterations=it,
        phi_iterations=phi_iters,
        contraction_ratio=ratio,
        residual_history=tuple(history),
    )


def pullback_disc(sol_disc: DiscFunction, params: BishopParams, m: int) -> DiscFunction:
    """Undo the dilation on a solved disc (back to original coordinates)."""
    if params.dilation == "none":
        return sol_disc
    d = params.delta
    if params.dilation == "isotropic":
        return sol_disc * d
    scale = np.concatenate(
        [np.full(m, d), np.full(sol_disc.shape[0] - m, np.sqrt(d))]
    )
    return DiscFunction(
        sol_disc.grid,
        sol_disc.values * scale[:, None, None],
        sol_disc.boundary * scale[:, None],
    )


# -- parameterized families ----------------------------------------------------


@dataclass(frozen=True)
class ChartMember:
    index: int
    params: BishopParams
    solution: BishopSolution | None
    error: str | None = None


@dataclass(frozen=True)
class ChartResult:
    members: tuple
    injectivity_ratio: float
    max_second_difference: float
    failures: tuple

    @property
    def solved(self) -> list:
        return [mb for mb in self.members if mb.solution is not None]

    def all_solved(self) -> bool:
        return not self.failures


def disc_chart(J, E, param_list, grid=None, config=None, jobs=1,
               axes_shape=None) -> ChartResult:
    """Solve a whole indexed family; failures become a manifest, not a crash.

    ``axes_shape``: optional tuple reshaping the index set into a
    structured grid, enabling the second-difference smoothness diagnostic
    along each axis.  Members run in a thread pool; output order is by
    index regardless of completion order.
    """
    grid = grid or default_grid()
    config = config or SolverConfig()

    def run(idx_params):
        idx, prm = idx_params
        try:
            sol = solve_bishop(J, E, prm, grid=grid, config=config)
            return ChartMember(idx, prm, sol)
        except Exception as exc:
            return ChartMember(idx, prm, None, error=f"{type(exc).__name__}: {exc}")

    tasks = list(enumerate(param_list))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            members = list(pool.map(run, tasks))
    else:
        members = [run(t) for t in tasks]
    members.sort(key=lambda mb: mb.index)
    failures = tuple((mb.index, mb.error) for mb in members if mb.error)

    solved = [mb for mb in members if mb.solution is not None]
    ratio = np.inf
    for a in range(len(solved)):
        for b in range(a + 1, len(solved)):
            pa, pb = solved[a].params, solved[b].params
            dp = max(
                np.max(np.abs(pa.w_coeffs - pb.w_coeffs), initial=0.0),
                np.max(np.abs(pa.c - pb.c), initial=0.0),
            )
            if dp < 1e-14:
                continue
            dd = solved[a].solution.disc.distance(solved[b].solution.disc)
            ratio = min(ratio, dd / dp)

    second = 0.0
    if axes_shape is not None and not failures:
        discs = np.empty(axes_shape, dtype=object)
        for mb in members:
            discs[np.unravel_index(mb.index, axes_shape)] = mb.solution.disc
        for ax in range(len(axes_shape)):
            if axes_shape[ax] < 3:
                continue
            sl = np.moveaxis(discs, ax, 0)
            flat = sl.reshape(axes_shape[ax], -1)
            for col in range(flat.shape[1]):
                for i in range(1, axes_shape[ax] - 1):
                    dd = (flat[i + 1, col] - 2.0 * flat[i, col]) + flat[i - 1, col]
                    second = max(second, dd.sup())
    return ChartResult(
        members=tuple(members),
        injectivity_ratio=float(ratio),
        max_second_difference=float(second),
        failures=failures,
    )


def chart_params_grid(w_base, c_values, w_perturbations=None, delta=1.0,
                      dilation="none") -> list[BishopParams]:
    """Cartesian parameter list: one BishopParams per (w-perturbation, c)."""
    out = []
    perts = w_perturbations if w_perturbations is not None else [np.zeros_like(w_base)]
    for dw in perts:
        for c in c_values:
            out.append(
                BishopParams(
                    w_coeffs=np.asarray(w_base) + np.asarray(dw),
                    c=np.asarray(c, dtype=float),
                    delta=delta,
                    dilation=dilation,
                )
            )
    return out
