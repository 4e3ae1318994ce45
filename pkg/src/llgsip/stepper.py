"""One time step of the semi-implicit projection scheme, plus the time loop.

Each step solves the linear system

    A(mt) = mt + dt*[beta m x lap_h(mt) + gamma m x (m x lap_h(mt))]
          = m - dt*[beta m x H + gamma m x (m x H)] + dt*f

matrix-free with a non-symmetric Krylov method (m the previous, pointwise
unit state; H the explicit non-exchange field; f an optional forcing), then
renormalizes mt node by node back onto the unit sphere.

In the force-free exchange-only case the intermediate solution satisfies
mt . m == 1 and |mt| >= 1 at every node (up to solver tolerance), which is
what makes the projection both well defined and energy dissipative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, bicgstab, gmres

from .effective_field import FieldModel, explicit_field_apply, extended_energy
from .grid import (
    GridMismatchError,
    VectorField,
    array_laplacian,
    l2_norm,
)

GMRES = "gmres"
BICGSTAB = "bicgstab"


class SolverError(RuntimeError):
    """Krylov solve failed; carries the residual history."""

    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = residuals


class DegenerateStateError(RuntimeError):
    """An intermediate node collapsed to (numerically) zero length."""


@dataclass(frozen=True)
class SchemeParams:
    """Physical and scheme constants.

    beta:    precession coefficient
    gamma:   damping coefficient, > 0
    dt:      time step, > 0
    model:   effective-field model
    forcing: optional closure (x, y[, z], t) -> 3 components, sampled at
             nodes and evaluated at the new (implicit) time
    """

    beta: float
    gamma: float
    dt: float
    model: FieldModel = field(default_factory=FieldModel.exchange_only)
    forcing: object = None

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"damping must be positive, got {self.gamma}")
        # dt == 0 is allowed as a degenerate case (A reduces to the identity)
        if self.dt < 0:
            raise ValueError(f"time step must be nonnegative, got {self.dt}")


@dataclass(frozen=True)
class SolverConfig:
    method: str = GMRES
    rel_tol: float = 1e-12
    max_iter: int = 500
    restart: int = 30
    preconditioner: str = None  # None or "fft_diffusion" (periodic grids)

    def __post_init__(self):
        if self.method not in (GMRES, BICGSTAB):
            raise ValueError(f"unknown Krylov method {self.method!r}")
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass
class StepReport:
    """Per-step diagnostics."""

    step_index: int
    time: float
    krylov_iters: int
    residual: float
    min_intermediate_length: float
    energy: float
    max_length_error: float


def _cross_terms(m_data, lap, beta, gamma):
    """beta m x lap + gamma m x (m x lap), pointwise."""
    c1 = np.cross(m_data, lap)
    return beta * c1 + gamma * np.cross(m_data, c1)


def operator_apply(v: VectorField, m_prev: VectorField, params: SchemeParams) -> VectorField:
    """Left-hand operator A(v) = v + dt*[beta m x lap v + gamma m x (m x lap v)]."""
    if v.grid != m_prev.grid:
        raise GridMismatchError("operand and previous state live on different grids")
    lap = array_laplacian(v.grid, v.data)
    out = v.data + params.dt * _cross_terms(m_prev.data, lap, params.beta, params.gamma)
    return VectorField(v.grid, out)


def _build_rhs(m_prev, params, t_new):
    rhs = m_prev.data.copy()
    if params.model.variant != "exchange_only":
        h_expl = explicit_field_apply(m_prev, params.model)
        rhs -= params.dt * _cross_terms(
            m_prev.data, h_expl.data, params.beta, params.gamma
        )
    if params.forcing is not None:
        coords = m_prev.grid.meshgrid()
        comps = params.forcing(*coords, t_new)
        f = np.stack(
            [np.broadcast_to(c, m_prev.grid.counts) for c in comps], axis=-1
        )
        rhs += params.dt * f
    return rhs


def _fft_diffusion_preconditioner(grid, gamma, dt, shape):
    """Apply (I - gamma*dt*lap_h)^(-1) via FFT; periodic grids only.

    The constant-coefficient diffusion part dominates the symmetric part of
    the operator, so this is a cheap, optional accelerator.
    """
    if grid.boundary != "periodic":
        raise ValueError("the FFT preconditioner requires a periodic grid")
    eig = np.zeros(grid.counts)
    for a in range(grid.dim):
        k = np.arange(grid.counts[a])
        lam = -(4.0 / grid.spacing[a] ** 2) * np.sin(np.pi * k / grid.counts[a]) ** 2
        s = [1] * grid.dim
        s[a] = grid.counts[a]
        eig = eig + lam.reshape(s)
    denom = 1.0 - gamma * dt * eig

    def apply(x):
        v = x.reshape(shape)
        axes = tuple(range(grid.dim))
        vh = np.fft.fftn(v, axes=axes)
        vh /= denom[..., None]
        return np.real(np.fft.ifftn(vh, axes=axes)).ravel()

    return apply


def solve_intermediate(m_prev: VectorField, params: SchemeParams, cfg: SolverConfig, t_new):
    """Solve A(mt) = rhs matrix-free; returns (mt, krylov_iters, residual)."""
    grid = m_prev.grid
    grid.require_uniform()
    shape = grid.counts + (3,)
    n = m_prev.data.size
    m_data = m_prev.data
    dt, beta, gamma = params.dt, params.beta, params.gamma

    matvec_count = [0]

    def matvec(x):
        matvec_count[0] += 1
        v = x.reshape(shape)
        lap = array_laplacian(grid, v)
        return (v + dt * _cross_terms(m_data, lap, beta, gamma)).ravel()

    op = LinearOperator((n, n), matvec=matvec, dtype=float)
    rhs = _build_rhs(m_prev, params, t_new).ravel()
    b_norm = np.linalg.norm(rhs)
    if b_norm == 0.0:
        return VectorField.zeros(grid), 0, 0.0

    M = None
    if cfg.preconditioner == "fft_diffusion":
        M = LinearOperator(
            (n, n),
            matvec=_fft_diffusion_preconditioner(grid, gamma, dt, shape),
            dtype=float,
        )
    elif cfg.preconditioner is not None:
        raise ValueError(f"unknown preconditioner {cfg.preconditioner!r}")

    residuals = []

    def callback(arg):
        residuals.append(float(np.linalg.norm(np.atleast_1d(arg))))

    x0 = m_prev.data.ravel()
    if cfg.method == GMRES:
        x, info = gmres(
            op,
            rhs,
            x0=x0,
            rtol=cfg.rel_tol,
            atol=0.0,
            restart=cfg.restart,
            maxiter=cfg.max_iter,
            M=M,
            callback=callback,
            callback_type="pr_norm",
        )
    else:
        x, info = bicgstab(
            op, rhs, x0=x0, rtol=cfg.rel_tol, atol=0.0, maxiter=cfg.max_iter, M=M
        )

    residual = float(np.linalg.norm(matvec(x) - rhs) / b_norm)
    matvec_count[0] -= 1  # the residual check above is not a solver iteration
    if info != 0 or residual > cfg.rel_tol * 10.0:
        raise SolverError(
            f"Krylov solve failed (info={info}, relative residual {residual:.3e})",
            residuals,
        )
    return VectorField(grid, x.reshape(shape)), matvec_count[0], residual


def normalize(m_tilde: VectorField) -> VectorField:
    """Pointwise spherical projection mt / |mt|."""
    lengths = m_tilde.pointwise_norm()
    if np.min(lengths) < 1e-300:
        raise DegenerateStateError(
            "intermediate state has a (numerically) zero-length node"
        )
    return VectorField(m_tilde.grid, m_tilde.data / lengths[..., None])


def _energy(m, params):
    return extended_energy(m, params.model)


def step(m_prev: VectorField, params: SchemeParams, cfg: SolverConfig, t_new, step_index=0):
    """One full scheme step: implicit solve then projection.

    Returns (m_new, m_tilde, report).
    """
    m_tilde, iters, residual = solve_intermediate(m_prev, params, cfg, t_new)
    m_new = normalize(m_tilde)
    report = StepReport(
        step_index=step_index,
        time=float(t_new),
        krylov_iters=iters,
        residual=residual,
        min_intermediate_length=float(np.min(m_tilde.pointwise_norm())),
        energy=_energy(m_new, params),
        max_length_error=float(np.max(np.abs(m_new.pointwise_norm() - 1.0))),
    )
    return m_new, m_tilde, report


def ingest_initial(initial: VectorField, override=False):
    """Renormalize near-unit input; reject anything farther off unless overridden."""
    drift = float(np.max(np.abs(initial.pointwise_norm() - 1.0)))
    if drift > 1e-12 and not override:
        raise ValueError(
            f"initial data is not pointwise unit length (max drift {drift:.3e}); "
            "pass override to renormalize anyway"
        )
    return normalize(initial), drift


@dataclass
class RunResult:
    state: VectorField
    reports: list
    steady: bool = False


def run(
    initial: VectorField,
    params: SchemeParams,
    cfg: SolverConfig,
    t_end,
    callbacks=(),
    steady_tol=None,
    max_steps=None,
    t_start=0.0,
    start_index=0,
    override_unit_check=False,
):
    """Advance from ``t_start`` to ``t_end`` (or to steady state).

    ``callbacks`` are called as cb(report, m_prev, m_tilde, m_new) after
    every step.  With ``steady_tol`` set, the loop exits early once
    ||m^n - m^(n-1)||_2 / dt drops below it.
    """
    state, _ = ingest_initial(initial, override=override_unit_check)
    reports = []
    if t_end <= t_start:
        return RunResult(state=state, reports=reports)
    if params.dt == 0:
        raise ValueError("time loop needs a positive dt")
    n_steps = int(round((t_end - t_start) / params.dt))
    if max_steps is not None:
        n_steps = min(n_steps, max_steps)
    steady = False
    for k in range(1, n_steps + 1):
        t_new = t_start + k * params.dt
        m_prev = state
        m_new, m_tilde, report = step(
            m_prev, params, cfg, t_new, step_index=start_index + k
        )
        if not np.all(np.isfinite(m_new.data)):
            raise FloatingPointError(
                f"non-finite state detected at step {start_index + k}"
            )
        reports.append(report)
        for cb in callbacks:
            cb(report, m_prev, m_tilde, m_new)
        if steady_tol is not None:
            rate = l2_norm(VectorField(state.grid, m_new.data - m_prev.data)) / params.dt
            if rate < steady_tol:
                state = m_new
                steady = True
                break
        state = m_new
    return RunResult(state=state, reports=reports, steady=steady)
