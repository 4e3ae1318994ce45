"""The four built-in experiments behind the command-line harness.

Each ``cmd_*`` function takes a parsed ExperimentConfig, writes its CSV
time series / snapshots under ``config.out_dir`` and returns a small result
object whose ``ok`` flag drives the process exit status.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import exact as exact_data
from .diagnostics import (
    ErrorAccumulator,
    ErrorRecord,
    attach_rates,
    skyrmion_number,
)
from .effective_field import FieldModel
from .exact import manufactured_solution
from .grid import VectorField
from .io import (
    ExperimentConfig,
    report_row,
    write_csv,
    write_snapshot,
    write_checkpoint,
    read_checkpoint,
    read_snapshot,
)
from .stepper import SchemeParams, SolverConfig, run

DEFAULT_LEVELS = (8, 16, 32, 64, 128)
DEFAULT_GAMMAS = (0.1, 0.5, 1.0, 10.0)
BLOWUP_SNAPSHOT_TIMES = (0.0, 0.06, 0.15, 0.30, 0.32, 0.35)


def _solver_config(config):
    return SolverConfig(
        method=config.method,
        rel_tol=config.rel_tol,
        max_iter=config.max_iter,
        restart=config.restart,
    )


def _ensure_out(config):
    os.makedirs(config.out_dir, exist_ok=True)
    return config.out_dir


# ---------------------------------------------------------------------------
# convergence study
# ---------------------------------------------------------------------------

@dataclass
class ConvergeResult:
    records: list
    ok: bool = True


def format_error_table(records):
    lines = ["level  linf_l2      rate    l2_h1        rate"]
    for r in records:
        r1 = "---" if r.rate_linf_l2 is None else f"{r.rate_linf_l2:5.2f}"
        r2 = "---" if r.rate_l2_h1 is None else f"{r.rate_l2_h1:5.2f}"
        lines.append(
            f"{r.level:5d}  {r.linf_l2:<11.4e} {r1:>5}   {r.l2_h1:<11.4e} {r2:>5}"
        )
    return "\n".join(lines)


def cmd_converge(config: ExperimentConfig) -> ConvergeResult:
    """Manufactured-solution refinement study (the error-table experiment)."""
    out = _ensure_out(config)
    levels = config.levels or DEFAULT_LEVELS
    exact = manufactured_solution(config.beta, config.gamma)
    cfg = _solver_config(config)
    records = []
    for n in levels:
        grid = config.make_grid((n, n))
        dt = config.resolve_dt(grid)
        params = SchemeParams(
            beta=config.beta, gamma=config.gamma, dt=dt, forcing=exact.forcing
        )
        initial = exact.sample(grid, 0.0)
        acc = ErrorAccumulator(exact, grid, dt)
        acc.seed(initial, 0.0)
        run(initial, params, cfg, config.t_end, callbacks=[acc])
        records.append(ErrorRecord(level=n, linf_l2=acc.max_l2, l2_h1=acc.l2_h1))
    attach_rates(records)
    rows = [
        [
            r.level,
            r.linf_l2,
            "" if r.rate_linf_l2 is None else r.rate_linf_l2,
            r.l2_h1,
            "" if r.rate_l2_h1 is None else r.rate_l2_h1,
        ]
        for r in records
    ]
    path = os.path.join(out, f"converge_{config.dt_policy}.csv")
    with open(path, "w") as fh:
        fh.write("level,linf_l2,rate_linf_l2,l2_h1,rate_l2_h1\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")
    return ConvergeResult(records=records)


# ---------------------------------------------------------------------------
# energy dissipation sweep
# ---------------------------------------------------------------------------

@dataclass
class DissipateResult:
    energies: dict  # gamma -> list of (step, time, energy)
    violations: list = field(default_factory=list)  # (gamma, step, rise)
    artifacts: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.violations


def cmd_dissipate(config: ExperimentConfig, extra_callbacks=None) -> DissipateResult:
    """Damping-parameter sweep checking monotone energy decay per step."""
    out = _ensure_out(config)
    gammas = config.gammas or DEFAULT_GAMMAS
    result = DissipateResult(energies={})
    for gamma in gammas:
        grid = config.make_grid()
        dt = config.resolve_dt(grid)
        params = SchemeParams(beta=config.beta, gamma=gamma, dt=dt)
        initial = VectorField.from_function(grid, exact_data.dissipation_initial)
        from .effective_field import exchange_energy

        e0 = exchange_energy(initial)
        rows = [[0, 0.0, e0, 1.0, 0.0, 0, 0.0]]
        series = [(0, 0.0, e0)]
        callbacks = []

        def record(report, m_prev, m_tilde, m_new, _rows=rows, _series=series):
            _rows.append(report_row(report))
            _series.append((report.step_index, report.time, report.energy))

        callbacks.append(record)
        if extra_callbacks:
            callbacks.extend(extra_callbacks.get(gamma, ()))
        run(initial, params, _solver_config(config), config.t_end, callbacks=callbacks)
        for (_, _, e_prev), (step_idx, _, e_new) in zip(series, series[1:]):
            if e_new - e_prev > 1e-8:
                result.violations.append((gamma, step_idx, e_new - e_prev))
        result.energies[gamma] = series
        write_csv(rows, os.path.join(out, f"energy_gamma_{gamma:g}.csv"))
    return result


# ---------------------------------------------------------------------------
# blowup run
# ---------------------------------------------------------------------------

@dataclass
class BlowupResult:
    snapshots: list  # (time, path)
    energies: list  # (step, time, energy)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def cmd_blowup(config: ExperimentConfig) -> BlowupResult:
    """Near-singularity evolution of bubble-type data, with snapshot series."""
    out = _ensure_out(config)
    grid = config.make_grid()
    dt = config.resolve_dt(grid)
    params = SchemeParams(beta=config.beta, gamma=config.gamma, dt=dt)
    initial = VectorField.from_function(grid, exact_data.blowup_initial)
    snap_times = sorted(config.snapshot_times or BLOWUP_SNAPSHOT_TIMES)
    binary = config.snapshot_format == "binary"
    ext = "bin" if binary else "txt"

    result = BlowupResult(snapshots=[], energies=[])
    from .effective_field import exchange_energy

    e0 = exchange_energy(initial)
    rows = [[0, 0.0, e0, 1.0, 0.0, 0, 0.0]]
    result.energies.append((0, 0.0, e0))
    if snap_times and abs(snap_times[0]) < dt / 2:
        path = os.path.join(out, f"blowup_t0.{ext}")
        write_snapshot(initial, path, time=0.0, step=0, binary=binary)
        result.snapshots.append((0.0, path))
        snap_times = snap_times[1:]

    pending = list(snap_times)

    def record(report, m_prev, m_tilde, m_new):
        rows.append(report_row(report))
        result.energies.append((report.step_index, report.time, report.energy))
        while pending and report.time >= pending[0] - dt / 2:
            t_snap = pending.pop(0)
            path = os.path.join(out, f"blowup_t{t_snap:g}.{ext}")
            write_snapshot(
                m_new, path, time=report.time, step=report.step_index, binary=binary
            )
            result.snapshots.append((t_snap, path))

    run(initial, params, _solver_config(config), config.t_end, callbacks=[record])
    for (_, _, e_prev), (step_idx, _, e_new) in zip(
        result.energies, result.energies[1:]
    ):
        if e_new - e_prev > 1e-8:
            result.violations.append((step_idx, e_new - e_prev))
    write_csv(rows, os.path.join(out, "blowup_energy.csv"))
    return result


# ---------------------------------------------------------------------------
# skyrmion relaxation
# ---------------------------------------------------------------------------

@dataclass
class SkyrmionResult:
    final_state: VectorField
    charge: float
    steady: bool
    series: list  # (step, time, energy, Q)
    snapshot_path: str = None
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return self.steady and not self.violations


def cmd_skyrmion(config: ExperimentConfig, resume=None) -> SkyrmionResult:
    """Relax a topological seed to a static texture under the extended model."""
    out = _ensure_out(config)
    grid = config.make_grid()
    dt = config.resolve_dt(grid)
    model = FieldModel.extended(config.kappa, config.lam)
    params = SchemeParams(beta=config.beta, gamma=config.gamma, dt=dt, model=model)

    t_start = 0.0
    start_index = 0
    if resume is not None:
        initial, t_start, start_index = read_checkpoint(resume, params)
    elif config.mode == "Q0":
        if config.input_state is None:
            raise ValueError("Q0 mode requires 'input_state', a relaxed Q1 snapshot")
        n_state, _, _ = read_snapshot(config.input_state)
        initial = VectorField(grid, exact_data.charge_zero_transform(n_state.data))
    else:
        center = tuple(0.5 * (lo + hi) for lo, hi in config.domain)
        initial = VectorField.from_function(
            grid, lambda x, y: exact_data.skyrmion_initial(x, y, center,
                                                           config.seed_radius)
        )

    from .effective_field import extended_energy

    e0 = extended_energy(initial, model)
    q0 = skyrmion_number(initial)
    rows = [[0, 0.0, e0, 1.0, 0.0, 0, 0.0, q0]]
    series = [(0, 0.0, e0, q0)]

    def record(report, m_prev, m_tilde, m_new):
        if report.step_index % config.cadence == 0:
            q = skyrmion_number(m_new)
            rows.append(report_row(report, extra=[q]))
            series.append((report.step_index, report.time, report.energy, q))

    budget = config.max_steps or 200000
    t_end = t_start + budget * dt
    res = run(
        initial,
        params,
        _solver_config(config),
        t_end,
        callbacks=[record],
        steady_tol=config.steady_tol,
        max_steps=budget,
        t_start=t_start,
        start_index=start_index,
        override_unit_check=True,
    )
    charge = skyrmion_number(res.state)
    result = SkyrmionResult(
        final_state=res.state, charge=charge, steady=res.steady, series=series
    )
    for (_, _, e_prev, _), (step_idx, _, e_new, _) in zip(series, series[1:]):
        if e_new - e_prev > 1e-6:
            result.violations.append((step_idx, e_new - e_prev))

    binary = config.snapshot_format == "binary"
    ext = "bin" if binary else "txt"
    tag = config.mode.lower()
    snap_path = os.path.join(out, f"skyrmion_{tag}_relaxed.{ext}")
    last_report = res.reports[-1] if res.reports else None
    write_snapshot(
        res.state,
        snap_path,
        time=last_report.time if last_report else t_start,
        step=last_report.step_index if last_report else start_index,
        binary=binary,
    )
    result.snapshot_path = snap_path
    if not res.steady and last_report is not None:
        # budget exhausted: keep the last state around for a resumed run
        write_checkpoint(
            res.state,
            os.path.join(out, f"skyrmion_{tag}_last.ckpt"),
            last_report.time,
            last_report.step_index,
            params,
        )
    write_csv(rows, os.path.join(out, f"skyrmion_{tag}.csv"), extra_columns=["Q"])
    return result
