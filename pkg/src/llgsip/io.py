"""Run-description parsing and output plumbing.

Config files are flat ``key = value`` text with a typed schema; snapshots
are plain text (one node per line, shortest round-trip decimals) with an
optional little-endian float64 binary body; CSV time series share a single
column schema across all experiments.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass

import numpy as np

from .grid import PERIODIC, NEUMANN, GridSpec, VectorField

CSV_COLUMNS = [
    "step",
    "time",
    "energy",
    "min_tilde_len",
    "max_len_err",
    "krylov_iters",
    "residual",
]


class ConfigError(ValueError):
    """Malformed configuration; message carries key and line context."""


EXPERIMENTS = ("converge", "dissipate", "blowup", "skyrmion")
DT_POLICIES = ("fixed", "h_squared", "h_linear")


@dataclass
class ExperimentConfig:
    experiment: str
    domain: tuple  # ((lo_x, hi_x), (lo_y, hi_y))
    grid: tuple  # counts per axis
    boundary: str = PERIODIC
    dt_policy: str = "fixed"
    dt: float = None
    t_end: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    kappa: float = 0.0
    lam: int = 1
    out_dir: str = "out"
    cadence: int = 1
    snapshot_format: str = "text"
    rel_tol: float = 1e-12
    max_iter: int = 500
    restart: int = 30
    method: str = "gmres"
    levels: tuple = None  # converge only
    gammas: tuple = None  # dissipate only
    snapshot_times: tuple = ()  # blowup
    steady_tol: float = 1e-6  # skyrmion
    max_steps: int = None
    mode: str = "Q1"  # skyrmion: Q1 | Q0
    input_state: str = None  # skyrmion Q0: relaxed Q1 snapshot
    seed_radius: float = 3.0  # skyrmion initial profile width

    def spacing(self):
        """Mesh size per axis implied by domain and counts.

        Periodic grids tile the box with N cells; Neumann grids place their
        N nodes on [lo, hi] inclusive (N - 1 cells).
        """
        hs = []
        for (lo, hi), n in zip(self.domain, self.grid):
            cells = n if self.boundary == PERIODIC else n - 1
            hs.append((hi - lo) / cells)
        return tuple(hs)

    def make_grid(self, counts=None):
        counts = tuple(counts) if counts is not None else tuple(self.grid)
        hs = []
        for (lo, hi), n in zip(self.domain, counts):
            cells = n if self.boundary == PERIODIC else n - 1
            hs.append((hi - lo) / cells)
        origin = tuple(lo for lo, _ in self.domain)
        return GridSpec(counts=counts, spacing=tuple(hs), origin=origin,
                        boundary=self.boundary)

    def resolve_dt(self, grid):
        """Time step for the configured policy.

        h_squared couples the step to the mesh as dt = h^2; h_linear uses
        dt = 1/Nx, the refinement path of the published first-order error
        table (dt proportional to h, with unit constant on the benchmark
        box).
        """
        if self.dt_policy == "fixed":
            if self.dt is None:
                raise ConfigError("dt policy 'fixed' requires key 'dt'")
            return self.dt
        if self.dt_policy == "h_squared":
            return grid.spacing[0] ** 2
        return 1.0 / grid.counts[0]


def _parse_floats(text, n, key, line_no):
    parts = text.split()
    if len(parts) != n:
        raise ConfigError(
            f"line {line_no}: key '{key}' expects {n} numbers, got {len(parts)}"
        )
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"line {line_no}: key '{key}': {exc}") from None


def _parse_ints(text, key, line_no):
    try:
        return tuple(int(p) for p in text.split())
    except ValueError as exc:
        raise ConfigError(f"line {line_no}: key '{key}': {exc}") from None


def parse_config(path, overrides=()) -> ExperimentConfig:
    """Parse a flat key-value config file, applying ``key=value`` overrides."""
    raw = {}
    with open(path) as fh:
        for line_no, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise ConfigError(f"line {line_no}: expected 'key = value', got {text!r}")
            key, value = (part.strip() for part in text.split("=", 1))
            raw[key] = (value, line_no)
    for ov in overrides:
        if "=" not in ov:
            raise ConfigError(f"override {ov!r} is not of the form key=value")
        key, value = (part.strip() for part in ov.split("=", 1))
        raw[key] = (value, 0)
    return _build_config(raw)


def _build_config(raw):
    def take(key, default=None, required=False):
        if key in raw:
            return raw.pop(key)
        if required:
            raise ConfigError(f"missing required key '{key}'")
        return (default, 0)

    experiment, ln = take("experiment", required=True)
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"line {ln}: unknown experiment {experiment!r}, "
            f"expected one of {EXPERIMENTS}"
        )

    dom_text, ln = take("domain", required=True)
    nums = _parse_floats(dom_text, 4, "domain", ln)
    domain = ((nums[0], nums[1]), (nums[2], nums[3]))
    for lo, hi in domain:
        if hi <= lo:
            raise ConfigError(f"line {ln}: domain extent must be positive")

    grid_text, ln = take("grid", required=True)
    counts = _parse_ints(grid_text, "grid", ln)
    if len(counts) != 2 or any(n < 2 for n in counts):
        raise ConfigError(f"line {ln}: key 'grid' expects two counts >= 2")

    cfg = ExperimentConfig(experiment=experiment, domain=domain, grid=counts)

    simple = {
        "boundary": str,
        "dt_policy": str,
        "dt": float,
        "t_end": float,
        "beta": float,
        "gamma": float,
        "kappa": float,
        "lam": int,
        "out_dir": str,
        "cadence": int,
        "snapshot_format": str,
        "rel_tol": float,
        "max_iter": int,
        "restart": int,
        "method": str,
        "steady_tol": float,
        "max_steps": int,
        "mode": str,
        "input_state": str,
        "seed_radius": float,
    }
    for key, conv in simple.items():
        if key in raw:
            value, ln = raw.pop(key)
            try:
                setattr(cfg, key, conv(value))
            except ValueError as exc:
                raise ConfigError(f"line {ln}: key '{key}': {exc}") from None
    if "levels" in raw:
        value, ln = raw.pop("levels")
        cfg.levels = _parse_ints(value, "levels", ln)
    if "gammas" in raw:
        value, ln = raw.pop("gammas")
        cfg.gammas = _parse_floats(value, len(value.split()), "gammas", ln)
    if "snapshot_times" in raw:
        value, ln = raw.pop("snapshot_times")
        cfg.snapshot_times = _parse_floats(
            value, len(value.split()), "snapshot_times", ln
        )
    if raw:
        key, (_, ln) = next(iter(raw.items()))
        raise ConfigError(f"line {ln}: unknown key '{key}'")

    if cfg.boundary not in (PERIODIC, NEUMANN):
        raise ConfigError(f"unknown boundary kind {cfg.boundary!r}")
    if cfg.dt_policy not in DT_POLICIES:
        raise ConfigError(
            f"unknown dt policy {cfg.dt_policy!r}, expected one of {DT_POLICIES}"
        )
    return cfg


# ---------------------------------------------------------------------------
# CSV time series
# ---------------------------------------------------------------------------

def write_csv(rows, path, extra_columns=()):
    """Write StepReport-shaped rows under the fixed column schema."""
    columns = CSV_COLUMNS + list(extra_columns)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def report_row(report, extra=()):
    return [
        report.step_index,
        report.time,
        report.energy,
        report.min_intermediate_length,
        report.max_length_error,
        report.krylov_iters,
        report.residual,
    ] + list(extra)


# ---------------------------------------------------------------------------
# field snapshots
# ---------------------------------------------------------------------------

_SNAPSHOT_MAGIC = "llgsip-snapshot 1"


def write_snapshot(f: VectorField, path, time=0.0, step=0, binary=False):
    """Serialize a field with its grid header; text rows round-trip bit-exact."""
    grid = f.grid
    header = [
        f"# {_SNAPSHOT_MAGIC}",
        f"# dim {grid.dim}",
        "# counts " + " ".join(str(n) for n in grid.counts),
        "# spacing " + " ".join(repr(h) for h in grid.spacing),
        "# origin " + " ".join(repr(x) for x in grid.origin),
        f"# boundary {grid.boundary}",
        f"# time {time!r}",
        f"# step {step}",
        f"# body {'binary' if binary else 'text'}",
    ]
    if binary:
        with open(path, "wb") as fh:
            fh.write(("\n".join(header) + "\n").encode())
            fh.write(np.ascontiguousarray(f.data, dtype="<f8").tobytes())
        return
    coords = grid.meshgrid()
    with open(path, "w") as fh:
        fh.write("\n".join(header) + "\n")
        for idx in np.ndindex(*grid.counts):
            pieces = [str(i) for i in idx]
            pieces += [repr(float(c[idx])) for c in coords]
            pieces += [repr(float(v)) for v in f.data[idx]]
            fh.write(" ".join(pieces) + "\n")


def read_snapshot(path):
    """Inverse of write_snapshot; returns (field, time, step)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    lines = []
    pos = 0
    while True:
        end = blob.index(b"\n", pos)
        line = blob[pos:end].decode()
        pos = end + 1
        if not line.startswith("#"):
            raise ConfigError(f"{path}: malformed snapshot header line {line!r}")
        lines.append(line[1:].strip())
        if line.startswith("# body"):
            break
    header = {}
    if lines[0] != _SNAPSHOT_MAGIC:
        raise ConfigError(f"{path}: not a snapshot file")
    for line in lines[1:]:
        key, _, value = line.partition(" ")
        header[key] = value
    counts = tuple(int(n) for n in header["counts"].split())
    grid = GridSpec(
        counts=counts,
        spacing=tuple(float(h) for h in header["spacing"].split()),
        origin=tuple(float(x) for x in header["origin"].split()),
        boundary=header["boundary"],
    )
    time = float(header["time"])
    step = int(header["step"])
    if header["body"] == "binary":
        data = np.frombuffer(blob[pos:], dtype="<f8").reshape(counts + (3,))
        return VectorField(grid, data.copy()), time, step
    body = blob[pos:].decode().strip().splitlines()
    if len(body) != grid.num_nodes:
        raise ConfigError(
            f"{path}: snapshot body has {len(body)} rows, expected {grid.num_nodes}"
        )
    data = np.zeros(counts + (3,))
    for row in body:
        parts = row.split()
        idx = tuple(int(p) for p in parts[: grid.dim])
        data[idx] = [float(p) for p in parts[-3:]]
    return VectorField(grid, data), time, step


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

def params_hash(params):
    """Stable digest of the scheme constants, for resume validation."""
    text = f"{params.beta!r}|{params.gamma!r}|{params.dt!r}|{params.model!r}"
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def write_checkpoint(f: VectorField, path, time, step, params):
    with open(path, "w") as fh:
        fh.write(f"# llgsip-checkpoint 1\n# params {params_hash(params)}\n")
    snap_path = str(path) + ".state"
    write_snapshot(f, snap_path, time=time, step=step)


def read_checkpoint(path, params=None):
    """Returns (field, time, step); validates the params hash when given."""
    with open(path) as fh:
        magic = fh.readline().strip()
        params_line = fh.readline().strip()
    if magic != "# llgsip-checkpoint 1":
        raise ConfigError(f"{path}: not a checkpoint file")
    stored = params_line.split()[-1]
    if params is not None and stored != params_hash(params):
        raise ConfigError(
            f"{path}: checkpoint was written with different scheme parameters"
        )
    return read_snapshot(str(path) + ".state")
