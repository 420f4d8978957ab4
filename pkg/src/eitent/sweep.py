"""Single runs, parameter scans and the deterministic optimizer."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .covariance import entanglement_V, propagate_covariance
from .errors import ConvergenceFailure, EITError, InvalidParams
from .params import GAMMA, SystemParams

AXIS_NAMES = ("alpha", "delta", "gamma_p", "omega_c", "r", "eps")
FREE_NAMES = ("delta", "gamma_p", "omega_c", "r")
CSV_COLUMNS = (
    "alpha", "gamma_p", "delta", "omega_c", "r", "eps",
    "V", "theta_opt", "n_p", "n_c", "abs_S14", "commutator_drift", "error",
)  # fmt: skip

DEFAULT_BOUNDS = {
    "delta": (1e-4, 1e-1),
    "gamma_p": (1e-6, 1e-1),
    "omega_c": (3e-2, 30.0),
    "r": (5e-3, 0.5),
}

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def fmt(x: float) -> str:
    return format(x, ".12g")


@dataclass(frozen=True)
class AxisSpec:
    name: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidParams(f"unknown axis {self.name!r}; expected one of {', '.join(AXIS_NAMES)}")
        if self.scale not in ("linear", "log"):
            raise InvalidParams(f"axis scale must be 'linear' or 'log', got {self.scale!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)) or self.start >= self.stop:
            raise InvalidParams(f"axis {self.name}: need start < stop, got {self.start} .. {self.stop}")
        if self.count < 2:
            raise InvalidParams(f"axis {self.name}: count must be >= 2")
        if self.scale == "log" and self.start <= 0:
            raise InvalidParams(f"axis {self.name}: log scale needs start > 0")

    @classmethod
    def parse(cls, text: str) -> AxisSpec:
        """Parse ``name=start:stop:count[:log]``."""
        try:
            name, rng = text.split("=", 1)
            parts = rng.split(":")
            if len(parts) not in (3, 4):
                raise ValueError
            scale = parts[3] if len(parts) == 4 else "linear"
            if scale == "lin":
                scale = "linear"
            return cls(name.strip(), float(parts[0]), float(parts[1]), int(parts[2]), scale)
        except ValueError as exc:
            if isinstance(exc, InvalidParams):
                raise
            raise InvalidParams(f"malformed axis {text!r}; expected name=start:stop:count[:log]") from None

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def to_dict(self) -> dict:
        return asdict(self)


def apply_point(base: SystemParams, assignment: dict[str, float]) -> SystemParams:
    """Set axis values on ``base``; ``eps`` is applied last, as delta = eps * omega_c^2."""
    changes = {}
    for name, value in assignment.items():
        if name == "omega_c":
            changes["omega_c0"] = float(value)
        elif name != "eps":
            changes[name] = float(value)
    params = base.replace(**changes)
    if "eps" in assignment:
        params = params.replace(delta=float(assignment["eps"]) * params.omega_c0**2 / GAMMA)
    return params


@dataclass
class RunRecord:
    params: dict
    v: float | None = None
    theta_opt: float | None = None
    n_p: float | None = None
    n_c: float | None = None
    abs_s14: float | None = None
    commutator_drift: float | None = None
    hermiticity_drift: float | None = None
    converged: bool = False
    conv_tol: float | None = None
    n_steps_used: int | None = None
    wall_time: float = 0.0
    error: str | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        if not out["extra"]:
            out.pop("extra")
        return out

    def csv_row(self) -> list[str]:
        p = self.params
        eps = GAMMA * p["delta"] / p["omega_c0"] ** 2
        head = [fmt(p["alpha"]), fmt(p["gamma_p"]), fmt(p["delta"]), fmt(p["omega_c0"]), fmt(p["r"]), fmt(eps)]
        if self.error is not None:
            return head + [""] * 6 + [self.error]
        vals = [self.v, self.theta_opt, self.n_p, self.n_c, self.abs_s14, self.commutator_drift]
        return head + [fmt(x) for x in vals] + [""]


def run_single(params: SystemParams) -> RunRecord:
    """Certified covariance run reduced to a record; errors propagate."""
    t0 = time.perf_counter()
    state, _ = propagate_covariance(params, certify=True)
    res = entanglement_V(state)
    return RunRecord(
        params=params.to_dict(),
        v=res.v,
        theta_opt=res.theta_opt,
        n_p=res.n_p,
        n_c=res.n_c,
        abs_s14=abs(res.cross),
        commutator_drift=res.commutator_drift,
        hermiticity_drift=state.max_hermiticity_drift,
        converged=True,
        conv_tol=params.conv_tol,
        n_steps_used=state.n_steps,
        wall_time=time.perf_counter() - t0,
    )


def evaluate_point(params: SystemParams) -> RunRecord:
    """Like :func:`run_single` but failures become a record with ``error`` set."""
    try:
        return run_single(params)
    except EITError as exc:
        return RunRecord(params=params.to_dict(), conv_tol=params.conv_tol, error=f"{type(exc).__name__}: {exc}")


def map_points(params_list: Sequence[SystemParams], jobs: int = 1) -> list[RunRecord]:
    """Evaluate independent points; results come back in input order."""
    if jobs <= 1 or len(params_list) < 2:
        return [evaluate_point(p) for p in params_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(evaluate_point, params_list, chunksize=max(1, len(params_list) // (4 * jobs))))


def grid_points(base: SystemParams, axes: Sequence[AxisSpec]) -> list[SystemParams]:
    """Row-major (first axis outermost) list of parameter sets."""
    if not 1 <= len(axes) <= 2:
        raise InvalidParams("a scan takes one or two axes")
    if len({a.name for a in axes}) != len(axes):
        raise InvalidParams("scan axes must be distinct")
    if {"delta", "eps"} <= {a.name for a in axes}:
        raise InvalidParams("delta and eps cannot both be scanned")
    grids = np.meshgrid(*[a.values() for a in axes], indexing="ij")
    flat = [g.ravel() for g in grids]
    return [apply_point(base, {a.name: f[i] for a, f in zip(axes, flat)}) for i in range(flat[0].size)]


def scan(base: SystemParams, axes: Sequence[AxisSpec], jobs: int = 1) -> list[RunRecord]:
    return map_points(grid_points(base, axes), jobs)


def write_csv(records: Iterable[RunRecord], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.csv_row())


def csv_text(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on [a, b] until the bracket is narrower than tol."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


@dataclass
class OptimizeResult:
    record: RunRecord
    x: dict[str, float]
    evaluations: int
    sweeps: int


def _param_value(params: SystemParams, name: str) -> float:
    return params.omega_c0 if name == "omega_c" else getattr(params, name)


def optimize(
    base: SystemParams,
    free: Sequence[str],
    bounds: dict[str, tuple[float, float]] | None = None,
    grid: int = 32,
    rtol: float = 1e-4,
    jobs: int = 1,
    max_sweeps: int = 60,
) -> OptimizeResult:
    """Minimise V over one or two free parameters.

    A log-spaced coarse grid (``grid`` points per axis) locates the basin;
    golden-section search refines it (coordinate descent for two variables)
    in log coordinates until every coordinate moves by less than ``rtol``
    relative. Raises ConvergenceFailure when the minimum is not bracketed.
    """
    free = list(free)
    if not 1 <= len(free) <= 2 or len(set(free)) != len(free):
        raise InvalidParams("optimize takes one or two distinct free variables")
    for name in free:
        if name not in FREE_NAMES:
            raise InvalidParams(f"cannot optimise {name!r}; choose from {', '.join(FREE_NAMES)}")
    bounds = {name: tuple(bounds.get(name, DEFAULT_BOUNDS[name])) if bounds else DEFAULT_BOUNDS[name] for name in free}
    for name, (lo, hi) in bounds.items():
        if not (0 < lo < hi and math.isfinite(hi)):
            raise InvalidParams(f"bounds for {name} must satisfy 0 < lo < hi, got {lo}, {hi}")

    cache: dict[tuple[float, ...], RunRecord] = {}

    def params_at(u: Sequence[float]) -> SystemParams:
        return apply_point(base, {n: math.exp(x) for n, x in zip(free, u)})

    def value(u: Sequence[float]) -> float:
        key = tuple(float(x) for x in u)
        if key not in cache:
            cache[key] = evaluate_point(params_at(key))
        rec = cache[key]
        return math.inf if rec.v is None else rec.v

    axes = [np.linspace(math.log(bounds[n][0]), math.log(bounds[n][1]), grid) for n in free]
    mesh = [m.ravel() for m in np.meshgrid(*axes, indexing="ij")]
    keys = [tuple(float(m[i]) for m in mesh) for i in range(mesh[0].size)]
    for key, rec in zip(keys, map_points([params_at(k) for k in keys], jobs)):
        cache[key] = rec
    vals = np.array([value(k) for k in keys]).reshape([grid] * len(free))
    if not np.isfinite(vals).any():
        raise ConvergenceFailure("every coarse-grid point failed")
    idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
    for name, i in zip(free, idx):
        if i == 0 or i == grid - 1:
            raise ConvergenceFailure(f"coarse-grid minimum of {name} sits on the bound; widen the bounds")

    cells = [ax[1] - ax[0] for ax in axes]
    u = [float(ax[i]) for ax, i in zip(axes, idx)]
    lo_b = [ax[0] for ax in axes]
    hi_b = [ax[-1] for ax in axes]
    width = list(cells)
    tol = rtol
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        moved = 0.0
        for k in range(len(free)):
            for _ in range(50):
                a = max(u[k] - width[k], lo_b[k])
                b = min(u[k] + width[k], hi_b[k])

                def along(x, k=k):
                    trial = list(u)
                    trial[k] = x
                    return value(trial)

                x_new, _ = golden_section(along, a, b, tol)
                at_edge = (x_new - a < 2 * tol and a > lo_b[k]) or (b - x_new < 2 * tol and b < hi_b[k])
                step = abs(x_new - u[k])
                u[k] = x_new
                if not at_edge:
                    break
                width[k] = max(width[k], cells[k])
            else:
                raise ConvergenceFailure(f"golden-section search for {free[k]} never bracketed a minimum")
            if u[k] - lo_b[k] < 2 * tol or hi_b[k] - u[k] < 2 * tol:
                raise ConvergenceFailure(f"refined minimum of {free[k]} sits on the bound")
            moved = max(moved, step)
            width[k] = min(cells[k], max(4.0 * step, 8.0 * tol))
        if len(free) == 1 or moved < tol:
            break
    else:
        raise ConvergenceFailure(f"coordinate descent did not settle in {max_sweeps} sweeps")

    best = min((k for k in cache if cache[k].v is not None), key=lambda k: cache[k].v)
    rec = cache[best]
    x = {n: math.exp(v) for n, v in zip(free, best)}
    rec.extra = {"optimum": x, "evaluations": len(cache), "sweeps": sweeps}
    return OptimizeResult(record=rec, x=x, evaluations=len(cache), sweeps=sweeps)
