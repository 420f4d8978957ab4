"""Plot-ready data for the figure set (CSV per curve or surface + manifest).

Grid ranges are defaults chosen to bracket the optima the curves describe;
every manifest records them under ``"grid_ranges_are_defaults": true``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import optimum_conditions
from .errors import EITError, InvalidParams
from .params import SystemParams
from .sweep import AxisSpec, RunRecord, apply_point, fmt, optimize, scan, write_csv

FIG4_ALPHAS = (100.0, 300.0, 1000.0, 3000.0)
FIG5_OMEGA_C = {"5a": 0.85, "5b": 1.2, "5c": 1.7}

# Shared (eps, r) window of Figs. 5 and 6, centred on eps_opt and r_best at alpha = 1000.
EPS_RANGE = (3e-3, 9e-3)
R_RANGE = (0.03, 0.3)


@dataclass(frozen=True)
class FigureDef:
    title: str
    base: dict
    axes: tuple[AxisSpec, ...] = ()
    # Fig. 4 panels: scanned variable, optimised variable and its bounds
    optimized: tuple[str, tuple[float, float]] | None = None
    extra: dict = field(default_factory=dict)


def _curve(name, lo, hi, n, scale="log"):
    return AxisSpec(name, lo, hi, n, scale)


FIGURES: dict[str, FigureDef] = {
    "2a": FigureDef(
        "V versus decoherence rate",
        dict(alpha=1000.0, omega_c0=1.0, r=0.1, delta=0.0),
        (_curve("gamma_p", 1e-4, 5e-2, 100),),
    ),
    "2b": FigureDef(
        "V versus input coupling Rabi frequency, gamma_p = 0.005",
        dict(alpha=1000.0, gamma_p=0.005, r=0.1, delta=0.0),
        (_curve("omega_c", 0.3, 10.0, 60),),
    ),
    "3a": FigureDef(
        "V versus two-photon detuning",
        dict(alpha=1000.0, omega_c0=1.0, r=0.1, gamma_p=0.0),
        (_curve("delta", 0.0, 0.015, 100, "linear"),),
    ),
    "3b": FigureDef(
        "V versus input coupling Rabi frequency, delta = 0.01",
        dict(alpha=1000.0, delta=0.01, r=0.1, gamma_p=0.0),
        (_curve("omega_c", 0.5, 5.0, 60),),
    ),
    "4a": FigureDef(
        "V optimised over omega_c versus gamma_p",
        dict(r=0.1, delta=0.0),
        (_curve("gamma_p", 1e-4, 1e-2, 12),),
        ("omega_c", (3e-2, 30.0)),
    ),
    "4b": FigureDef(
        "V optimised over gamma_p versus omega_c",
        dict(r=0.1, delta=0.0),
        (_curve("omega_c", 0.3, 5.0, 12),),
        ("gamma_p", (1e-7, 1.0)),
    ),
    "4c": FigureDef(
        "V optimised over omega_c versus delta",
        dict(r=0.1, gamma_p=0.0),
        (_curve("delta", 1e-3, 5e-2, 12),),
        ("omega_c", (3e-2, 30.0)),
    ),
    "4d": FigureDef(
        "V optimised over delta versus omega_c",
        dict(r=0.1, gamma_p=0.0),
        (_curve("omega_c", 0.3, 5.0, 12),),
        ("delta", (1e-5, 10.0)),
    ),
    **{
        fig: FigureDef(
            f"V versus Omega_p and delta at omega_c = {oc}",
            dict(alpha=1000.0, omega_c0=oc, gamma_p=0.0),
            (_curve("eps", *EPS_RANGE, 20, "linear"), _curve("r", *R_RANGE, 20)),
        )
        for fig, oc in FIG5_OMEGA_C.items()
    },
    "6": FigureDef(
        "V versus r and eps",
        dict(alpha=1000.0, omega_c0=1.0, gamma_p=0.0),
        (_curve("eps", *EPS_RANGE, 60, "linear"), _curve("r", *R_RANGE, 60)),
        extra={"mu_half_curve": True},
    ),
}


def _with_count(axis: AxisSpec, count: int | None) -> AxisSpec:
    if count is None:
        return axis
    return AxisSpec(axis.name, axis.start, axis.stop, count, axis.scale)


def _write(path: Path, records: list[RunRecord]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        write_csv(records, fh)


def optimized_curve(
    base: SystemParams, axis: AxisSpec, free: str, bounds: tuple[float, float], jobs: int = 1
) -> list[RunRecord]:
    """For every value on ``axis``, V minimised over ``free`` (failed points keep their error)."""
    out = []
    for value in axis.values():
        params = apply_point(base, {axis.name: value})
        try:
            out.append(optimize(params, [free], {free: bounds}, jobs=jobs).record)
        except EITError as exc:
            out.append(RunRecord(params=params.to_dict(), error=f"{type(exc).__name__}: {exc}"))
    return out


def reproduce_figure(
    fig_id: str,
    out_dir: str | Path,
    jobs: int = 1,
    count: int | None = None,
    alphas: tuple[float, ...] | None = None,
    n_steps: int = 200,
    conv_tol: float = 1e-6,
) -> dict:
    """Write the data files of one figure into ``out_dir`` and return the manifest.

    ``count`` overrides the number of points per axis and ``alphas`` the
    optical densities of the Fig. 4 panels; both are recorded.
    """
    if fig_id not in FIGURES:
        raise InvalidParams(f"unknown figure {fig_id!r}; choose from {', '.join(FIGURES)}")
    fig = FIGURES[fig_id]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    axes = tuple(_with_count(a, count) for a in fig.axes)
    files = []
    manifest = {
        "figure": fig_id,
        "title": fig.title,
        "tool": "eitent",
        "version": __version__,
        "units": "Gamma = 1, zeta = z/L in [0, 1]",
        "n_steps": n_steps,
        "conv_tol": conv_tol,
        "axes": [a.to_dict() for a in axes],
        "grid_ranges_are_defaults": True,
    }
    if fig.optimized is not None:
        free, bounds = fig.optimized
        alphas = tuple(alphas or FIG4_ALPHAS)
        manifest.update(optimized=free, bounds=list(bounds), alphas=list(alphas))
        curves = []
        for alpha in alphas:
            base = SystemParams(alpha=alpha, n_steps=n_steps, conv_tol=conv_tol, **fig.base)
            records = optimized_curve(base, axes[0], free, bounds, jobs)
            name = f"fig{fig_id}_alpha{alpha:g}.csv"
            _write(out / name, records)
            files.append(name)
            curves.append({"alpha": alpha, "file": name, "base": base.to_dict()})
        manifest["curves"] = curves
    else:
        base = SystemParams(n_steps=n_steps, conv_tol=conv_tol, **fig.base)
        manifest["base"] = base.to_dict()
        name = f"fig{fig_id}.csv"
        _write(out / name, scan(base, axes, jobs))
        files.append(name)
        if fig.extra.get("mu_half_curve"):
            eps = next(a for a in axes if a.name == "eps").values()
            name = f"fig{fig_id}_mu_half.csv"
            with (out / name).open("w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["eps", "r"])
                for e in eps:
                    writer.writerow([fmt(e), fmt(0.5 / (base.alpha * e))])
            files.append(name)
            manifest["analytic_optimum"] = optimum_conditions(base.alpha)._asdict()
    manifest["files"] = files
    (out / f"fig{fig_id}_manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Load a figure or scan CSV into float columns (empty cells become NaN)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    cols = {}
    for key in rows[0]:
        if key == "error":
            cols[key] = np.array([row[key] for row in rows], dtype=object)
        else:
            cols[key] = np.array([float(row[key]) if row[key] else np.nan for row in rows])
    return cols
