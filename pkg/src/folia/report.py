"""Serialization of grid sweeps and run reports.

The CSV format is the canonical data interface: a fixed ten-column header
and shortest round-trip decimal floats, so identical runs produce
byte-identical files.  JSON reports carry check statuses and verdicts with
sorted keys and no timestamps.  Figures are an optional convenience layer
on top of the same samples; the CSV remains the source of truth.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .invariants import PointSample, TensorReport

CSV_HEADER = ("x_re,x_im,y_re,y_im,omega_re,omega_im,"
              "gamma_re,gamma_im,tangency_res,holo_res")


def format_float(v: float) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(v))


def _sample_row(s: PointSample) -> str:
    return ",".join(format_float(v) for v in (
        s.x.real, s.x.imag, s.y.real, s.y.imag,
        s.omega.real, s.omega.imag, s.gamma.real, s.gamma.imag,
        s.tangency_res, s.leaf_dbar_res))


def write_grid_csv(path: Path | str,
                   samples: Sequence[PointSample]) -> int:
    """Write samples in grid order; returns the number of data rows."""
    lines = [CSV_HEADER]
    lines.extend(_sample_row(s) for s in samples)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(samples)


def excluded_rows(report: TensorReport) -> list[list]:
    """Excluded points as JSON-ready [x_re, x_im, y_re, y_im, reason]."""
    return [[p[0].real, p[0].imag, p[1].real, p[1].imag, reason]
            for p, reason in report.excluded]


def tensor_payload(report: TensorReport) -> dict:
    """Verdict-level fields of a certification run, JSON-ready."""
    return {
        "model_kind": report.model_kind,
        "grid": list(report.grid),
        "jet_order": report.jet_order,
        "sample_count": len(report.samples),
        "excluded": excluded_rows(report),
        "base_max_omega": report.base_max_omega,
        "base_max_omega_dy": report.base_max_omega_dy,
        "max_gamma": report.max_gamma,
        "max_tangency": report.max_tangency,
        "max_consistency": report.max_consistency,
        "max_leaf_dbar": report.max_leaf_dbar,
        "max_map_dbar": report.max_map_dbar,
        "scale": report.scale,
        "threshold": report.threshold,
        "verdict": report.verdict,
        "curvature_convention": "dd^c u reported as laplacian(u)/4",
    }


def write_run_report(path: Path | str, payload: dict) -> None:
    """Deterministic JSON dump: sorted keys, two-space indent, newline."""
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def render_figures(out_dir: Path | str,
                   samples: Sequence[PointSample]) -> list[Path]:
    """Render magnitude scatter plots next to the CSV; returns the paths.

    Opt-in by design: data consumers should read the CSV, these files are
    for quick visual inspection only.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not samples:
        return []
    written: list[Path] = []
    panels = (
        ("gamma_magnitude.png", "obstruction magnitude over the base",
         [s.x.real for s in samples], [s.x.imag for s in samples],
         [abs(s.gamma) for s in samples]),
        ("omega_magnitude.png", "defect magnitude over the fiber",
         [s.y.real for s in samples], [s.y.imag for s in samples],
         [abs(s.omega) for s in samples]),
    )
    for name, title, xs, ys, cs in panels:
        fig, ax = plt.subplots(figsize=(5.0, 4.0))
        sc = ax.scatter(xs, ys, c=cs, s=12, cmap="viridis")
        ax.set_title(title)
        ax.set_xlabel("re")
        ax.set_ylabel("im")
        ax.set_aspect("equal", adjustable="datalim")
        fig.colorbar(sc, ax=ax)
        target = out / name
        fig.savefig(target, dpi=110)
        plt.close(fig)
        written.append(target)
    return written
