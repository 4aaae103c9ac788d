"""Manifest-driven command line front end.

A JSON manifest names a model, a grid, a list of checks, and output paths.
Four subcommands consume it: validate (manifest and model sanity only),
eval (grid sweep to CSV), certify (obstruction verdict report), and check
(named identity checks).  Runs are deterministic: grid order is row-major
regardless of thread count, floats are shortest round-trip decimals, and
reports carry the manifest digest instead of timestamps.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .curvature import LeafField, holomorphic_log_harmonicity, \
    negative_curvature_margin
from .errors import CheckFailed, ExprSyntaxError, FoliaError, ManifestError, \
    ValidationFailed
from .exprlang import Expr, parse
from .foliation import CylinderMap, Domain, FoliationModel, cylinder_map, \
    excluded_reason, explicit_cylinder_model, graph_model, product_model, \
    second_cylinder, vogel_points
from .holonomy import HolonomyDatum, holonomy_growth_residual, \
    period_family, periodicity_residual
from .invariants import TensorReport, a_change_residual, \
    admissibility_residuals, certify, connection_coefficient, \
    fiber_affine_change, gamma_cyl, gamma_from_chart, omega, \
    pullback_residuals, random_reparametrizations
from .report import render_figures, tensor_payload, write_grid_csv, \
    write_run_report

DEFAULT_SEED = 42
_GRID_RE = re.compile(r"^(\d+)x(\d+)$")


# manifest loading ----------------------------------------------------------

def _load_manifest(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest: {exc}",
                            location=str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(
            f"manifest is not valid JSON: {exc.msg} (offset {exc.pos})",
            location=str(path), span=(exc.pos, exc.pos)) from exc
    if not isinstance(data, dict):
        raise ManifestError("manifest root must be a JSON object",
                            location="$")
    return data


def _parse_expr(src, location: str) -> Expr:
    if not isinstance(src, str):
        raise ManifestError(f"{location} must be an expression string",
                            location=location)
    try:
        return parse(src)
    except ExprSyntaxError as exc:
        raise ManifestError(f"{location} does not parse: {exc}",
                            location=location, span=exc.span) from exc


def _number(value, location: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ManifestError(f"{location} must be a number", location=location)
    return float(value)


def _count(value, location: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int) \
            or value < minimum:
        raise ManifestError(f"{location} must be an integer >= {minimum}",
                            location=location)
    return value


def _complex_value(value, location: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(_number(value[0], location), _number(value[1], location))
    raise ManifestError(f"{location} must be a number or [re, im] pair",
                        location=location)


def _point_list(params: dict, key: str, location: str
                ) -> list[tuple[complex, complex]]:
    raw = params.get(key)
    loc = f"{location}.{key}"
    if not isinstance(raw, list) or not raw:
        raise ManifestError(f"{loc} must be a non-empty list", location=loc)
    pts = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, list) or len(entry) != 4:
            raise ManifestError(
                f"{loc}[{i}] must be [x_re, x_im, y_re, y_im]",
                location=f"{loc}[{i}]")
        a, b, c, d = (_number(v, f"{loc}[{i}]") for v in entry)
        pts.append((complex(a, b), complex(c, d)))
    return pts


def _complex_list(params: dict, key: str, location: str) -> list[complex]:
    raw = params.get(key)
    loc = f"{location}.{key}"
    if not isinstance(raw, list) or not raw:
        raise ManifestError(f"{loc} must be a non-empty list", location=loc)
    return [_complex_value(v, f"{loc}[{i}]") for i, v in enumerate(raw)]


def _build_domain(section, location: str) -> Domain:
    if section is None:
        return Domain()
    if not isinstance(section, dict):
        raise ManifestError(f"{location} must be an object", location=location)
    known = ("base_radius", "fiber_bound", "sing_clearance")
    for key in section:
        if key not in known:
            raise ManifestError(f"{location}.{key} is not a domain field",
                                location=f"{location}.{key}")
    kwargs = {k: _number(section[k], f"{location}.{k}")
              for k in known if k in section}
    try:
        return Domain(**kwargs)
    except ValidationFailed as exc:
        raise ManifestError(f"{location}: {exc}", location=location) from exc


def _build_model(manifest: dict) -> FoliationModel:
    section = manifest.get("model")
    if not isinstance(section, dict):
        raise ManifestError("manifest needs a model object", location="model")
    kind = section.get("kind")
    dom = _build_domain(section.get("domain"), "model.domain")
    try:
        if kind == "graph":
            return graph_model(_parse_expr(section.get("f"), "model.f"), dom)
        if kind == "product":
            return product_model(dom)
        if kind == "explicit":
            return explicit_cylinder_model(
                _parse_expr(section.get("f1"), "model.f1"),
                _parse_expr(section.get("f2"), "model.f2"), dom)
    except ValidationFailed as exc:
        raise ManifestError(f"model does not validate: {exc}",
                            location="model") from exc
    raise ManifestError(
        f"model.kind must be graph, product, or explicit, got {kind!r}",
        location="model.kind")


def _grid_dims(manifest: dict, override: str | None) -> tuple[int, int]:
    if override is not None:
        m = _GRID_RE.match(override)
        if m is None:
            raise ManifestError(
                f"--grid must look like 21x21, got {override!r}",
                location="--grid")
        return int(m.group(1)), int(m.group(2))
    section = manifest.get("grid")
    if section is None:
        return 21, 21
    if not isinstance(section, dict):
        raise ManifestError("grid must be an object", location="grid")
    return (_count(section.get("base", 21), "grid.base"),
            _count(section.get("fiber", 21), "grid.fiber"))


@dataclass
class OutputConfig:
    directory: Path
    csv: Path
    report: Path
    figures: bool


def _output_config(manifest: dict, manifest_path: Path,
                   figures_flag: bool) -> OutputConfig:
    section = manifest.get("output", {})
    if not isinstance(section, dict):
        raise ManifestError("output must be an object", location="output")
    directory = manifest_path.resolve().parent / section.get("directory", ".")
    return OutputConfig(
        directory=directory,
        csv=directory / section.get("csv", "grid.csv"),
        report=directory / section.get("report", "report.json"),
        figures=bool(section.get("figures", False)) or figures_flag)


# run context ---------------------------------------------------------------

@dataclass
class RunContext:
    manifest: dict
    manifest_path: Path
    model: FoliationModel
    F: CylinderMap
    n_base: int
    m_fiber: int
    jet_order: int
    threads: int
    tol_override: float | None
    seed: int
    _tensor: TensorReport | None = None

    def tensor(self) -> TensorReport:
        if self._tensor is None:
            self._tensor = certify(self.model, self.n_base, self.m_fiber,
                                   self.jet_order, self.threads)
        return self._tensor

    def tol(self, params: dict, default: float) -> float:
        if self.tol_override is not None:
            return self.tol_override
        if "tol" in params:
            return _number(params["tol"], "checks[].tol")
        return default


def _make_context(manifest: dict, path: Path, args) -> RunContext:
    n_base, m_fiber = _grid_dims(manifest, args.grid)
    jet_order = args.jet_order
    if jet_order is None:
        jet_order = manifest.get("jet_order", 3)
        if jet_order not in (3, 4):
            raise ManifestError("jet_order must be 3 or 4",
                                location="jet_order")
    raw_seed = os.environ.get("FOLIA_SEED", str(DEFAULT_SEED))
    try:
        seed = int(raw_seed)
    except ValueError:
        raise ManifestError(
            f"FOLIA_SEED must be an integer, got {raw_seed!r}",
            location="FOLIA_SEED") from None
    model = _build_model(manifest)
    return RunContext(
        manifest=manifest, manifest_path=path, model=model,
        F=cylinder_map(model), n_base=n_base, m_fiber=m_fiber,
        jet_order=jet_order, threads=max(1, args.threads),
        tol_override=args.tol, seed=seed)


# check registry ------------------------------------------------------------

def _residual_row(name: str, worst: float, tol: float, detail: str) -> dict:
    return {"name": name, "status": "pass" if worst < tol else "fail",
            "max_residual": worst, "tolerance": tol, "detail": detail}


def _shared_points(ctx: RunContext, count: int
                   ) -> list[tuple[complex, complex]]:
    n_fiber = min(5, count)
    n_base = -(-count // n_fiber)
    xs = vogel_points(n_base, 0.75 * ctx.F.domain.base_radius)
    ys = vogel_points(n_fiber, 0.8)
    pts = [(x, y) for x in xs for y in ys]
    return pts[:count]


def _ck_zero_section(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-10)
    worst = 0.0
    for x in vogel_points(ctx.n_base, ctx.F.domain.base_radius):
        if excluded_reason(ctx.F, (x, 0j)) is not None:
            continue
        om = omega(ctx.F, (x, 0j), ctx.jet_order)
        worst = max(worst, abs(om.value), abs(om.d_y))
    return _residual_row("zero-section", worst, tol,
                         "defect and its fiber derivative on the zero "
                         "section")


def _ck_leaf_holomorphy(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-10)
    return _residual_row("leaf-holomorphy", ctx.tensor().max_leaf_dbar, tol,
                         "conjugate-fiber derivative of the defect over "
                         "the grid")


def _ck_tangency(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-8)
    return _residual_row("tangency", ctx.tensor().max_tangency, tol,
                         "determinant pairing of the drift with the fiber "
                         "direction")


def _ck_consistency(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-10)
    return _residual_row("consistency", ctx.tensor().max_consistency, tol,
                         "defect relation on the non-extraction component")


def _ck_pullback_identity(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-9)
    th = p.get("theta")
    if not isinstance(th, dict):
        raise ManifestError(f"{loc}.theta must be an object",
                            location=f"{loc}.theta")
    theta = fiber_affine_change(
        _parse_expr(th.get("theta1", "x"), f"{loc}.theta.theta1"),
        _parse_expr(th.get("slope", "1"), f"{loc}.theta.slope"),
        _parse_expr(th.get("shift", "0"), f"{loc}.theta.shift"),
        ctx.F.domain)
    worst = 0.0
    for at in _point_list(p, "points", loc):
        r1, r2 = pullback_residuals(ctx.F, theta, at, ctx.jet_order)
        worst = max(worst, r1, r2)
    return _residual_row("pullback-identity", worst, tol,
                         "both reparametrization laws at the given points")


def _ck_random_pullback(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-9)
    count = _count(p.get("count", 100), f"{loc}.count")
    n_pts = _count(p.get("points", 5), f"{loc}.points")
    pts = list(zip(vogel_points(n_pts, 0.4), vogel_points(n_pts, 0.5)))
    worst = 0.0
    for theta in random_reparametrizations(count, ctx.seed):
        for at in pts:
            r1, r2 = pullback_residuals(ctx.F, theta, at, ctx.jet_order)
            worst = max(worst, r1, r2)
    return _residual_row(
        "random-pullback", worst, tol,
        f"{count} seeded reparametrizations at {n_pts} points "
        f"(seed {ctx.seed})")


def _ck_admissibility(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-9)
    disk = _parse_expr(p.get("disk"), f"{loc}.disk")
    slope = _parse_expr(p.get("slope"), f"{loc}.slope")
    n = _count(p.get("base_points", 12), f"{loc}.base_points")
    worst = 0.0
    for x in vogel_points(n, ctx.F.domain.base_radius):
        r_disk, r_slope = admissibility_residuals(ctx.F, disk, slope, x,
                                                  ctx.jet_order)
        worst = max(worst, r_disk, r_slope)
    return _residual_row("admissibility", worst, tol,
                         "disk and slope compatibility across the base")


def _ck_periodicity(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-10)
    fam = period_family(_parse_expr(p.get("period"), f"{loc}.period"),
                        str(p.get("description", "")), ctx.F.domain)
    n_base = _count(p.get("base", 5), f"{loc}.base")
    n_fiber = _count(p.get("fiber", 5), f"{loc}.fiber")
    radius = _number(p.get("fiber_radius", 1.5), f"{loc}.fiber_radius")
    worst = 0.0
    for x in vogel_points(n_base, ctx.F.domain.base_radius):
        for y in vogel_points(n_fiber, radius):
            worst = max(worst,
                        periodicity_residual(ctx.F, fam, (x, y),
                                             ctx.jet_order))
    return _residual_row("periodicity", worst, tol,
                         "defect shift against the period derivative")


def _ck_curvature_margin(ctx: RunContext, p: dict, loc: str) -> dict:
    phi = _parse_expr(p.get("phi"), f"{loc}.phi")
    g = _parse_expr(p.get("g", "1"), f"{loc}.g")
    eps = _number(p.get("eps"), f"{loc}.eps") if "eps" in p else None
    if eps is None:
        raise ManifestError(f"{loc}.eps is required", location=f"{loc}.eps")
    samples = _complex_list(p, "samples", loc)
    holds, margin = negative_curvature_margin(phi, g, eps, samples)
    return {"name": "curvature-margin",
            "status": "pass" if holds else "fail",
            "max_residual": margin, "tolerance": None,
            "detail": f"margin {margin!r} (positive means the leafwise "
                      f"bound holds at eps={eps!r})"}


def _ck_log_harmonicity(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-5)
    expr = _parse_expr(p.get("field"), f"{loc}.field")
    x0 = _complex_value(p.get("x", 0), f"{loc}.x")
    zeros = tuple(_complex_list(p, "zeros", loc)) if "zeros" in p else ()
    clearance = _number(p.get("clearance", 1e-3), f"{loc}.clearance")
    field = LeafField.from_expr(expr, x=x0, zeros=zeros, clearance=clearance)
    samples = _complex_list(p, "samples", loc)
    worst = holomorphic_log_harmonicity(field, samples)
    return _residual_row("log-harmonicity", worst, tol,
                         "leaf Laplacian of the log-modulus of a "
                         "holomorphic field")


def _ck_change_of_cylinder(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-8)
    height = _complex_value(p.get("height", 1), f"{loc}.height")
    count = _count(p.get("points", 50), f"{loc}.points")
    second = second_cylinder(ctx.model, height)
    worst = 0.0
    for at in _shared_points(ctx, count):
        z = ctx.F.value(at)
        worst = max(worst, a_change_residual(ctx.F, second, z,
                                             ctx.jet_order))
        eta = connection_coefficient(ctx.F, z, ctx.jet_order)
        eta_second = connection_coefficient(second, z, ctx.jet_order)
        worst = max(worst, abs(eta - eta_second))
    return _residual_row("change-of-cylinder", worst, tol,
                         f"one-form change law and connection agreement "
                         f"at {count} shared points")


def _ck_chart_formula(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-8)
    n = _count(p.get("points", 20), f"{loc}.points")
    worst = 0.0
    for x in vogel_points(n, ctx.F.domain.base_radius):
        via_chart = gamma_from_chart(ctx.model, x, ctx.jet_order)
        via_jets = gamma_cyl(ctx.F, (x, 0j), ctx.jet_order)
        worst = max(worst, abs(via_chart - via_jets))
    return _residual_row("chart-formula", worst, tol,
                         "chart route against jet extraction on the zero "
                         "section")


def _ck_growth_law(ctx: RunContext, p: dict, loc: str) -> dict:
    tol = ctx.tol(p, 1e-10)
    raw = p.get("samples")
    if not isinstance(raw, list) or not raw:
        raise ManifestError(f"{loc}.samples must be a non-empty list",
                            location=f"{loc}.samples")
    samples = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, list) or len(entry) != 4:
            raise ManifestError(
                f"{loc}.samples[{i}] must be [y_re, y_im, h_re, h_im]",
                location=f"{loc}.samples[{i}]")
        a, b, c, d = (_number(v, f"{loc}.samples[{i}]") for v in entry)
        samples.append((complex(a, b), complex(c, d)))
    generators = tuple(_complex_list(p, "generators", loc))
    multipliers = tuple(_complex_list(p, "multipliers", loc))
    scale = _complex_value(p.get("scale", 1), f"{loc}.scale")
    rate = _complex_value(p.get("rate", 0), f"{loc}.rate")
    try:
        datum = HolonomyDatum(generators, multipliers, scale, rate)
    except ValidationFailed as exc:
        raise ManifestError(f"{loc}: {exc}", location=loc) from exc
    worst = holonomy_growth_residual(samples, datum)
    detail = "holonomy growth law over matched sample pairs"
    if p.get("require_consistent", False) and not datum.is_consistent():
        return {"name": "growth-law", "status": "fail",
                "max_residual": worst, "tolerance": tol,
                "detail": detail + "; growth datum is inconsistent "
                f"({datum.consistency():.3e})"}
    return _residual_row("growth-law", worst, tol, detail)


REGISTRY = {
    "zero-section": _ck_zero_section,
    "leaf-holomorphy": _ck_leaf_holomorphy,
    "tangency": _ck_tangency,
    "consistency": _ck_consistency,
    "pullback-identity": _ck_pullback_identity,
    "random-pullback": _ck_random_pullback,
    "admissibility": _ck_admissibility,
    "periodicity": _ck_periodicity,
    "curvature-margin": _ck_curvature_margin,
    "log-harmonicity": _ck_log_harmonicity,
    "change-of-cylinder": _ck_change_of_cylinder,
    "chart-formula": _ck_chart_formula,
    "growth-law": _ck_growth_law,
}

_EXPR_SLOTS = {
    "pullback-identity": (("theta", "theta1"), ("theta", "slope"),
                          ("theta", "shift")),
    "admissibility": (("disk",), ("slope",)),
    "periodicity": (("period",),),
    "curvature-margin": (("phi",), ("g",)),
    "log-harmonicity": (("field",),),
}


def _check_items(manifest: dict) -> list[tuple[str, dict, str]]:
    items = manifest.get("checks", [])
    if not isinstance(items, list):
        raise ManifestError("checks must be a list", location="checks")
    out = []
    for i, item in enumerate(items):
        loc = f"checks[{i}]"
        if not isinstance(item, dict):
            raise ManifestError(f"{loc} must be an object", location=loc)
        name = item.get("name")
        if name not in REGISTRY:
            raise ManifestError(
                f"{loc}.name must be one of {sorted(REGISTRY)}, "
                f"got {name!r}", location=f"{loc}.name")
        out.append((name, item, loc))
    return out


def _run_checks(ctx: RunContext) -> list[dict]:
    rows = []
    for name, item, loc in _check_items(ctx.manifest):
        try:
            rows.append(REGISTRY[name](ctx, item, loc))
        except ManifestError:
            raise
        except FoliaError as exc:
            rows.append({"name": name, "status": "error",
                         "max_residual": None, "tolerance": None,
                         "detail": f"{type(exc).__name__}: {exc}"})
    return rows


# commands ------------------------------------------------------------------

def _base_payload(ctx: RunContext, command: str) -> dict:
    digest = hashlib.sha256(ctx.manifest_path.read_bytes()).hexdigest()
    return {
        "command": command,
        "tool_version": __version__,
        "manifest_sha256": digest,
        "grid": [ctx.n_base, ctx.m_fiber],
        "jet_order": ctx.jet_order,
        "seed": ctx.seed,
    }


def _cmd_validate(manifest: dict, path: Path) -> int:
    model = _build_model(manifest)
    n_base, m_fiber = _grid_dims(manifest, None)
    _output_config(manifest, path, False)
    items = _check_items(manifest)
    for name, item, loc in items:
        for slot in _EXPR_SLOTS.get(name, ()):
            holder, key = (item, slot[0]) if len(slot) == 1 \
                else (item.get(slot[0], {}), slot[1])
            if isinstance(holder, dict) and key in holder:
                _parse_expr(holder[key], f"{loc}.{'.'.join(slot)}")
    kind = type(model).__name__
    print(f"manifest ok: {kind}, grid {n_base}x{m_fiber}, "
          f"{len(items)} checks")
    return 0


def _cmd_eval(ctx: RunContext, out: OutputConfig) -> int:
    tensor = ctx.tensor()
    out.directory.mkdir(parents=True, exist_ok=True)
    rows = write_grid_csv(out.csv, tensor.samples)
    print(f"wrote {rows} rows to {out.csv}")
    for (x, y), reason in tensor.excluded:
        print(f"excluded x={x!r} y={y!r}: {reason}")
    if out.figures:
        for fig in render_figures(out.directory, tensor.samples):
            print(f"wrote figure {fig}")
    return 0


def _cmd_certify(ctx: RunContext, out: OutputConfig) -> int:
    tensor = ctx.tensor()
    payload = _base_payload(ctx, "certify")
    payload.update(tensor_payload(tensor))
    payload["checks"] = []
    out.directory.mkdir(parents=True, exist_ok=True)
    write_run_report(out.report, payload)
    print(f"verdict: {tensor.verdict} (max obstruction {tensor.max_gamma!r}, "
          f"threshold {tensor.threshold!r})")
    print(f"wrote report to {out.report}")
    if out.figures:
        for fig in render_figures(out.directory, tensor.samples):
            print(f"wrote figure {fig}")
    return 0 if tensor.verdict != "inconclusive" else 1


def _cmd_check(ctx: RunContext, out: OutputConfig) -> int:
    rows = _run_checks(ctx)
    payload = _base_payload(ctx, "check")
    payload["model_kind"] = ctx.F.provenance.kind
    payload["checks"] = rows
    payload["all_passed"] = all(r["status"] == "pass" for r in rows)
    payload["verdict"] = None
    out.directory.mkdir(parents=True, exist_ok=True)
    write_run_report(out.report, payload)
    for r in rows:
        mark = r["status"].upper()
        print(f"{mark} {r['name']}: {r['detail']}")
    print(f"wrote report to {out.report}")
    if not payload["all_passed"]:
        bad = tuple(r["name"] for r in rows if r["status"] != "pass")
        raise CheckFailed(f"{len(bad)} of {len(rows)} checks did not pass",
                          failures=bad)
    return 0


# entry point ---------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="folia",
        description="Certify foliation cylinder models from a JSON manifest.")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = (
        ("validate", "check the manifest and model without running anything"),
        ("eval", "sweep the evaluation grid and write the CSV"),
        ("certify", "run the obstruction certification and write a report"),
        ("check", "run the identity checks named in the manifest"),
    )
    for name, help_text in commands:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("manifest", help="path to the JSON manifest")
        if name == "validate":
            continue
        p.add_argument("--grid", help="override the grid as NxM, e.g. 21x21")
        p.add_argument("--tol", type=float,
                       help="override every identity tolerance")
        p.add_argument("--jet-order", type=int, choices=(3, 4),
                       dest="jet_order",
                       help="derivative order carried through the sweep")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for the grid map")
        p.add_argument("--figures", action="store_true",
                       help="render figures next to the data files")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        path = Path(args.manifest)
        manifest = _load_manifest(path)
        if args.command == "validate":
            return _cmd_validate(manifest, path)
        ctx = _make_context(manifest, path, args)
        out = _output_config(manifest, path,
                             getattr(args, "figures", False))
        if args.command == "eval":
            return _cmd_eval(ctx, out)
        if args.command == "certify":
            return _cmd_certify(ctx, out)
        return _cmd_check(ctx, out)
    except ManifestError as exc:
        where = f" [{exc.location}]" if exc.location else ""
        print(f"manifest error{where}: {exc}", file=sys.stderr)
        return 1 if args.command == "validate" else 2
    except CheckFailed as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
