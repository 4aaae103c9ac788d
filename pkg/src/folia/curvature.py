"""Leafwise curvature checks: Laplacians of log-moduli and metric margins.

Curvature along a leaf is probed through a single scalar device, the
five-point Laplacian in the leaf coordinate, reported so that the curvature
form of a weight u is Laplacian(u) / 4.  Holomorphic sections contribute
nothing: away from zeros the log-modulus-squared of a leafwise holomorphic
field is harmonic, and that is checked directly rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import NotLeafwiseHolomorphic, StencilHitsZeroSet
from .exprlang import Expr, eval_jet, parse
from .wirtinger import D_YBAR, fd_wirtinger

DEFAULT_CURVATURE_STEP = 1e-2
_HOLOMORPHY_TOL = 1e-8


@dataclass(frozen=True)
class LeafField:
    """A function of the leaf coordinate at a fixed base point, together
    with its declared zero set and a clearance radius that every stencil
    evaluation must respect."""

    func: Callable[[complex], complex]
    zeros: tuple[complex, ...] = ()
    clearance: float = 1e-3

    @classmethod
    def from_expr(cls, e: Expr | str, x: complex = 0j,
                  zeros: Iterable[complex] = (),
                  clearance: float = 1e-3) -> "LeafField":
        expr = parse(e) if isinstance(e, str) else e

        def func(y: complex) -> complex:
            return eval_jet(expr, (x, y), order=1).value

        return cls(func, tuple(zeros), clearance)

    def guard(self, p: complex) -> None:
        for z in self.zeros:
            if abs(p - z) < self.clearance:
                raise StencilHitsZeroSet(
                    f"stencil point {p!r} is within clearance of zero "
                    f"{z!r}", point=p)


def leaf_laplacian(field: LeafField, y: complex,
                   h: float = DEFAULT_CURVATURE_STEP, *,
                   richardson: bool = True) -> float:
    """Five-point Laplacian of a real-valued leaf field at y.

    One Richardson level is applied by default; pass richardson=False for
    the raw second-order stencil (useful for convergence-rate probes).
    """

    def stencil(step: float) -> float:
        pts = (y + step, y - step, y + 1j * step, y - 1j * step)
        field.guard(y)
        for p in pts:
            field.guard(p)
        center = complex(field.func(y)).real
        total = sum(complex(field.func(p)).real for p in pts)
        return (total - 4.0 * center) / (step * step)

    coarse = stencil(h)
    if not richardson:
        return coarse
    fine = stencil(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def negative_curvature_margin(phi: Expr | str, g_weight: Expr | str,
                              eps: float, samples: Sequence[complex],
                              h: float = DEFAULT_CURVATURE_STEP
                              ) -> tuple[bool, float]:
    """Check K = Laplacian(phi)/4 <= -eps * g on the samples.

    Returns (holds, margin) with margin the worst value of -eps*g - K;
    the bound holds when the margin is strictly positive.
    """
    phi_field = LeafField.from_expr(phi)
    g_expr = parse(g_weight) if isinstance(g_weight, str) else g_weight
    margin = math.inf
    for y in samples:
        curv = leaf_laplacian(phi_field, y, h) / 4.0
        g_val = complex(eval_jet(g_expr, (0j, y), order=1).value).real
        margin = min(margin, -eps * g_val - curv)
    return margin > 0.0, margin


def holomorphic_log_harmonicity(field: LeafField,
                                samples: Sequence[complex],
                                h: float = DEFAULT_CURVATURE_STEP) -> float:
    """Worst Laplacian of log|field|^2 over the samples.

    The field must be leafwise holomorphic; a divided-difference check of
    the conjugate-direction derivative guards the precondition at every
    sample before any logarithm is taken.
    """
    for y in samples:
        res = abs(fd_wirtinger(lambda px, py: field.func(py), (0j, y),
                               D_YBAR).value)
        if res >= _HOLOMORPHY_TOL:
            raise NotLeafwiseHolomorphic(
                f"conjugate-direction derivative {res:.3e} at y = {y!r}",
                point=(0j, y), residual=res)

    def log_sq(y: complex) -> float:
        v = abs(field.func(y))
        if v == 0.0:
            raise StencilHitsZeroSet(
                f"field vanishes at stencil point {y!r}", point=y)
        return 2.0 * math.log(v)

    log_field = LeafField(log_sq, field.zeros, field.clearance)
    return max(abs(leaf_laplacian(log_field, y, h)) for y in samples)
