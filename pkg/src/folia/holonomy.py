"""Functional-equation checks for leaf periods and holonomy growth.

Leaves with nontrivial topology impose two identities on the defect data: a
periodicity relation tying the defect at y and y + gamma(x) to the
antiholomorphic derivative of the period, and a growth law saying the
second-derivative profile along a closed leaf scales by the conjugated
holonomy multiplier.  Both are checked numerically on supplied data; no
quotient manifolds are constructed.  Exponential profiles are fitted by
least squares on path-unwrapped logarithms, so sample lists must be ordered
along the intended path.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientSamples,
    PeriodNotAPeriod,
    ValidationFailed,
    VanishingSample,
)
from .exprlang import Expr, eval_jet, expr_uses, parse
from .foliation import CylinderMap, Domain, base_lattice
from .invariants import omega
from .wirtinger import DEFAULT_ORDER, D_XBAR, Point

PERIOD_TOL = 1e-10
PAIR_MATCH_TOL = 1e-9

Sample = tuple[complex, complex]


@dataclass(frozen=True)
class PeriodFamily:
    """A continuous family of leaf periods, one per base point."""

    gamma: Expr
    description: str = ""


def period_family(gamma: Expr | str, description: str = "",
                  domain: Domain | None = None) -> PeriodFamily:
    """Validated period family: a nonvanishing function of x alone."""
    dom = domain if domain is not None else Domain()
    g = parse(gamma) if isinstance(gamma, str) else gamma
    if expr_uses(g, "y"):
        raise ValidationFailed("periods must depend on the base point only",
                               invariant="period-base-function")
    for p in base_lattice(dom):
        if abs(eval_jet(g, (p, 0j), order=1).value) <= 1e-12:
            raise ValidationFailed(
                f"period vanishes at x = {p!r}",
                invariant="nonvanishing-period", point=(p, 0j))
    return PeriodFamily(g, description)


@dataclass(frozen=True)
class HolonomyDatum:
    """Generators of a leaf's period lattice with their holonomy
    multipliers and a fitted exponential growth profile."""

    generators: tuple[complex, ...]
    multipliers: tuple[complex, ...]
    scale: complex
    rate: complex

    def __post_init__(self):
        if len(self.generators) != len(self.multipliers) or not self.generators:
            raise ValidationFailed(
                "need one multiplier per generator",
                invariant="generator-multiplier-pairing")
        for m in self.multipliers:
            if abs(m) <= 1e-12:
                raise ValidationFailed("multipliers must be nonzero",
                                       invariant="nonzero-multiplier")

    def consistency(self) -> float:
        """How far the growth rate is from solving
        exp(rate * generator) = conj(multiplier) for every generator."""
        return max(abs(cmath.exp(self.rate * g) - m.conjugate())
                   for g, m in zip(self.generators, self.multipliers))

    def is_consistent(self, tol: float = 1e-10) -> bool:
        return self.consistency() < tol


def periodicity_residual(F: CylinderMap, p: PeriodFamily, at: Point,
                         order: int = DEFAULT_ORDER) -> float:
    """Residual of the period relation for the defect at one point.

    First checks that gamma really is a period of the map itself; then
    measures | omega(x, y + gamma) - omega(x, y) + 2i * dgamma/dxbar |.
    """
    x, y = at
    gj = eval_jet(p.gamma, (x, 0j), order=1)
    shifted = (x, y + gj.value)
    v0 = F.value(at)
    v1 = F.value(shifted)
    mismatch = max(abs(v1[0] - v0[0]), abs(v1[1] - v0[1]))
    if mismatch >= PERIOD_TOL:
        raise PeriodNotAPeriod(
            f"map moves by {mismatch:.3e} under the claimed period at "
            f"{at!r}", point=at, mismatch=mismatch)
    om0 = omega(F, at, order)
    om1 = omega(F, shifted, order)
    return abs(om1.value - om0.value + 2j * gj.deriv(D_XBAR))


def holonomy_growth_residual(h_samples: list[Sample], d: HolonomyDatum,
                             match_tol: float = PAIR_MATCH_TOL) -> float:
    """Worst violation of h(y + generator) = conj(multiplier) * h(y)
    over every sample pair related by a generator."""
    pairs = 0
    worst = 0.0
    for gen, mult in zip(d.generators, d.multipliers):
        for y0, h0 in h_samples:
            target = y0 + gen
            for y1, h1 in h_samples:
                if abs(y1 - target) <= match_tol:
                    pairs += 1
                    worst = max(worst, abs(h1 - mult.conjugate() * h0))
                    break
    if pairs == 0:
        raise InsufficientSamples(
            "no sample pairs are related by any generator")
    return worst


def exponential_fit(h_samples: list[Sample]
                    ) -> tuple[complex, complex, float]:
    """Least-squares fit of samples to scale * exp(rate * y).

    Logarithms are unwrapped cumulatively along the sample order, so the
    branch is deterministic for path-ordered input.  Returns the fitted
    scale, rate, and the worst log-domain deviation.
    """
    if len(h_samples) < 3:
        raise InsufficientSamples(
            f"need at least 3 samples, got {len(h_samples)}")
    ys: list[complex] = []
    logs: list[complex] = []
    acc = 0j
    prev: complex | None = None
    for y, h in h_samples:
        if abs(h) <= 1e-12:
            raise VanishingSample(
                f"sample at y = {y!r} vanishes", sample=(y, h))
        if prev is None:
            acc = cmath.log(h)
        else:
            acc = acc + cmath.log(h / prev)
        prev = h
        ys.append(y)
        logs.append(acc)
    design = np.array([[1.0, y] for y in ys], dtype=complex)
    rhs = np.array(logs, dtype=complex)
    coef, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    deviation = float(max(abs(rhs - design @ coef)))
    return cmath.exp(complex(coef[0])), complex(coef[1]), deviation
