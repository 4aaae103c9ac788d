"""Forward-mode jet arithmetic over mixed Wirtinger multi-indices.

A jet records the value of a smooth map ``f(x, y)`` of two complex variables
together with every mixed partial

    d^a/dx^a  d^b/dxbar^b  d^c/dy^c  d^d/dybar^d  f

of total order ``a+b+c+d`` up to a fixed bound.  The conjugate coordinates are
treated as formally independent variables, which is what makes the ordinary
Leibniz and chain rules apply verbatim and lets holomorphy show up as exact
absence of the antiholomorphic entries.

Absent entries are exact zeros: operations never materialize an entry whose
value is identically zero, so statements like "this jet has no dybar
dependence" are checked for free.

The module also provides a deliberately independent cross-check,
:func:`fd_wirtinger`, which estimates single entries from central differences
of plain point evaluations recombined into the Wirtinger operators.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as _iter_product
from math import comb, factorial
from typing import Callable, Iterator, Literal, Mapping, NamedTuple

from .errors import DivisionNearPole, FoliaError, LogBranchNearZero, StencilOutsideDomain

MultiIndex = tuple[int, int, int, int]
Point = tuple[complex, complex]
Variable = Literal["x", "y"]

ZERO_INDEX: MultiIndex = (0, 0, 0, 0)
D_X: MultiIndex = (1, 0, 0, 0)
D_XBAR: MultiIndex = (0, 1, 0, 0)
D_Y: MultiIndex = (0, 0, 1, 0)
D_YBAR: MultiIndex = (0, 0, 0, 1)

DEFAULT_ORDER = 3
MAX_ORDER = 4

DEFAULT_FD_STEP = 1e-4

_ZERO = 0j


def total_order(index: MultiIndex) -> int:
    """Total differentiation order |index|."""
    return index[0] + index[1] + index[2] + index[3]


@lru_cache(maxsize=None)
def indices_up_to(order: int) -> tuple[MultiIndex, ...]:
    """All multi-indices with total order <= ``order``, ascending by total order."""
    idxs = [i for i in _iter_product(range(order + 1), repeat=4) if sum(i) <= order]
    idxs.sort(key=lambda t: (sum(t), t))
    return tuple(idxs)


def _binom(kappa: MultiIndex, lam: MultiIndex) -> int:
    return (comb(kappa[0], lam[0]) * comb(kappa[1], lam[1])
            * comb(kappa[2], lam[2]) * comb(kappa[3], lam[3]))


@lru_cache(maxsize=None)
def _mul_terms(kappa: MultiIndex):
    """Leibniz decompositions of ``kappa`` grouped into symmetric pairs.

    Pairing (lam, mu) with (mu, lam) keeps multiplication exactly commutative
    in floating point: both orders sum the same pair values in the same
    sequence.
    """
    out = []
    for lam in _iter_product(*(range(k + 1) for k in kappa)):
        mu = (kappa[0] - lam[0], kappa[1] - lam[1], kappa[2] - lam[2], kappa[3] - lam[3])
        if lam > mu:
            continue
        out.append((lam, mu, _binom(kappa, lam), lam != mu))
    return tuple(out)


def _check_orders(a: "WirtingerJet", b: "WirtingerJet") -> int:
    if a.order != b.order:
        raise ValueError(f"jet order mismatch: {a.order} vs {b.order}")
    return a.order


@dataclass(frozen=True)
class WirtingerJet:
    """Truncated mixed Wirtinger expansion of a smooth function of (x, y).

    ``derivs`` maps multi-indices of total order >= 1 to raw derivative
    values; the order-zero value lives in ``value``.  Instances are immutable
    and safe to share across threads.
    """

    order: int
    value: complex
    derivs: Mapping[MultiIndex, complex] = field(default_factory=dict)

    def deriv(self, index: MultiIndex) -> complex:
        """Raw derivative for ``index`` (exact 0 for absent entries)."""
        if index == ZERO_INDEX:
            return self.value
        return self.derivs.get(index, _ZERO)

    def _table(self) -> dict[MultiIndex, complex]:
        t = dict(self.derivs)
        t[ZERO_INDEX] = self.value
        return t

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        return jet_add(self, _promote(other, self.order))

    __radd__ = __add__

    def __sub__(self, other):
        return jet_sub(self, _promote(other, self.order))

    def __rsub__(self, other):
        return jet_sub(_promote(other, self.order), self)

    def __mul__(self, other):
        return jet_mul(self, _promote(other, self.order))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return jet_div(self, _promote(other, self.order))

    def __rtruediv__(self, other):
        return jet_div(_promote(other, self.order), self)

    def __neg__(self):
        return jet_neg(self)

    def __pow__(self, n: int):
        return jet_pow(self, n)


def _promote(v, order: int) -> WirtingerJet:
    if isinstance(v, WirtingerJet):
        return v
    if isinstance(v, (int, float, complex)):
        return constant_jet(v, order)
    return NotImplemented


def constant_jet(value: complex, order: int = DEFAULT_ORDER) -> WirtingerJet:
    """Jet of a constant: value only, no derivative entries."""
    return WirtingerJet(order, complex(value), {})


def jet_seed(point: Point, var: Variable, order: int = DEFAULT_ORDER) -> WirtingerJet:
    """Jet of the coordinate function ``var`` at ``point``."""
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"jet order must be in 1..{MAX_ORDER}, got {order}")
    if var == "x":
        return WirtingerJet(order, complex(point[0]), {D_X: 1.0 + 0j})
    if var == "y":
        return WirtingerJet(order, complex(point[1]), {D_Y: 1.0 + 0j})
    raise ValueError(f"unknown seed variable {var!r}")


def jet_add(a: WirtingerJet, b: WirtingerJet) -> WirtingerJet:
    order = _check_orders(a, b)
    out = dict(a.derivs)
    for k, v in b.derivs.items():
        s = out.get(k, _ZERO) + v
        if s == 0:
            out.pop(k, None)
        else:
            out[k] = s
    return WirtingerJet(order, a.value + b.value, out)


def jet_sub(a: WirtingerJet, b: WirtingerJet) -> WirtingerJet:
    return jet_add(a, jet_neg(b))


def jet_neg(a: WirtingerJet) -> WirtingerJet:
    return WirtingerJet(a.order, -a.value, {k: -v for k, v in a.derivs.items()})


def jet_conj(a: WirtingerJet) -> WirtingerJet:
    """Complex conjugate: swaps (dx, dxbar) and (dy, dybar), conjugates values."""
    out = {}
    for (i, j, k, l), v in a.derivs.items():
        out[(j, i, l, k)] = v.conjugate()
    return WirtingerJet(a.order, a.value.conjugate(), out)


def jet_mul(a: WirtingerJet, b: WirtingerJet) -> WirtingerJet:
    order = _check_orders(a, b)
    ta, tb = a._table(), b._table()
    value = _ZERO
    out: dict[MultiIndex, complex] = {}
    for kappa in indices_up_to(order):
        s = _ZERO
        for lam, mu, coeff, paired in _mul_terms(kappa):
            t = ta.get(lam, _ZERO) * tb.get(mu, _ZERO)
            if paired:
                t = t + ta.get(mu, _ZERO) * tb.get(lam, _ZERO)
            s += coeff * t
        if kappa == ZERO_INDEX:
            value = s
        elif s != 0:
            out[kappa] = s
    return WirtingerJet(order, value, out)


def jet_div(a: WirtingerJet, b: WirtingerJet) -> WirtingerJet:
    """Quotient jet via a triangular solve of the Leibniz identity for a = q*b."""
    order = _check_orders(a, b)
    threshold = 1e-12 * (1.0 + abs(a.value))
    if abs(b.value) <= threshold:
        raise DivisionNearPole(
            f"denominator {b.value!r} within {threshold:.3e} of a pole",
            denominator=b.value)
    b_entries = sorted(b.derivs.items())
    q: dict[MultiIndex, complex] = {ZERO_INDEX: a.value / b.value}
    for kappa in indices_up_to(order):
        if kappa == ZERO_INDEX:
            continue
        s = a.deriv(kappa)
        for beta, vb in b_entries:
            lam = (kappa[0] - beta[0], kappa[1] - beta[1],
                   kappa[2] - beta[2], kappa[3] - beta[3])
            if min(lam) < 0:
                continue
            s -= _binom(kappa, beta) * q[lam] * vb
        q[kappa] = s / b.value
    value = q.pop(ZERO_INDEX)
    return WirtingerJet(order, value, {k: v for k, v in q.items() if v != 0})


def jet_pow(a: WirtingerJet, n: int) -> WirtingerJet:
    """Integer power by repeated multiplication; negative n via the reciprocal."""
    if not isinstance(n, int):
        raise TypeError(f"jet exponent must be an integer, got {type(n).__name__}")
    if n == 0:
        return constant_jet(1.0, a.order)
    if n < 0:
        return jet_div(constant_jet(1.0, a.order), jet_pow(a, -n))
    acc = a
    for _ in range(n - 1):
        acc = jet_mul(acc, a)
    return acc


def _shifted_series(a: WirtingerJet) -> WirtingerJet:
    """The jet minus its constant term (used as the little variable in chains)."""
    return WirtingerJet(a.order, _ZERO, dict(a.derivs))


def _compose_series(a: WirtingerJet, coeffs: list[complex]) -> WirtingerJet:
    """Horner evaluation of sum coeffs[k] * (a - a.value)^k, truncated exactly."""
    t = _shifted_series(a)
    acc = constant_jet(coeffs[-1], a.order)
    for c in reversed(coeffs[:-1]):
        acc = jet_add(jet_mul(acc, t), constant_jet(c, a.order))
    return acc


def jet_exp(a: WirtingerJet) -> WirtingerJet:
    e0 = cmath.exp(a.value)
    coeffs = [e0 / factorial(k) for k in range(a.order + 1)]
    return _compose_series(a, coeffs)


def jet_log(a: WirtingerJet) -> WirtingerJet:
    """Principal branch logarithm."""
    if abs(a.value) <= 1e-12:
        raise LogBranchNearZero(
            f"log argument {a.value!r} too close to the branch point", value=a.value)
    coeffs: list[complex] = [cmath.log(a.value)]
    for k in range(1, a.order + 1):
        coeffs.append(((-1) ** (k - 1)) / (k * a.value ** k))
    return _compose_series(a, coeffs)


_COMBINE_BINARY = {"add": jet_add, "sub": jet_sub, "mul": jet_mul, "div": jet_div}
_COMBINE_UNARY = {"neg": jet_neg, "conj": jet_conj, "exp": jet_exp, "log": jet_log}


def jet_combine(op: str, a: WirtingerJet, b=None) -> WirtingerJet:
    """Uniform dispatcher over the jet operations.

    ``op`` is one of add, sub, mul, div, pow-int, exp, log, conj, neg.  The
    binary ops and pow-int require ``b`` (an integer for pow-int).
    """
    if op in _COMBINE_BINARY:
        if b is None:
            raise ValueError(f"op {op!r} needs a second operand")
        return _COMBINE_BINARY[op](a, b)
    if op == "pow-int":
        if b is None:
            raise ValueError("pow-int needs an integer exponent")
        return jet_pow(a, b)
    if op in _COMBINE_UNARY:
        if b is not None:
            raise ValueError(f"op {op!r} is unary")
        return _COMBINE_UNARY[op](a)
    raise ValueError(f"unknown jet op {op!r}")


def derivative_jet(a: WirtingerJet, index: MultiIndex) -> WirtingerJet:
    """Jet of the derivative d^index a, with the order reduced accordingly.

    Raw-derivative storage makes this a pure reindexing; no coefficients.
    """
    k = total_order(index)
    new_order = a.order - k
    if new_order < 0:
        raise ValueError(f"cannot take order-{k} derivative of an order-{a.order} jet")
    out: dict[MultiIndex, complex] = {}
    for (i, j, m, n), v in a.derivs.items():
        sh = (i - index[0], j - index[1], m - index[2], n - index[3])
        if min(sh) < 0 or sh == ZERO_INDEX or total_order(sh) > new_order:
            continue
        out[sh] = v
    return WirtingerJet(new_order, a.deriv(index), out)


def holomorphy_residual(jet: WirtingerJet, var: Variable) -> float:
    """Modulus of the first-order antiholomorphic entry in ``var``.

    Zero iff the jet is holomorphic in that variable to first order.
    """
    if var == "x":
        return abs(jet.deriv(D_XBAR))
    if var == "y":
        return abs(jet.deriv(D_YBAR))
    raise ValueError(f"unknown variable {var!r}")


# finite-difference oracle --------------------------------------------------

class FDEstimate(NamedTuple):
    """A finite-difference derivative estimate and the outer step it used."""

    value: complex
    step: float


# First-order stencils in units of the step.  Shifts live on the integer
# lattice (u_x, v_x, u_y, v_y) of the four underlying real coordinates.
_FD_BASE: tuple[dict[tuple[int, int, int, int], complex], ...] = (
    # d/dx = (d/du - i d/dv) / 2 on the x plane
    {(1, 0, 0, 0): 0.25, (-1, 0, 0, 0): -0.25,
     (0, 1, 0, 0): -0.25j, (0, -1, 0, 0): 0.25j},
    # d/dxbar = (d/du + i d/dv) / 2 on the x plane
    {(1, 0, 0, 0): 0.25, (-1, 0, 0, 0): -0.25,
     (0, 1, 0, 0): 0.25j, (0, -1, 0, 0): -0.25j},
    # d/dy
    {(0, 0, 1, 0): 0.25, (0, 0, -1, 0): -0.25,
     (0, 0, 0, 1): -0.25j, (0, 0, 0, -1): 0.25j},
    # d/dybar
    {(0, 0, 1, 0): 0.25, (0, 0, -1, 0): -0.25,
     (0, 0, 0, 1): 0.25j, (0, 0, 0, -1): -0.25j},
)


def _convolve(a: dict, b: dict) -> dict:
    out: dict[tuple[int, int, int, int], complex] = {}
    for sa, wa in a.items():
        for sb, wb in b.items():
            key = (sa[0] + sb[0], sa[1] + sb[1], sa[2] + sb[2], sa[3] + sb[3])
            out[key] = out.get(key, _ZERO) + wa * wb
    return {k: w for k, w in out.items() if w != 0}


@lru_cache(maxsize=None)
def _fd_stencil(index: MultiIndex):
    st: dict[tuple[int, int, int, int], complex] = {(0, 0, 0, 0): 1.0 + 0j}
    for direction, count in enumerate(index):
        for _ in range(count):
            st = _convolve(st, _FD_BASE[direction])
    return tuple(sorted(st.items()))


def _fd_raw(f: Callable[[complex, complex], complex], point: Point,
            index: MultiIndex, h: float) -> complex:
    x0, y0 = point
    k = total_order(index)
    total = _ZERO
    for (su, sv, tu, tv), w in _fd_stencil(index):
        px = x0 + h * (su + 1j * sv)
        py = y0 + h * (tu + 1j * tv)
        try:
            total += w * complex(f(px, py))
        except FoliaError as exc:
            raise StencilOutsideDomain(
                f"stencil point ({px!r}, {py!r}) not evaluable: {exc}",
                point=(px, py)) from exc
    return total / h ** k


def fd_wirtinger(f: Callable[[complex, complex], complex], point: Point,
                 index: MultiIndex, h: float = DEFAULT_FD_STEP, *,
                 richardson: bool = True) -> FDEstimate:
    """Central-difference estimate of a single Wirtinger derivative.

    ``f`` is sampled pointwise only, so this is an independent check on the
    jet arithmetic.  The raw estimate converges at order h^2; by default one
    Richardson level combines steps h and h/2 into an order h^4 estimate.
    """
    if h <= 0:
        raise ValueError("fd step must be positive")
    e1 = _fd_raw(f, point, index, h)
    if not richardson:
        return FDEstimate(e1, h)
    e2 = _fd_raw(f, point, index, h / 2)
    return FDEstimate((4 * e2 - e1) / 3, h)
