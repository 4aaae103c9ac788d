"""The invariant pipeline: defect extraction and the tensors built from it.

A cylinder map F carries each vertical fiber onto a leaf holomorphically, but
may twist antiholomorphically across the base.  The twist is measured by a
single complex function, extracted pointwise from the linear relation

    2i * dF/dxbar = omega * dF/dy

which is solvable exactly when the antiholomorphic drift is tangent to the
leaves.  Everything else in this module is built from the jet of that
function: the fiber-direction derivative feeds a one-form, the second
derivative feeds the obstruction tensor whose vanishing characterizes
holomorphic cylinders, and the transformation laws under fiber-affine
reparametrizations are verified numerically rather than assumed.

Ambient-frame quantities are assembled from the complex-linear part of the
inverse differential, so the advertised linearity in the leaf slot and
antilinearity in the transverse slot hold exactly, not approximately.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import FoliaError, SingularJacobian, TangencyViolated, ValidationFailed
from .exprlang import (
    Expr,
    Var,
    add,
    const_expr,
    div,
    eval_jet,
    eval_jet_env,
    expr_uses,
    mul,
    parse,
    powi,
    sub,
)
from .foliation import (
    CylinderMap,
    DiffData,
    Domain,
    FoliationModel,
    GraphModel,
    base_lattice,
    cylinder_map,
    differential,
    eval_grid,
    excluded_reason,
    invert_local,
    vogel_points,
)
from .wirtinger import (
    D_X,
    D_XBAR,
    D_Y,
    D_YBAR,
    DEFAULT_ORDER,
    MAX_ORDER,
    Point,
    WirtingerJet,
    constant_jet,
    derivative_jet,
    jet_add,
    jet_div,
    jet_mul,
    jet_seed,
)

TANGENCY_TOL = 1e-8
VANISH_TOL = 1e-10
CERT_THRESHOLD_FACTOR = 1e-4

_D_YY = (0, 0, 2, 0)
_D_XBAR_Y = (0, 1, 1, 0)


# defect extraction ---------------------------------------------------------

@dataclass(frozen=True)
class OmegaJet:
    """The defect function and its derivatives at one cylinder point."""

    point: Point
    jet: WirtingerJet
    value: complex
    d_y: complex
    d_yy: complex
    d_ybar: complex
    d_xbar: complex
    consistency_residual: float
    tangency_residual: float
    component: int


def _omega_from_diff(d: DiffData) -> OmegaJet:
    tang = d.tangency_residual()
    if tang >= TANGENCY_TOL:
        raise TangencyViolated(
            f"antiholomorphic drift not tangent to the leaves "
            f"(residual {tang:.3e})", point=d.at, residual=tang)
    k = 2 if abs(d.d_y[1]) >= abs(d.d_y[0]) else 1
    jk = d.j2 if k == 2 else d.j1
    other = d.j1 if k == 2 else d.j2
    num = derivative_jet(jk, D_XBAR)
    den = derivative_jet(jk, D_Y)
    om = jet_div(jet_mul(constant_jet(2j, num.order), num), den)
    consistency = abs(2j * other.deriv(D_XBAR) - om.value * other.deriv(D_Y))
    return OmegaJet(
        point=d.at, jet=om, value=om.value,
        d_y=om.deriv(D_Y), d_yy=om.deriv(_D_YY),
        d_ybar=om.deriv(D_YBAR), d_xbar=om.deriv(D_XBAR),
        consistency_residual=consistency, tangency_residual=tang,
        component=k)


def omega(F: CylinderMap, at: Point, order: int = DEFAULT_ORDER) -> OmegaJet:
    """Extract the defect jet at a cylinder point.

    The component with the largest fiber derivative is used for the exact
    jet division; the other component's mismatch is reported as the
    consistency residual.
    """
    if not 3 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 3..{MAX_ORDER} to expose d_yy")
    return _omega_from_diff(differential(F, at, order))


def gamma_cyl(F: CylinderMap, at: Point, order: int = DEFAULT_ORDER) -> complex:
    """Second fiber derivative of the defect, the obstruction coefficient
    in cylinder coordinates."""
    return omega(F, at, order).d_yy


# ambient frames ------------------------------------------------------------

def _inverse_blocks(d: DiffData):
    """Complex blocks (P', Q') of the real-linear inverse differential.

    dF acts as v -> P v + Q conj(v); the inverse has the same shape and is
    read off the 4x4 complex matrix closed under conjugation.
    """
    a1, a2 = d.d_x
    b1, b2 = d.d_xbar
    c1, c2 = d.d_y
    big = np.array([
        [a1, c1, b1, 0],
        [a2, c2, b2, 0],
        [b1.conjugate(), 0, a1.conjugate(), c1.conjugate()],
        [b2.conjugate(), 0, a2.conjugate(), c2.conjugate()],
    ], dtype=complex)
    try:
        inv = np.linalg.inv(big)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobian(
            f"differential not invertible at {d.at!r}", point=d.at) from exc
    pp = ((complex(inv[0, 0]), complex(inv[0, 1])),
          (complex(inv[1, 0]), complex(inv[1, 1])))
    qp = ((complex(inv[0, 2]), complex(inv[0, 3])),
          (complex(inv[1, 2]), complex(inv[1, 3])))
    return pp, qp


@dataclass(frozen=True)
class FormCoefficients:
    """All form data at one ambient point, in exact bidegree.

    eps holds the coefficients of the antilinear transverse frame
    Z -> eps1*conj(Z1) + eps2*conj(Z2); leaf_row is the complex-linear row of
    the inverse differential's second component, contracted with leaf
    directions.  Because only complex-linear parts enter, the assembled maps
    are exactly antilinear in the transverse slot and linear in the leaf
    slot.
    """

    at: tuple[complex, complex]
    cyl_point: Point
    omega_value: complex
    omega_d_y: complex
    omega_d_yy: complex
    eps: tuple[complex, complex]
    leaf_row: tuple[complex, complex]
    leaf_dir: tuple[complex, complex]
    frame_residual: float

    def eps_on(self, Z: tuple[complex, complex]) -> complex:
        return self.eps[0] * Z[0].conjugate() + self.eps[1] * Z[1].conjugate()

    def leaf_component(self, Y: tuple[complex, complex]) -> complex:
        return self.leaf_row[0] * Y[0] + self.leaf_row[1] * Y[1]

    def lambda_on(self, Z: tuple[complex, complex]) -> complex:
        """The one-form carrying the defect value itself."""
        return self.omega_value * self.eps_on(Z)

    def a_on(self, Z: tuple[complex, complex]) -> complex:
        """The one-form carrying minus the fiber derivative of the defect."""
        return -self.omega_d_y * self.eps_on(Z)

    def gamma(self, Z: tuple[complex, complex],
              Y: tuple[complex, complex]) -> complex:
        """The obstruction tensor on (transverse, leaf) arguments."""
        return self.omega_d_yy * self.leaf_component(Y) * self.eps_on(Z)

    @property
    def lambda_coeff(self) -> complex:
        """Coefficient against conj(dz1)."""
        return self.omega_value * self.eps[0]

    @property
    def a_coeff(self) -> complex:
        """Coefficient against the transverse frame itself."""
        return -self.omega_d_y

    def gamma_coeffs(self, Y: tuple[complex, complex] | None = None
                     ) -> tuple[complex, complex]:
        """Tensor coefficients against conj(dz_j), leaf slot filled with Y
        (default: the pushed-forward fiber direction)."""
        lc = self.leaf_component(self.leaf_dir if Y is None else Y)
        return (self.omega_d_yy * lc * self.eps[0],
                self.omega_d_yy * lc * self.eps[1])


def ambient_forms(F: CylinderMap, z: tuple[complex, complex],
                  order: int = DEFAULT_ORDER,
                  seed: Point | None = None) -> FormCoefficients:
    """Invert to cylinder coordinates and assemble all form data at z."""
    p = invert_local(F, z, seed)
    d = differential(F, p, order)
    om = _omega_from_diff(d)
    pp, qp = _inverse_blocks(d)
    eps = (pp[0][0].conjugate(), pp[0][1].conjugate())
    frame_residual = max(abs(qp[0][0]), abs(qp[0][1]))
    leaf_dir = (d.j1.deriv(D_Y), d.j2.deriv(D_Y))
    return FormCoefficients(
        at=(z[0], z[1]), cyl_point=p,
        omega_value=om.value, omega_d_y=om.d_y, omega_d_yy=om.d_yy,
        eps=eps, leaf_row=pp[1], leaf_dir=leaf_dir,
        frame_residual=frame_residual)


def gamma_ambient(F: CylinderMap, z: tuple[complex, complex],
                  order: int = DEFAULT_ORDER) -> FormCoefficients:
    """Form data at z; use .gamma / .gamma_coeffs for the tensor part."""
    return ambient_forms(F, z, order)


def a_form(F: CylinderMap, z: tuple[complex, complex],
           order: int = DEFAULT_ORDER) -> FormCoefficients:
    """Form data at z; use .lambda_on / .a_on for the one-form parts."""
    return ambient_forms(F, z, order)


# fiber-affine reparametrizations -------------------------------------------

@dataclass(frozen=True)
class FiberAffineChange:
    """Reparametrization (x, y) -> (theta1(x), slope(x)*y + shift(x))."""

    theta1: Expr
    slope: Expr
    shift: Expr

    def value(self, at: Point) -> tuple[complex, complex]:
        x, y = at
        t1 = eval_jet(self.theta1, (x, 0j), order=1).value
        a = eval_jet(self.slope, (x, 0j), order=1).value
        b = eval_jet(self.shift, (x, 0j), order=1).value
        return (t1, a * y + b)


def fiber_affine_change(theta1: Expr | str, slope: Expr | str,
                        shift: Expr | str,
                        domain: Domain | None = None) -> FiberAffineChange:
    """Validated reparametrization: theta1 a holomorphic function of x,
    slope and shift functions of x with slope nonvanishing."""
    dom = domain if domain is not None else Domain()
    t1 = parse(theta1) if isinstance(theta1, str) else theta1
    a = parse(slope) if isinstance(slope, str) else slope
    b = parse(shift) if isinstance(shift, str) else shift
    for name, e in (("base component", t1), ("slope", a), ("shift", b)):
        if expr_uses(e, "y"):
            raise ValidationFailed(
                f"{name} must depend on x only",
                invariant="fiber-affine-shape")
    for p in base_lattice(dom):
        if abs(eval_jet(t1, (p, 0j), order=1).deriv(D_XBAR)) >= VANISH_TOL:
            raise ValidationFailed(
                f"base component not holomorphic at x = {p!r}",
                invariant="holomorphic-base-component", point=(p, 0j))
        if abs(eval_jet(a, (p, 0j), order=1).value) <= 1e-12:
            raise ValidationFailed(
                f"slope vanishes at x = {p!r}",
                invariant="nonvanishing-slope", point=(p, 0j))
    return FiberAffineChange(t1, a, b)


def _composed_diff(F: CylinderMap, theta: FiberAffineChange, at: Point,
                   order: int) -> tuple[DiffData, WirtingerJet, WirtingerJet]:
    """Jets of F composed with theta, via jet-valued variable bindings."""
    th1 = eval_jet(theta.theta1, at, order)
    a_j = eval_jet(theta.slope, at, order)
    b_j = eval_jet(theta.shift, at, order)
    th2 = jet_add(jet_mul(a_j, jet_seed(at, "y", order)), b_j)
    env = {"x": th1, "y": th2}
    j1 = eval_jet_env(F.f1, env)
    j2 = eval_jet_env(F.f2, env)
    return DiffData(at, j1, j2), th1, th2


def omega_of_composed(F: CylinderMap, theta: FiberAffineChange, at: Point,
                      order: int = DEFAULT_ORDER) -> OmegaJet:
    """Defect jet of the composed map F(theta1(x), slope*y + shift) at `at`."""
    d, _, _ = _composed_diff(F, theta, at, order)
    return _omega_from_diff(d)


def pullback_residuals(F: CylinderMap, theta: FiberAffineChange, at: Point,
                       order: int = DEFAULT_ORDER) -> tuple[float, float]:
    """Residuals of the two transformation laws at one point.

    First: the composed defect satisfies

        (dtheta2/dy) * omega_tilde
            = omega(theta(at)) * conj(dtheta1/dx) + 2i * dtheta2/dxbar

    Second: the additive term drops out of the second fiber derivative,

        d2 omega_tilde / dy2
            = d2 omega/dy2 (theta(at)) * (dtheta2/dy) * conj(dtheta1/dx)
    """
    d, th1, th2 = _composed_diff(F, theta, at, order)
    om_t = _omega_from_diff(d)
    om = omega(F, (th1.value, th2.value), order)
    dth2_dy = th2.deriv(D_Y)
    dth2_dxbar = th2.deriv(D_XBAR)
    conj_dth1_dx = th1.deriv(D_X).conjugate()
    r1 = abs(dth2_dy * om_t.value - om.value * conj_dth1_dx
             - 2j * dth2_dxbar)
    r2 = abs(om_t.d_yy - om.d_yy * dth2_dy * conj_dth1_dx)
    return r1, r2


def pullback_identity_residual(F: CylinderMap, theta: FiberAffineChange,
                               at: Point, order: int = DEFAULT_ORDER) -> float:
    return pullback_residuals(F, theta, at, order)[0]


def second_deriv_invariance_residual(F: CylinderMap, theta: FiberAffineChange,
                                     at: Point,
                                     order: int = DEFAULT_ORDER) -> float:
    return pullback_residuals(F, theta, at, order)[1]


def random_reparametrizations(count: int, seed: int = 42
                              ) -> tuple[FiberAffineChange, ...]:
    """Seeded reparametrization suite for identity sweeps.

    Base component is the identity; slope and shift are cubic polynomials
    with coefficients of modulus at most 0.3, the slope offset by 1 so it
    cannot vanish on the unit disk.  Built directly (the nonvanishing bound
    holds by construction) so large suites stay cheap.
    """
    rng = random.Random(seed)
    x = Var("x")

    def coeff() -> complex:
        return complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))

    def poly(constant: complex) -> Expr:
        e: Expr = const_expr(constant)
        for k in range(1, 4):
            e = add(e, mul(const_expr(coeff()), powi(x, k)))
        return e

    return tuple(
        FiberAffineChange(x, poly(1 + 0j), poly(0j)) for _ in range(count))


# admissible disk/slope pairs -----------------------------------------------

def admissibility_residuals(F: CylinderMap, disk_fn: Expr | str,
                            slope_fn: Expr | str, x: complex,
                            order: int = DEFAULT_ORDER) -> tuple[float, float]:
    """Residuals of the two compatibility conditions at base point x.

    disk_fn parametrizes a transverse disk as a graph over the base;
    slope_fn is the fiber derivative of the associated reparametrization
    along that disk.  The first condition makes the disk compatible with the
    defect, the second makes the trivialization compatible with its fiber
    derivative.
    """
    beta = parse(disk_fn) if isinstance(disk_fn, str) else disk_fn
    sigma = parse(slope_fn) if isinstance(slope_fn, str) else slope_fn
    for name, e in (("disk function", beta), ("slope function", sigma)):
        if expr_uses(e, "y"):
            raise ValidationFailed(f"{name} must depend on x only",
                                   invariant="base-function-shape")
    bj = eval_jet(beta, (x, 0j), order=1)
    sj = eval_jet(sigma, (x, 0j), order=1)
    om = omega(F, (x, bj.value), order)
    r_disk = abs(-2j * bj.deriv(D_XBAR) - om.value)
    r_slope = abs(om.d_y * sj.value + 2j * sj.deriv(D_XBAR))
    return r_disk, r_slope


# change of cylinder --------------------------------------------------------

def a_change_residual(F: CylinderMap, F_second: CylinderMap,
                      z: tuple[complex, complex],
                      order: int = DEFAULT_ORDER) -> float:
    """Residual of the one-form change law between a map and a second map
    built along the horizontal disk at height c:

        A_second(Z) = A(Z) - A(pi(z))(d pi Z)

    with pi the projection along leaves onto that disk, which for vertical
    leaves sends z to (z1, c) with differential Z -> (Z1, 0).
    """
    c = F_second.provenance.offset
    if c is None:
        raise ValidationFailed(
            "second map must record the disk height it was built along",
            invariant="second-map-provenance")
    e1 = (1 + 0j, 0j)
    lhs = ambient_forms(F_second, z, order).a_on(e1)
    base = ambient_forms(F, z, order).a_on(e1)
    pulled = ambient_forms(F, (z[0], c), order).a_on(e1)
    return abs(lhs - (base - pulled))


def connection_coefficient(F: CylinderMap, z: tuple[complex, complex],
                           order: int = DEFAULT_ORDER) -> complex:
    """Connection coefficient against conj(dz1) in the vertical frame.

    Combines (i/2) times the one-form value on the first ambient direction
    with the antiholomorphic logarithmic derivative of the frame scale
    h = 1 / (fiber derivative of the second component at the preimage).
    Restricted to maps whose first component is the base coordinate itself,
    which covers every built-in model and their second cylinders.
    """
    if F.f1 != Var("x"):
        raise ValidationFailed(
            "connection coefficient needs the first component to be the "
            "base coordinate", invariant="base-preserving-map")
    p = invert_local(F, z)
    d = differential(F, p, order)
    om = _omega_from_diff(d)
    pp, qp = _inverse_blocks(d)
    u0 = d.j2.deriv(D_Y)
    u_xbar = d.j2.deriv(_D_XBAR_Y)
    u_y = d.j2.deriv(_D_YY)
    dbar_log_h = -(u_xbar + u_y * qp[1][0]) / u0
    eps1 = pp[0][0].conjugate()
    return 0.5j * (-om.d_y * eps1) + dbar_log_h


def gamma_from_chart(m: FoliationModel, x: complex,
                     order: int = DEFAULT_ORDER) -> complex:
    """Obstruction coefficient on the zero section, computed through the
    identity chart instead of the extraction pipeline.

    The inverse map's fiber formula w*f/(f - w) is differentiated three
    times by jets; the result must agree with gamma_cyl at (x, 0).
    """
    if not isinstance(m, GraphModel):
        raise ValidationFailed(
            "chart formula applies to graph-family models",
            invariant="graph-model-required")
    if order < 3:
        raise ValueError("chart formula needs jets of order >= 3")
    y = Var("y")
    beta2 = div(mul(y, m.f), sub(m.f, y))
    j = eval_jet(beta2, (x, 0j), order)
    dy = j.deriv(D_Y)
    d3 = j.deriv((0, 1, 2, 0))
    return -2j * d3 / dy


# certification -------------------------------------------------------------

@dataclass(frozen=True)
class PointSample:
    """Per-point record of the certified quantities."""

    x: complex
    y: complex
    omega: complex
    omega_d_y: complex
    gamma: complex
    tangency_res: float
    consistency_res: float
    leaf_dbar_res: float
    map_dbar_res: float
    first_deriv_scale: float


@dataclass(frozen=True)
class TensorReport:
    """Aggregate of a certification run over one evaluation grid."""

    model_kind: str
    grid: tuple[int, int]
    jet_order: int
    samples: tuple[PointSample, ...]
    excluded: tuple[tuple[tuple[complex, complex], str], ...]
    base_max_omega: float
    base_max_omega_dy: float
    max_gamma: float
    max_tangency: float
    max_consistency: float
    max_leaf_dbar: float
    max_map_dbar: float
    scale: float
    threshold: float
    verdict: str


def _certify_point(F: CylinderMap, at: Point, jet_order: int):
    reason = excluded_reason(F, at)
    if reason is not None:
        return ("excluded", at, reason)
    try:
        d = differential(F, at, jet_order)
        om = _omega_from_diff(d)
    except FoliaError as exc:
        return ("excluded", at, type(exc).__name__)
    scale = max(abs(v) for v in (*d.d_x, *d.d_xbar, *d.d_y))
    sample = PointSample(
        x=at[0], y=at[1], omega=om.value, omega_d_y=om.d_y, gamma=om.d_yy,
        tangency_res=om.tangency_residual,
        consistency_res=om.consistency_residual,
        leaf_dbar_res=abs(om.d_ybar),
        map_dbar_res=max(abs(d.d_xbar[0]), abs(d.d_xbar[1])),
        first_deriv_scale=scale)
    return ("sample", at, sample)


def certify(m: FoliationModel, n_base: int = 21, m_fiber: int = 21,
            jet_order: int = DEFAULT_ORDER, threads: int = 1) -> TensorReport:
    """Evaluate the obstruction over a grid and issue a verdict.

    hyperbolic-evidence: the obstruction is decisively nonzero somewhere on
    the grid (above a scale-aware threshold), so no holomorphic cylinder
    exists through the sampled region.  cylinder-exhibited: the obstruction
    vanishes to tolerance and the map itself is holomorphic across the base,
    so the map in hand is the witness.  Anything else: inconclusive.
    """
    if not 3 <= jet_order <= MAX_ORDER:
        raise ValueError(f"jet order must be in 3..{MAX_ORDER}")
    F = cylinder_map(m)
    grid = eval_grid(F.domain, n_base, m_fiber)

    def work(at: Point):
        return _certify_point(F, at, jet_order)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, grid))
    else:
        results = [work(at) for at in grid]

    samples: list[PointSample] = []
    excluded: list[tuple[tuple[complex, complex], str]] = []
    for kind, at, payload in results:
        if kind == "sample":
            samples.append(payload)
        else:
            excluded.append(((at[0], at[1]), payload))

    base_omega = 0.0
    base_omega_dy = 0.0
    for x in vogel_points(n_base, F.domain.base_radius):
        at = (x, 0j)
        if excluded_reason(F, at) is not None:
            excluded.append(((x, 0j), "base-line-excluded"))
            continue
        try:
            om = _omega_from_diff(differential(F, at, jet_order))
        except FoliaError as exc:
            excluded.append(((x, 0j), type(exc).__name__))
            continue
        base_omega = max(base_omega, abs(om.value))
        base_omega_dy = max(base_omega_dy, abs(om.d_y))

    def field_max(getter) -> float:
        return max((getter(s) for s in samples), default=0.0)

    max_gamma = field_max(lambda s: abs(s.gamma))
    max_map_dbar = field_max(lambda s: s.map_dbar_res)
    scale = max(1.0, field_max(lambda s: s.first_deriv_scale))
    threshold = CERT_THRESHOLD_FACTOR * scale
    if max_gamma > threshold:
        verdict = "hyperbolic-evidence"
    elif max_gamma < VANISH_TOL and max_map_dbar < 1e-8:
        verdict = "cylinder-exhibited"
    else:
        verdict = "inconclusive"

    return TensorReport(
        model_kind=F.provenance.kind, grid=(n_base, m_fiber),
        jet_order=jet_order, samples=tuple(samples), excluded=tuple(excluded),
        base_max_omega=base_omega, base_max_omega_dy=base_omega_dy,
        max_gamma=max_gamma,
        max_tangency=field_max(lambda s: s.tangency_res),
        max_consistency=field_max(lambda s: s.consistency_res),
        max_leaf_dbar=field_max(lambda s: s.leaf_dbar_res),
        max_map_dbar=max_map_dbar,
        scale=scale, threshold=threshold, verdict=verdict)
