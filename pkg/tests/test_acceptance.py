"""Top-level acceptance sweep.

Each test re-derives one advertised guarantee end to end at its stated
tolerance and prints a single summary line, so a plain pytest run doubles
as a sign-off checklist.  Expected values come from closed forms computed
by hand for the fixture maps, never from the code under test.
"""

import cmath
import json
import math
import time

import pytest

from folia import (
    CylinderMap,
    Domain,
    LeafField,
    admissibility_residuals,
    a_change_residual,
    assert_y_holomorphic,
    certify,
    connection_coefficient,
    cylinder_map,
    eval_grid,
    eval_jet,
    excluded_reason,
    explicit_cylinder_model,
    fd_wirtinger,
    gamma_ambient,
    gamma_cyl,
    gamma_from_chart,
    graph_model,
    holomorphic_log_harmonicity,
    leaf_laplacian,
    negative_curvature_margin,
    omega,
    parse,
    product_model,
    pullback_residuals,
    random_reparametrizations,
    second_cylinder,
    vogel_points,
)
from folia.cli import main
from folia.errors import ExprSyntaxError
from folia.foliation import Provenance

TWO_PI = 2.0 * math.pi
D_XBAR = (0, 1, 0, 0)
AMBIENT_BASIS = ((1 + 0j, 0j), (0j, 1 + 0j))


def report_line(tag: str, ok: bool, detail: str) -> None:
    print(f"[acceptance {tag}] {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{tag}: {detail}"


def shared_ambient_points(F: CylinderMap) -> list:
    pts = [(x, y) for x in vogel_points(10, 0.7 * F.domain.base_radius)
           for y in vogel_points(5, 0.8)]
    return [F.value(at) for at in pts]


@pytest.fixture(scope="module")
def graph_pair():
    model = graph_model("conj(x)+2")
    return cylinder_map(model), second_cylinder(model, 1)


def test_defect_extraction_matches_closed_form_and_fd_oracle():
    F = cylinder_map(graph_model("conj(x)+2"))
    start = time.perf_counter()

    def closed_form(x, y):
        f = x.conjugate() + 2
        return 2j * y * y / (f * f)

    def second_component(px, py):
        return eval_jet(F.f2, (px, py), order=1).value

    worst_jet = worst_fd = 0.0
    for at in eval_grid(F.domain, 21, 21):
        if excluded_reason(F, at) is not None:
            continue
        ref = closed_form(*at)
        worst_jet = max(worst_jet, abs(omega(F, at).value - ref))
        d_xbar = fd_wirtinger(second_component, at, (0, 1, 0, 0), 1e-4)
        d_y = fd_wirtinger(second_component, at, (0, 0, 1, 0), 1e-4)
        worst_fd = max(worst_fd, abs(2j * d_xbar.value / d_y.value - ref))
    elapsed = time.perf_counter() - start

    ok = worst_jet < 1e-10 and worst_fd < 1e-6 and elapsed < 1.0
    report_line("01", ok,
                f"defect matches closed form on 21x21 grid "
                f"(jets {worst_jet:.2e}, divided differences {worst_fd:.2e}, "
                f"{elapsed:.2f}s)")


def test_defect_vanishes_to_first_order_on_base_line():
    fixtures = (
        ("graph", cylinder_map(graph_model("conj(x)+2"))),
        ("product", cylinder_map(product_model())),
        ("explicit", cylinder_map(explicit_cylinder_model(
            "x", "y+conj(x)*y^3", Domain(fiber_bound=0.5)))),
    )
    worst = 0.0
    for _, F in fixtures:
        for x in vogel_points(21, F.domain.base_radius):
            om = omega(F, (x, 0j))
            worst = max(worst, abs(om.value), abs(om.d_y))
    ok = worst < 1e-10
    report_line("02", ok,
                f"defect and fiber slope vanish on the base line of all "
                f"three fixtures (max {worst:.2e})")


def test_defect_is_holomorphic_along_every_leaf():
    models = (
        graph_model("conj(x)+2"),
        product_model(),
        explicit_cylinder_model("x", "y+conj(x)*y^3",
                                Domain(fiber_bound=0.5)),
    )
    worst = max(certify(m, 21, 21).max_leaf_dbar for m in models)
    ok = worst < 1e-10
    report_line("03", ok,
                f"conjugate-fiber derivative of the defect stays below "
                f"tolerance on all grids (max {worst:.2e})")


def test_obstruction_tensor_is_independent_of_the_cylinder(graph_pair):
    F, F_second = graph_pair
    start = time.perf_counter()
    worst = 0.0
    for z in shared_ambient_points(F):
        first = gamma_ambient(F, z)
        second = gamma_ambient(F_second, z)
        for Z in AMBIENT_BASIS:
            for Y in AMBIENT_BASIS:
                worst = max(worst, abs(first.gamma(Z, Y) - second.gamma(Z, Y)))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 2.0
    report_line("04", ok,
                f"ambient obstruction agrees across the cylinder pair at 50 "
                f"shared points (max {worst:.2e}, {elapsed:.2f}s)")


def test_chart_route_reproduces_jet_obstruction_on_base():
    model = graph_model("conj(x)+2")
    F = cylinder_map(model)
    worst = 0.0
    for x in vogel_points(20, F.domain.base_radius):
        worst = max(worst, abs(gamma_from_chart(model, x)
                               - gamma_cyl(F, (x, 0j))))
    at_zero_chart = gamma_from_chart(model, 0j)
    at_zero_jets = gamma_cyl(F, (0j, 0j))
    ok = (worst < 1e-8 and abs(at_zero_chart - 1j) < 1e-10
          and abs(at_zero_jets - 1j) < 1e-10)
    report_line("05", ok,
                f"chart formula matches jet extraction on 20 base points "
                f"(max {worst:.2e}; both give i at the origin)")


def test_defect_transforms_correctly_under_random_reparametrizations():
    F = cylinder_map(graph_model("conj(x)+2"))
    points = list(zip(vogel_points(5, 0.4), vogel_points(5, 0.5)))
    start = time.perf_counter()
    worst = 0.0
    for theta in random_reparametrizations(100, 42):
        for at in points:
            r1, r2 = pullback_residuals(F, theta, at)
            worst = max(worst, r1, r2)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and elapsed < 5.0
    report_line("06", ok,
                f"both transformation laws hold for 100 seeded affine "
                f"fiber changes at 5 points (max {worst:.2e}, "
                f"{elapsed:.2f}s)")


def test_admissible_and_inadmissible_disk_slope_pairs():
    model = graph_model("conj(x)+2")
    F = cylinder_map(model)
    F_second = second_cylinder(model, 1)
    beta = F_second.provenance.shift_fn
    sigma = F_second.provenance.slope_fn
    worst = 0.0
    for x in vogel_points(21, F.domain.base_radius):
        r_disk, r_slope = admissibility_residuals(F, beta, sigma, x)
        worst = max(worst, r_disk, r_slope)
    product = cylinder_map(product_model())
    r_disk_bad, _ = admissibility_residuals(product, "conj(x)", "1",
                                            0.3 + 0.1j)
    ok = worst < 1e-9 and abs(r_disk_bad - 2.0) < 1e-12
    report_line("07", ok,
                f"derived pair admissible (max {worst:.2e}); "
                f"antiholomorphic disk reports residual exactly "
                f"{r_disk_bad!r}")


def test_one_form_change_law_and_connection_independence(graph_pair):
    F, F_second = graph_pair
    worst_change = worst_conn = 0.0
    for z in shared_ambient_points(F):
        worst_change = max(worst_change, a_change_residual(F, F_second, z))
        worst_conn = max(worst_conn,
                         abs(connection_coefficient(F, z)
                             - connection_coefficient(F_second, z)))
    ok = worst_change < 1e-8 and worst_conn < 1e-8
    report_line("08", ok,
                f"one-form change law {worst_change:.2e} and connection "
                f"agreement {worst_conn:.2e} at 50 shared points")


def test_periodicity_identity_on_exponential_fixture():
    F = CylinderMap(parse("x"), parse("exp((1+conj(x)/2)*y)"),
                    Provenance("explicit"), Domain())
    gamma = parse(f"{TWO_PI!r}*i/(1+conj(x)/2)")
    worst = 0.0
    for x in vogel_points(5, 0.9):
        gj = eval_jet(gamma, (x, 0j), order=1)
        for y in vogel_points(5, 1.5):
            lhs = (omega(F, (x, y + gj.value)).value
                   - omega(F, (x, y)).value)
            rhs = -2j * gj.deriv(D_XBAR)
            worst = max(worst, abs(lhs - rhs))
    g0 = eval_jet(gamma, (0j, 0j), order=1)
    side_a = (omega(F, (0j, 0.5 + g0.value)).value
              - omega(F, (0j, 0.5 + 0j)).value)
    side_b = -2j * g0.deriv(D_XBAR)
    ok = (worst < 1e-10 and abs(side_a + TWO_PI) < 1e-10
          and abs(side_b + TWO_PI) < 1e-10)
    report_line("09", ok,
                f"defect shift equals the period derivative term on the "
                f"5x5 grid (max {worst:.2e}; both sides -2*pi at the "
                f"origin)")


def test_curvature_stencil_accuracy_and_margin():
    log_worst = holomorphic_log_harmonicity(
        LeafField.from_expr("y", zeros=(0j,)),
        [1 + 0j, 1j, 0.6 + 0.8j, cmath.exp(0.5j)])
    square = LeafField.from_expr("y*conj(y)")
    lap = leaf_laplacian(square, 0.4 + 0.3j)
    quartic = LeafField.from_expr("((y+conj(y))/2)^4")
    y0 = 0.5 + 0j
    exact = 12.0 * y0.real ** 2
    err_h = abs(leaf_laplacian(quartic, y0, 1e-2, richardson=False) - exact)
    err_half = abs(leaf_laplacian(quartic, y0, 5e-3, richardson=False)
                   - exact)
    ratio = err_h / err_half
    holds, margin = negative_curvature_margin(
        "-(y*conj(y))", "1", 0.5, [1 + 0j, 1j, 0.5 - 0.5j, -0.8 + 0.1j])
    ok = (log_worst < 1e-6 and abs(lap - 4.0) < 1e-6
          and abs(ratio - 4.0) < 1.0 and holds
          and abs(margin - 0.5) < 1e-6)
    report_line("10", ok,
                f"log-modulus harmonic ({log_worst:.2e}), squared modulus "
                f"gives {lap!r}, halving ratio {ratio:.3f}, margin "
                f"{margin!r}")


def test_certification_verdicts_and_reproducible_reports(tmp_path):
    def manifest(name, model):
        target = tmp_path / name
        target.write_text(json.dumps({
            "model": model,
            "output": {"directory": name.replace(".json", "")},
        }) + "\n")
        return str(target), target.parent / name.replace(".json", "")

    twisted, twisted_dir = manifest(
        "twisted.json", {"kind": "graph", "f": "conj(x)+2"})
    straight, straight_dir = manifest(
        "straight.json", {"kind": "graph", "f": "x/2+2"})
    product, product_dir = manifest("product.json", {"kind": "product"})

    codes = [main(["certify", twisted]), main(["certify", straight]),
             main(["certify", product])]
    verdicts = {}
    gammas = {}
    for key, out_dir in (("twisted", twisted_dir), ("straight", straight_dir),
                         ("product", product_dir)):
        data = json.loads((out_dir / "report.json").read_text())
        verdicts[key] = data["verdict"]
        gammas[key] = data["max_gamma"]

    assert main(["certify", twisted, "--threads", "1"]) == 0
    single = (twisted_dir / "report.json").read_bytes()
    assert main(["certify", twisted, "--threads", "8"]) == 0
    threaded = (twisted_dir / "report.json").read_bytes()

    ok = (codes == [0, 0, 0]
          and verdicts == {"twisted": "hyperbolic-evidence",
                           "straight": "cylinder-exhibited",
                           "product": "cylinder-exhibited"}
          and gammas["twisted"] > 1e-2
          and gammas["straight"] < 1e-10
          and gammas["product"] < 1e-10
          and single == threaded)
    report_line("11", ok,
                f"verdicts {verdicts['twisted']}/{verdicts['straight']}/"
                f"{verdicts['product']}, exit codes {codes}, reports "
                f"byte-identical across thread counts")


def test_expression_language_case_table():
    x0, y0 = 2 + 1j, 1 - 1j

    value_cases = [
        ("x+y*2", x0 + y0 * 2),
        ("(x+y)*2", (x0 + y0) * 2),
        ("x-y-1", x0 - y0 - 1),
        ("x/y/2", x0 / y0 / 2),
        ("-x^2", -(x0 ** 2)),
        ("2*x^3", 2 * x0 ** 3),
        ("conj(x)*i", x0.conjugate() * 1j),
        ("exp(log(y))", y0),
        ("x*-y", x0 * -y0),
        ("1/2*x", 0.5 * x0),
        ("x^0", 1 + 0j),
        ("x^-2", x0 ** -2),
        ("i*i", -1 + 0j),
        ("2+3*4^2", 50 + 0j),
    ]
    roundtrip_cases = [
        "x+y*2", "conj(x+y)", "-(x-1)", "x/(y+2)",
        "exp(x)^3", "2.5*i-x", "log(y+2)", "(x+i)^4",
    ]
    error_cases = ["x +", "(x", "x ^ y", "x^17", "frob(x)", "x $ y", ""]
    gate_cases = [
        ("x*y+exp(y)", False),
        ("conj(x)*y", False),
        ("x+conj(x)", False),
        ("conj(y)", True),
        ("conj(x*y)", True),
        ("log(conj(y)+2)", True),
    ]

    from folia import to_source

    passed = 0
    for src, expected in value_cases:
        got = eval_jet(parse(src), (x0, y0), order=1).value
        assert got == pytest.approx(expected, abs=1e-12), src
        passed += 1
    for src in roundtrip_cases:
        original = eval_jet(parse(src), (x0, y0), order=1).value
        rendered = to_source(parse(src))
        again = eval_jet(parse(rendered), (x0, y0), order=1).value
        assert again == pytest.approx(original, abs=1e-12), src
        passed += 1
    for src in error_cases:
        with pytest.raises(ExprSyntaxError) as excinfo:
            parse(src)
        assert excinfo.value.span is not None, src
        passed += 1
    for src, should_flag in gate_cases:
        span = assert_y_holomorphic(parse(src))
        assert (span is not None) == should_flag, src
        passed += 1

    ok = passed >= 30
    report_line("12", ok,
                f"expression language table: {passed} precedence, "
                f"round-trip, error-span, and conjugation-gate cases")
