import math

import numpy as np
import pytest
from scipy.integrate import quad

from hadamard_ineq import geometry as geo
from hadamard_ineq import variational as var
from hadamard_ineq import weighted as wgt
from hadamard_ineq.errors import InvalidExponent, OutOfDomain


# ---------------------------------------------------------------------------
# spectral gap
# ---------------------------------------------------------------------------

def test_poincare_hyperbolic_exact(hyperbolic_weight):
    # closed-form Dirichlet eigenvalue on the truncated domain: 1 + (pi/R)^2,
    # eigenfunction sin(pi r / R)/sinh r
    res = var.poincare_eigen(hyperbolic_weight, 20.0)
    assert res.lambda1 == pytest.approx(1.0 + (math.pi / 20.0) ** 2, rel=1e-4)
    assert 0.95 <= res.best_constant <= 1.001


def test_poincare_euclidean_linear_growth(euclidean_weight):
    # flat oracle: lambda1 = (pi/R)^2, constant R/pi
    for R in (10.0, 20.0):
        res = var.poincare_eigen(euclidean_weight, R)
        assert res.best_constant == pytest.approx(R / math.pi, rel=1e-3)


def test_poincare_h2_limit():
    m = geo.build_model(geo.Hyperbolic(4.0), 2, 20.0)
    w = wgt.build_weight(m)
    res = var.poincare_eigen(w, 15.0)
    # spectral gap k(N-1)^2/4 = 1: constant tends to 1 from below
    assert 0.9 <= res.best_constant <= 1.0 + 1e-6


def test_poincare_domain_monotonicity(hyperbolic_weight):
    consts = [var.poincare_eigen(hyperbolic_weight, R).best_constant
              for R in (5.0, 10.0, 15.0, 20.0)]
    assert all(b >= a for a, b in zip(consts, consts[1:]))


def test_poincare_eigenfunction_shape(hyperbolic_weight):
    res = var.poincare_eigen(hyperbolic_weight, 20.0)
    r = res.r
    g = res.eigenfunction
    assert np.max(g) == pytest.approx(1.0)
    assert g[-1] == 0.0
    interior = (r > 1.0) & (r < 19.0)
    oracle = np.sin(math.pi * r[interior] / 20.0) / np.sinh(r[interior])
    oracle = oracle / np.max(np.abs(oracle)) * np.max(np.abs(g[interior]))
    assert np.max(np.abs(g[interior] - oracle)) < 5e-3


def test_poincare_out_of_domain(hyperbolic_weight):
    with pytest.raises(OutOfDomain):
        var.poincare_eigen(hyperbolic_weight, 25.0)


# ---------------------------------------------------------------------------
# Rayleigh quotient
# ---------------------------------------------------------------------------

def test_rayleigh_flat_sobolev(euclidean_weight):
    # oracle: quotient of the algebraic bump (1 + r^2)^(-1/2) by quadrature
    res = var.rayleigh_minimize(euclidean_weight, 6.0, 50.0)
    Ig = quad(lambda r: r ** 4 * (1 + r * r) ** -3, 0, np.inf)[0]
    Ip = quad(lambda r: r * r * (1 + r * r) ** -3, 0, np.inf)[0]
    oracle = math.sqrt(Ig) / Ip ** (1.0 / 6.0)
    assert res.ratio == pytest.approx(oracle, rel=0.10)
    rep = wgt.supremum_B(euclidean_weight, 6.0)
    assert res.ratio >= 1.0 / rep.sandwich_upper
    assert res.ratio <= 1.1 / rep.B


def test_rayleigh_poincare_cross_oracle(hyperbolic_weight):
    res = var.rayleigh_minimize(hyperbolic_weight, 2.0, 20.0)
    eig = var.poincare_eigen(hyperbolic_weight, 20.0)
    assert res.ratio == pytest.approx(math.sqrt(eig.lambda1), rel=1e-5)


def test_rayleigh_scale_invariance(euclidean_weight):
    res = var.rayleigh_minimize(euclidean_weight, 6.0, 50.0)
    base = var.DiscreteFunction(res.r[:-1], res.minimizer[:-1])
    scaled = var.DiscreteFunction(res.r[:-1], 7.5 * res.minimizer[:-1])
    r1 = var.rayleigh_minimize(euclidean_weight, 6.0, 50.0, init=base)
    r2 = var.rayleigh_minimize(euclidean_weight, 6.0, 50.0, init=scaled)
    assert r1.ratio == pytest.approx(r2.ratio, rel=1e-12, abs=1e-12)


def test_rayleigh_exponent_validation(euclidean_weight):
    with pytest.raises(InvalidExponent):
        var.rayleigh_minimize(euclidean_weight, 1.5, 20.0)


def test_consistency_triangle_p2():
    # 1/ratio from the eigensolve lies inside the supremum sandwich
    cases = [
        (geo.Hyperbolic(1.0), 3, 20.0),
        (geo.Hyperbolic(2.0), 3, 15.0),
        (geo.Hyperbolic(4.0), 2, 20.0),
    ]
    for prof, N, R in cases:
        model = geo.build_model(prof, N, R)
        weight = wgt.build_weight(model)
        rep = wgt.supremum_B(weight, 2.0)
        assert not rep.divergent
        res = var.poincare_eigen(weight, R)
        assert rep.B <= res.best_constant <= rep.sandwich_upper * (1 + 1e-9)


# ---------------------------------------------------------------------------
# domain-growth scans
# ---------------------------------------------------------------------------

def test_failure_scan_below_threshold(quasi_weight):
    scan = var.quasi_euclidean_failure_scan(quasi_weight, 3.0, [10.0, 100.0, 1000.0])
    ratios = [x for _, x in scan]
    assert ratios[0] > ratios[1] > ratios[2]
    assert ratios[2] / ratios[0] < 0.5


def test_failure_scan_above_threshold(quasi_weight):
    scan = var.quasi_euclidean_failure_scan(quasi_weight, 4.0, [100.0, 1000.0])
    assert abs(scan[1][1] / scan[0][1] - 1.0) < 0.05


def test_failure_scan_critical(quasi_weight):
    rep = wgt.supremum_B(quasi_weight, 6.0)
    scan = var.quasi_euclidean_failure_scan(quasi_weight, 6.0, [10.0, 100.0, 1000.0])
    assert all(x >= 1.0 / rep.sandwich_upper for _, x in scan)


# ---------------------------------------------------------------------------
# nonradial failure certificate
# ---------------------------------------------------------------------------

def test_sinh_moment_closed_form():
    # int_0^1 sinh^2 = (sinh 1 cosh 1 - 1)/2
    exact = (math.sinh(1.0) * math.cosh(1.0) - 1.0) / 2.0
    assert var.sinh_moment(3) == pytest.approx(exact, rel=1e-10)
    assert exact == pytest.approx(0.40672, abs=1e-5)


def test_unit_sphere_area():
    assert var.unit_sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)
    assert var.unit_sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-14)


def test_certificate_growth_subcritical():
    model = geo.build_model(geo.PowerLaw(1.0, 1.0, 1.0), 3, 2000.0)
    reports = var.certificate_scan(model, 2.0, [50.0, 100.0, 200.0, 400.0])
    vals = [c.lower_bound_on_C for c in reports]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert all(c.conclusion == "grows" for c in reports)


def test_certificate_constant_at_critical():
    model = geo.build_model(geo.PowerLaw(1.0, 1.0, 1.0), 3, 2000.0)
    reports = var.certificate_scan(model, 6.0, [50.0, 100.0, 200.0, 400.0])
    vals = [c.lower_bound_on_C for c in reports]
    assert max(vals) / min(vals) - 1.0 < 1e-6
    assert all(c.conclusion == "bounded" for c in reports)


def test_certificate_exponent_validation():
    model = geo.build_model(geo.PowerLaw(1.0, 1.0, 1.0), 3, 2000.0)
    with pytest.raises(InvalidExponent):
        var.nonradial_certificate(model, 1.5, 50.0)
    with pytest.raises(InvalidExponent):
        var.nonradial_certificate(model, 6.5, 50.0)
