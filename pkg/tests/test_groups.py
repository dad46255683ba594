"""Group catalogue: identity, group law, generators, jet prolongation."""

import math

import numpy as np
import pytest

from heatsym import groups
from heatsym.errors import SingularTransformError, UnsupportedFormError
from heatsym.groups import Jet, Tc, Td, Te, Tk, Tke, Tkp, Tt, Tx, apply, generator, prolong2

from conftest import full_catalogue, sample_points


def assert_points_close(p, q, rel=1e-10, abs_=1e-12):
    for a, b in zip(p, q):
        assert a == pytest.approx(b, rel=rel, abs=abs_)


# ---------------------------------------------------------------------------
# finite transformations


def test_apply_closed_form_examples():
    assert_points_close(apply(Td(), math.log(2.0), (1.0, 1.0, 5.0)), (4.0, 2.0, 5.0), rel=1e-14)
    g = Tkp(1.0, 0.0)
    assert_points_close(
        apply(g, 1.0, (1.0, 1.0, 1.0)), (math.e**3, math.e**2, math.e), rel=1e-14
    )
    assert_points_close(apply(Tt(), 0.7, (1.0, 2.0, 3.0)), (1.7, 2.0, 3.0), rel=1e-14)


@pytest.mark.parametrize("g", full_catalogue(), ids=lambda g: g.name)
def test_identity_at_eps_zero(g, rng):
    for pt in sample_points(rng, 10, g):
        assert apply(g, 0.0, pt) == pt


@pytest.mark.parametrize("g", full_catalogue(), ids=lambda g: g.name)
def test_group_law(g, rng):
    eps_values = (-1.0, -0.5, 0.1, 0.7)
    pts = sample_points(rng, 50, g)
    for e1 in eps_values:
        for e2 in eps_values:
            for pt in pts:
                two_step = apply(g, e2, apply(g, e1, pt))
                one_step = apply(g, e1 + e2, pt)
                assert_points_close(two_step, one_step, rel=1e-10, abs_=1e-10)


def test_tc_fixes_boundary_exactly():
    g = Tc()
    for eps in (-1.0, -0.3, 0.5, 2.0):
        for t, u in ((0.5, 1.0), (3.0, 0.2), (9.9, 7.5)):
            assert apply(g, eps, (t, 0.0, u)) == (t, 0.0, u)


def test_lincomb_scaling_with_offset_matches_closed_form():
    l1, l3 = 0.8, 0.4
    g = groups.linear_combination_group(l1, 0.0, l3)
    for eps in (-0.7, 0.3, 1.2):
        for t in (0.5, 2.0, 7.0):
            a = math.exp(2.0 * l3 * eps)
            expected = t * a + l1 / (2.0 * l3) * (a - 1.0)
            assert apply(g, eps, (t, 1.0, 1.0))[0] == pytest.approx(expected, rel=1e-14)


def test_lincomb_pure_time_translation_equals_tt(rng):
    g = groups.linear_combination_group(1.0, 0.0, 0.0)
    for pt in sample_points(rng, 20, g):
        for eps in (-0.5, 0.9):
            assert_points_close(apply(g, eps, pt), apply(Tt(), eps, pt), rel=1e-14)


def test_lincomb_power_combination_matches_closed_form():
    l1, l2, l3, k = 0.5, 0.2, 0.3, 1.0
    g = groups.linear_combination_group(l1, l2, l3, k=k)
    rate = l3 + k
    for eps in (-0.4, 0.6):
        t, x, u = 2.0, 1.5, 0.7
        ts, xs, us = apply(g, eps, (t, x, u))
        a = math.exp(rate * eps)
        assert xs == pytest.approx(x * a + l2 / rate * (a - 1.0), rel=1e-14)
        assert us == pytest.approx(u * math.exp(2.0 * eps), rel=1e-14)
        at = math.exp(2.0 * l3 * eps)
        assert ts == pytest.approx(t * at + l1 / (2.0 * l3) * (at - 1.0), rel=1e-14)


def test_lincomb_rejects_unsupported_patterns():
    with pytest.raises(UnsupportedFormError):
        groups.linear_combination_group(0.0, 0.0, 0.0)
    with pytest.raises(UnsupportedFormError):
        groups.linear_combination_group(0.1, 0.2, 0.3, l4=0.1, k=-4.0 / 3.0)
    with pytest.raises(UnsupportedFormError):
        groups.linear_combination_group(0.1, 0.0, 0.3, l4=0.1, k=1.0)


def test_conformal_lincomb_reduces_to_tc(rng):
    z = groups.linear_combination_group(0.0, 0.0, 0.0, l4=0.0, k=-4.0 / 3.0)
    g = Tc()
    for pt in sample_points(rng, 20, g):
        for eps in (-0.6, 0.4):
            assert_points_close(apply(z, eps, pt), apply(g, eps, pt), rel=1e-12)


# ---------------------------------------------------------------------------
# generators


def test_generator_closed_forms():
    t, x, u = 1.7, 2.3, 0.9
    assert generator(Td())(t, x, u) == (2.0 * t, x, 0.0)
    k = -1.5
    assert generator(Tk(k))(t, x, u) == (0.0, k * x, 2.0 * u)
    assert generator(Tc())(t, x, u) == (0.0, x * x, -3.0 * x * u)
    assert generator(Tt())(t, x, u) == (1.0, 0.0, 0.0)
    assert generator(Te())(t, x, u) == (0.0, x, 2.0)


@pytest.mark.parametrize("g", full_catalogue(), ids=lambda g: g.name)
def test_generator_matches_numerical_eps_derivative(g, rng):
    h = 1e-6
    for pt in sample_points(rng, 12, g):
        plus = apply(g, h, pt)
        minus = apply(g, -h, pt)
        numeric = tuple((a - b) / (2.0 * h) for a, b in zip(plus, minus))
        exact = generator(g)(*pt)
        for n, e in zip(numeric, exact):
            assert n == pytest.approx(e, rel=1e-6, abs=1e-6)


# ---------------------------------------------------------------------------
# prolongation


def poly_surface():
    def phi(t, x):
        return 2.0 + 0.3 * t * t + 0.5 * t * x + 0.1 * x * x

    def jet_of(t, x):
        return Jet(t, x, phi(t, x), 0.6 * t + 0.5 * x, 0.5 * t + 0.2 * x, 0.2)

    return phi, jet_of


def gauss_surface():
    def phi(t, x):
        return 2.0 + (1.0 + 0.1 * t) * math.exp(-0.5 * (x - 1.0) ** 2)

    def jet_of(t, x):
        e = math.exp(-0.5 * (x - 1.0) ** 2)
        a = 1.0 + 0.1 * t
        return Jet(
            t,
            x,
            phi(t, x),
            0.1 * e,
            -a * (x - 1.0) * e,
            a * ((x - 1.0) ** 2 - 1.0) * e,
        )

    return phi, jet_of


def fd_jet_of_transformed_surface(g, eps, phi, t_star, x_star):
    """Numerically differentiate the pointwise-transformed surface.

    The transformed surface is u*(t*, x*) = U(x, phi(t, x)) with
    t = T^-1(t*), x = X^-1(x*).  First derivatives use a central difference
    at h = 1e-5; the second x*-derivative uses a 5-point stencil at 1e-4.
    """
    t_inv = g.tmap(eps).inverse()
    x_inv = g.xmap(eps).inverse()
    umap = g.umap(eps)

    def star(ts, xs):
        t = t_inv.value(ts)
        x = x_inv.value(xs)
        return umap.value(x, phi(t, x))

    h = 1e-5
    u = star(t_star, x_star)
    u_t = (star(t_star + h, x_star) - star(t_star - h, x_star)) / (2.0 * h)
    u_x = (star(t_star, x_star + h) - star(t_star, x_star - h)) / (2.0 * h)
    h2 = 1e-4
    vals = [star(t_star, x_star + j * h2) for j in (-2, -1, 0, 1, 2)]
    u_xx = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12.0 * h2 * h2)
    return Jet(t_star, x_star, u, u_t, u_x, u_xx)


@pytest.mark.parametrize("g", full_catalogue(), ids=lambda g: g.name)
@pytest.mark.parametrize("surface", [poly_surface, gauss_surface], ids=["poly", "gauss"])
def test_prolong2_matches_finite_difference_oracle(g, surface):
    phi, jet_of = surface()
    for eps in (0.3, -0.4):
        for t, x in ((1.5, 0.7), (2.5, 0.35)):
            if not g.point_ok(eps, x):
                continue
            starred = prolong2(g, eps, jet_of(t, x))
            oracle = fd_jet_of_transformed_surface(g, eps, phi, starred.t, starred.x)
            assert starred.u == pytest.approx(oracle.u, rel=1e-9)
            assert starred.u_t == pytest.approx(oracle.u_t, rel=1e-6, abs=1e-8)
            assert starred.u_x == pytest.approx(oracle.u_x, rel=1e-6, abs=1e-8)
            assert starred.u_xx == pytest.approx(oracle.u_xx, rel=1e-6, abs=1e-6)


def test_prolong2_identity_at_eps_zero():
    jet = Jet(1.0, 2.0, 3.0, 0.5, -0.7, 0.2)
    for g in full_catalogue():
        assert prolong2(g, 0.0, jet) == jet


def test_prolong2_power_flux_factor():
    # scaling invariance of the flux expression u**k u_x for k = -2
    k = -2.0
    g = Tk(k)
    jet = Jet(1.0, 0.0, 2.0, 0.0, 3.0, 0.0)
    starred = prolong2(g, 1.0, jet)
    assert starred.u ** k * starred.u_x == pytest.approx(2.0**-2 * 3.0, rel=1e-12)
    # for general k the factor is exp((k+2) eps)
    for k in (1.0, -1.5):
        starred = prolong2(Tk(k), 0.7, jet)
        factor = math.exp((k + 2.0) * 0.7)
        assert starred.u ** k * starred.u_x == pytest.approx(
            factor * 2.0**k * 3.0, rel=1e-12
        )


def test_prolong2_rejects_degenerate_map():
    bad = groups.GroupFamily(
        "bad",
        tmap=lambda eps: groups.ComponentMap((groups.Affine(1.0, 0.0),)),
        xmap=lambda eps: groups.ComponentMap((groups.Affine(0.0, 1.0),)),
        umap=lambda eps: groups.ULinear(1.0),
        gen=lambda t, x, u: (0.0, 0.0, 0.0),
    )
    with pytest.raises(SingularTransformError):
        prolong2(bad, 0.5, Jet(1.0, 1.0, 1.0, 0.0, 0.0, 0.0))


# ---------------------------------------------------------------------------
# CLI tokens


def test_parse_group_tokens():
    assert groups.parse_group("Td").name == "Td"
    assert groups.parse_group("Tk(-2)").params == {"k": -2.0}
    assert groups.parse_group("Tkp(1,0)").params == {"k": 1.0, "p": 0.0}
    assert groups.parse_group("Tke(-1.5)").params == {"k": -1.5}
    g = groups.parse_group("lincomb(1,0,0.5)")
    assert g.params["l3"] == 0.5
    g = groups.parse_group("lincomb(1,0,0.5,1)")
    assert g.params["k"] == 1.0
    g = groups.parse_group("lincomb(0.3,0,0.2,0.15,-1.3333333333333333)")
    assert g.params["l4"] == 0.15
    with pytest.raises(UnsupportedFormError):
        groups.parse_group("Tq(3)")
    with pytest.raises(UnsupportedFormError):
        groups.parse_group("Tk(a)")
