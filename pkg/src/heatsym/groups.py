"""One-parameter point transformation groups acting on (t, x, u) with
second-order jet prolongation.

Every group in the catalogue has the separated shape

    t* = T(t; eps),   x* = X(x; eps),   u* = U(x, u; eps),

with T and X built from catalogue function forms (affine maps, the Moebius
map x/(1 - c*x)), and U linear in u:  u* = a(eps) * m(x; eps) * u + b(eps).
That shape covers scalings, translations, the conformal-type map that fixes
x = 0, and every finite group obtained by exponentiating linear combinations
of those generators.  Anything else is rejected rather than approximated.

Finite transformations are primary; infinitesimal generators are carried
alongside (as the eps-derivative at eps = 0) and are cross-checked
numerically by the test suite.  All objects are immutable and all operations
pure, so unrestricted concurrent use is safe.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import SingularTransformError, UnsupportedFormError
from .symfun import Affine, FuncForm, Mobius, Power, _fmt

__all__ = [
    "ComponentMap",
    "ULinear",
    "Jet",
    "VectorField",
    "GroupFamily",
    "apply",
    "prolong2",
    "generator",
    "linear_combination_group",
    "Td",
    "Tt",
    "Tx",
    "Tk",
    "Tkp",
    "Tke",
    "Te",
    "Tc",
    "parse_group",
    "IDENTITY_MAP",
]

# Sampling guard for Moebius-type maps: keep this far from the pole so that
# prolongation factors stay well conditioned in verification suites.
POLE_MARGIN = 0.25


@dataclass(frozen=True)
class ComponentMap:
    """Composition of catalogue forms applied left to right."""

    stages: tuple[FuncForm, ...]

    def value(self, s: float) -> float:
        for f in self.stages:
            s = f.value(s)
        return s

    def with_derivs(self, s: float) -> tuple[float, float, float]:
        """(value, first, second) derivative of the composition at s."""
        v, dv, ddv = s, 1.0, 0.0
        for f in self.stages:
            f1 = f.d1(v)
            f2 = f.d2(v)
            ddv = f2 * dv * dv + f1 * ddv
            dv = f1 * dv
            v = f.value(v)
        return v, dv, ddv

    def d1(self, s: float) -> float:
        return self.with_derivs(s)[1]

    def d2(self, s: float) -> float:
        return self.with_derivs(s)[2]

    def inverse(self) -> "ComponentMap":
        inv = []
        for f in reversed(self.stages):
            if isinstance(f, Affine):
                if f.a == 0.0:
                    raise SingularTransformError("affine stage not invertible")
                inv.append(Affine(1.0 / f.a, -f.b / f.a))
            elif isinstance(f, Mobius):
                inv.append(Mobius(-f.e))
            else:
                raise UnsupportedFormError(f"cannot invert stage {f!r}")
        return ComponentMap(tuple(inv))

    def limit_pos_inf(self) -> float:
        """Limit of the composition as s -> +inf, propagated stage by stage."""
        val = math.inf
        for f in self.stages:
            if val == math.inf:
                val = f.limit_pos_inf()
            elif val == -math.inf:
                val = f.limit_neg_inf()
            else:
                val = f.value(val)
        return val


IDENTITY_MAP = ComponentMap((Affine(1.0, 0.0),))


@dataclass(frozen=True)
class ULinear:
    """u* = a * m(x) * u + b with an optional x-dependent factor m."""

    a: float
    b: float = 0.0
    m: Optional[ComponentMap] = None

    def value(self, x: float, u: float) -> float:
        fac = self.m.value(x) if self.m is not None else 1.0
        return self.a * fac * u + self.b

    def partials(self, x: float, u: float):
        """(U, U_x, U_u, U_xx, U_xu, U_uu) at the point (x, u)."""
        if self.m is None:
            return self.a * u + self.b, 0.0, self.a, 0.0, 0.0, 0.0
        mv, m1, m2 = self.m.with_derivs(x)
        return (
            self.a * mv * u + self.b,
            self.a * m1 * u,
            self.a * mv,
            self.a * m2 * u,
            self.a * m1,
            0.0,
        )


@dataclass(frozen=True)
class Jet:
    """Second-order jet point; on-manifold jets additionally satisfy
    u_t = d'(u) u_x**2 + d(u) u_xx."""

    t: float
    x: float
    u: float
    u_t: float
    u_x: float
    u_xx: float


@dataclass(frozen=True)
class VectorField:
    """Infinitesimal generator xi0 d/dt + xi1 d/dx + eta d/du, evaluated
    pointwise via a single callable (t, x, u) -> (xi0, xi1, eta)."""

    components: Callable[[float, float, float], tuple[float, float, float]]

    def __call__(self, t: float, x: float, u: float):
        return self.components(t, x, u)


@dataclass(frozen=True)
class GroupFamily:
    """A one-parameter group given by closed-form component maps.

    tmap/xmap/umap build the finite transformation for a given parameter
    value; gen is the analytic generator.  x_guard, when present, marks the
    x-region where the map is safely away from poles for a given parameter
    (used by sampling-based verification, not a mathematical restriction).
    """

    name: str
    tmap: Callable[[float], ComponentMap]
    xmap: Callable[[float], ComponentMap]
    umap: Callable[[float], ULinear]
    gen: Callable[[float, float, float], tuple[float, float, float]]
    params: dict = field(default_factory=dict)
    x_guard: Optional[Callable[[float, float], bool]] = None

    def apply(self, eps: float, point: tuple[float, float, float]):
        t, x, u = point
        return (
            self.tmap(eps).value(t),
            self.xmap(eps).value(x),
            self.umap(eps).value(x, u),
        )

    def point_ok(self, eps: float, x: float) -> bool:
        return self.x_guard is None or self.x_guard(eps, x)

    def __repr__(self):  # keep reports compact
        return f"GroupFamily({self.name})"


# ---------------------------------------------------------------------------
# core operations


def apply(g: GroupFamily, eps: float, point: tuple[float, float, float]):
    """Transformed point (t*, x*, u*)."""
    return g.apply(eps, point)


def prolong2(g: GroupFamily, eps: float, jet: Jet) -> Jet:
    """Second-order prolongation of the transformation acting on a jet.

    For t* = T(t), x* = X(x), u* = U(x, u) the chain rule gives

        u*_x*  = (U_x + U_u u_x) / X'
        u*_t*  = U_u u_t / T'
        u*_x*x* = ((U_xx + 2 U_xu u_x + U_uu u_x^2 + U_u u_xx) X'
                   - (U_x + U_u u_x) X'') / X'^3
    """
    tv, tp, _ = g.tmap(eps).with_derivs(jet.t)
    xv, xp, xpp = g.xmap(eps).with_derivs(jet.x)
    if tp == 0.0:
        raise SingularTransformError(f"{g.name}: dT/dt = 0 at t = {jet.t}")
    if xp == 0.0:
        raise SingularTransformError(f"{g.name}: dX/dx = 0 at x = {jet.x}")
    uv, ux_, uu, uxx_, uxu, uuu = g.umap(eps).partials(jet.x, jet.u)
    du_dx = ux_ + uu * jet.u_x
    star_ux = du_dx / xp
    star_ut = uu * jet.u_t / tp
    star_uxx = (
        (uxx_ + 2.0 * uxu * jet.u_x + uuu * jet.u_x**2 + uu * jet.u_xx) * xp
        - du_dx * xpp
    ) / xp**3
    return Jet(tv, xv, uv, star_ut, star_ux, star_uxx)


def generator(g: GroupFamily) -> VectorField:
    """Infinitesimal generator of the family (eps-derivative at eps = 0)."""
    return VectorField(g.gen)


# ---------------------------------------------------------------------------
# map builders


def _scaling(rate: float) -> Callable[[float], ComponentMap]:
    return lambda eps: ComponentMap((Affine(math.exp(rate * eps), 0.0),))


def _translation(rate: float) -> Callable[[float], ComponentMap]:
    return lambda eps: ComponentMap((Affine(1.0, rate * eps),))


def _identity_map(eps: float) -> ComponentMap:
    return IDENTITY_MAP


def _scale_with_offset(rate: float, shift_coef: float) -> Callable[[float], ComponentMap]:
    """s* = s e^(rate eps) + shift_coef (e^(rate eps) - 1); identity at eps=0."""

    def build(eps: float) -> ComponentMap:
        a = math.exp(rate * eps)
        return ComponentMap((Affine(a, shift_coef * (a - 1.0)),))

    return build


def _u_identity(eps: float) -> ULinear:
    return ULinear(1.0)


def _u_scaling(rate: float) -> Callable[[float], ULinear]:
    return lambda eps: ULinear(math.exp(rate * eps))


def _u_shift(rate: float) -> Callable[[float], ULinear]:
    return lambda eps: ULinear(1.0, rate * eps)


def _mobius_guard(ez_of_eps: Callable[[float], float]) -> Callable[[float, float], bool]:
    def guard(eps: float, x: float) -> bool:
        return 1.0 - ez_of_eps(eps) * x >= POLE_MARGIN

    return guard


# ---------------------------------------------------------------------------
# catalogue


def Td() -> GroupFamily:
    """Scaling t -> t e^(2 eps), x -> x e^(eps), u fixed."""
    return GroupFamily(
        "Td",
        tmap=_scaling(2.0),
        xmap=_scaling(1.0),
        umap=_u_identity,
        gen=lambda t, x, u: (2.0 * t, x, 0.0),
    )


def Tt() -> GroupFamily:
    """Time translation t -> t + eps."""
    return GroupFamily(
        "Tt",
        tmap=_translation(1.0),
        xmap=_identity_map,
        umap=_u_identity,
        gen=lambda t, x, u: (1.0, 0.0, 0.0),
    )


def Tx() -> GroupFamily:
    """Space translation x -> x + eps (moves the boundary curve x = 0)."""
    return GroupFamily(
        "Tx",
        tmap=_identity_map,
        xmap=_translation(1.0),
        umap=_u_identity,
        gen=lambda t, x, u: (0.0, 1.0, 0.0),
    )


def Tk(k: float) -> GroupFamily:
    """Power-law scaling x -> x e^(k eps), u -> u e^(2 eps)."""
    return GroupFamily(
        f"Tk({_fmt(k)})",
        tmap=_identity_map,
        xmap=_scaling(k),
        umap=_u_scaling(2.0),
        gen=lambda t, x, u: (0.0, k * x, 2.0 * u),
        params={"k": k},
    )


def Tkp(k: float, p: float) -> GroupFamily:
    """Joint scaling with exponents k+2, k(p+1)+1 and 2p+1 on (t, x, u)."""
    return GroupFamily(
        f"Tkp({_fmt(k)},{_fmt(p)})",
        tmap=_scaling(k + 2.0),
        xmap=_scaling(k * (p + 1.0) + 1.0),
        umap=_u_scaling(2.0 * p + 1.0),
        gen=lambda t, x, u: ((k + 2.0) * t, (k * (p + 1.0) + 1.0) * x, (2.0 * p + 1.0) * u),
        params={"k": k, "p": p},
    )


def Tke(k: float) -> GroupFamily:
    """Time shift by (k+2) eps combined with x -> x e^(k eps), u -> u e^(2 eps)."""
    return GroupFamily(
        f"Tke({_fmt(k)})",
        tmap=_translation(k + 2.0),
        xmap=_scaling(k),
        umap=_u_scaling(2.0),
        gen=lambda t, x, u: (k + 2.0, k * x, 2.0 * u),
        params={"k": k},
    )


def Te() -> GroupFamily:
    """x -> x e^(eps) with the additive shift u -> u + 2 eps."""
    return GroupFamily(
        "Te",
        tmap=_identity_map,
        xmap=_scaling(1.0),
        umap=_u_shift(2.0),
        gen=lambda t, x, u: (0.0, x, 2.0),
    )


def Tc() -> GroupFamily:
    """Conformal-type map x -> x/(1 - eps x), u -> (1 - eps x)^3 u.

    Fixes x = 0 pointwise; has a pole at x = 1/eps, so sampling suites stay
    inside 1 - eps x >= POLE_MARGIN.
    """

    def umap(eps: float) -> ULinear:
        m = ComponentMap((Affine(-eps, 1.0), Power(1.0, 3.0)))
        return ULinear(1.0, 0.0, m)

    return GroupFamily(
        "Tc",
        tmap=_identity_map,
        xmap=lambda eps: ComponentMap((Mobius(eps),)),
        umap=umap,
        gen=lambda t, x, u: (0.0, x * x, -3.0 * x * u),
        x_guard=_mobius_guard(lambda eps: eps),
    )


# ---------------------------------------------------------------------------
# exponentiated linear combinations


def _time_combo(l1: float, l3: float) -> Callable[[float], ComponentMap]:
    """Finite t-map of the generator (l1 + 2 l3 t) d/dt."""
    if l3 != 0.0:
        return _scale_with_offset(2.0 * l3, l1 / (2.0 * l3))
    return _translation(l1)


def linear_combination_group(
    l1: float,
    l2: float,
    l3: float,
    l4: float | None = None,
    k: float | None = None,
) -> GroupFamily:
    """Finite one-parameter group of a linear combination of basic generators.

    Three patterns are supported, selected by which arguments are present:

    * (l1, l2, l3) only:   (l1 + 2 l3 t) d/dt + (l2 + l3 x) d/dx
    * with k:              (l1 + 2 l3 t) d/dt + (l2 + (l3 + k) x) d/dx + 2u d/du
    * with l4 (and k fixed at -4/3):
                           (l1 + 2 l3 t) d/dt + ((l3 - 4/3 l4) x + x^2) d/dx
                           + (2 l4 - 3 x) u d/du,  requires l2 = 0

    Each case exponentiates to closed-form affine or Moebius component maps.
    """
    if l4 is not None:
        return _z_combination(l1, l2, l3, l4, k)
    if k is not None:
        return _y_combination(l1, l2, l3, k)
    return _x_combination(l1, l2, l3)


def _x_combination(l1: float, l2: float, l3: float) -> GroupFamily:
    if l1 == 0.0 and l2 == 0.0 and l3 == 0.0:
        raise UnsupportedFormError("all coefficients zero: no group")
    name = f"lincomb({_fmt(l1)},{_fmt(l2)},{_fmt(l3)})"
    if l3 == 0.0:
        xmap = _translation(l2)
    else:
        xmap = _scale_with_offset(l3, l2 / l3)
    return GroupFamily(
        name,
        tmap=_time_combo(l1, l3),
        xmap=xmap,
        umap=_u_identity,
        gen=lambda t, x, u: (l1 + 2.0 * l3 * t, l2 + l3 * x, 0.0),
        params={"l1": l1, "l2": l2, "l3": l3},
    )


def _y_combination(l1: float, l2: float, l3: float, k: float) -> GroupFamily:
    name = f"lincomb({_fmt(l1)},{_fmt(l2)},{_fmt(l3)},k={_fmt(k)})"
    rx = l3 + k
    if rx != 0.0:
        xmap = _scale_with_offset(rx, l2 / rx)
    elif l2 != 0.0:
        xmap = _translation(l2)
    else:
        xmap = _identity_map
    return GroupFamily(
        name,
        tmap=_time_combo(l1, l3),
        xmap=xmap,
        umap=_u_scaling(2.0),
        gen=lambda t, x, u: (l1 + 2.0 * l3 * t, l2 + rx * x, 2.0 * u),
        params={"l1": l1, "l2": l2, "l3": l3, "k": k},
    )


def _z_combination(l1: float, l2: float, l3: float, l4: float, k: float | None) -> GroupFamily:
    if l2 != 0.0:
        raise UnsupportedFormError(
            "conformal combination requires l2 = 0 (boundary curve invariance)"
        )
    if k is not None and k != -4.0 / 3.0:
        raise UnsupportedFormError("conformal combination exists only for k = -4/3")
    mu = l3 - 4.0 / 3.0 * l4
    name = f"lincomb({_fmt(l1)},0,{_fmt(l3)},l4={_fmt(l4)})"

    def ez(eps: float) -> float:
        if mu == 0.0:
            return eps
        return math.expm1(mu * eps) / mu

    def xmap(eps: float) -> ComponentMap:
        if mu == 0.0:
            return ComponentMap((Mobius(eps),))
        return ComponentMap((Mobius(ez(eps)), Affine(math.exp(mu * eps), 0.0)))

    def umap(eps: float) -> ULinear:
        m = ComponentMap((Affine(-ez(eps), 1.0), Power(1.0, 3.0)))
        return ULinear(math.exp(2.0 * l4 * eps), 0.0, m)

    return GroupFamily(
        name,
        tmap=_time_combo(l1, l3),
        xmap=xmap,
        umap=umap,
        gen=lambda t, x, u: (l1 + 2.0 * l3 * t, mu * x + x * x, (2.0 * l4 - 3.0 * x) * u),
        params={"l1": l1, "l2": 0.0, "l3": l3, "l4": l4, "k": -4.0 / 3.0},
        x_guard=_mobius_guard(ez),
    )


# ---------------------------------------------------------------------------
# CLI group tokens


def parse_group(token: str) -> GroupFamily:
    """Build a catalogue group from its CLI token.

    Accepted: Td, Tt, Tx, Te, Tc, Tk(k), Tkp(k,p), Tke(k),
    lincomb(l1,l2,l3), lincomb(l1,l2,l3,k), lincomb(l1,l2,l3,l4,k).
    """
    token = token.strip()
    bare = {"Td": Td, "Tt": Tt, "Tx": Tx, "Te": Te, "Tc": Tc}
    if token in bare:
        return bare[token]()
    m = re.match(r"^(\w+)\(([^)]*)\)$", token)
    if not m:
        raise UnsupportedFormError(f"unknown group token {token!r}")
    name, argstr = m.group(1), m.group(2)
    try:
        args = [float(a) for a in argstr.split(",") if a.strip() != ""]
    except ValueError as exc:
        raise UnsupportedFormError(f"bad group arguments in {token!r}") from exc
    if name == "Tk" and len(args) == 1:
        return Tk(args[0])
    if name == "Tkp" and len(args) == 2:
        return Tkp(args[0], args[1])
    if name == "Tke" and len(args) == 1:
        return Tke(args[0])
    if name == "lincomb":
        if len(args) == 3:
            return linear_combination_group(*args)
        if len(args) == 4:
            return linear_combination_group(args[0], args[1], args[2], k=args[3])
        if len(args) == 5:
            return linear_combination_group(args[0], args[1], args[2], l4=args[3], k=args[4])
    raise UnsupportedFormError(f"unknown group token {token!r}")
