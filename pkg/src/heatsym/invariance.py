"""Executable invariance checks and the classification harness.

A problem (d, q, u_inf) is invariant under a one-parameter group when three
criteria hold simultaneously:

  equation   the residual u_t - d'(u) u_x^2 - d(u) u_xx vanishes on
             transformed jets whenever it vanishes on the original ones
             (checked on randomly sampled on-manifold jets);
  flux       the boundary curve x = 0 maps to itself, and on the manifold
             {x = 0, d(u) u_x = q(t)} the transformed flux expression
             d(u*) u*_x* - q(t*) vanishes;
  infinity   x* -> +inf as x -> +inf and the far-field value u_inf is
             preserved (both decided symbolically on the closed form maps).

Checks are sampling-based with explicit seeds: identical inputs produce
identical reports, and a negative verdict always carries a concrete witness.
Classification runs the checks over the candidate groups matched to the
problem's arbitrary elements and returns the admitted set; membership in the
known catalogue is decided, maximality is not proven.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bvp import BVPSpec, EquivalenceTransform
from .errors import DomainError, SingularTransformError, UnsupportedFormError
from .groups import (
    Affine,
    ComponentMap,
    GroupFamily,
    Jet,
    Tc,
    Td,
    Te,
    Tk,
    Tke,
    Tkp,
    Tt,
    Tx,
    ULinear,
    prolong2,
)
from .symfun import Const, Exp, FuncForm, Power, RandomSmooth, _fmt, is_zero_form

__all__ = [
    "DEFAULT_EPS_GRID",
    "CheckConfig",
    "Witness",
    "InvarianceReport",
    "sample_manifold_jets",
    "check_equation_invariance",
    "check_flux_invariance",
    "check_infinity_invariance",
    "check_bvp_invariance",
    "candidate_groups",
    "classify",
    "classify_detailed",
    "match_table2_row",
    "conjugate",
]

DEFAULT_EPS_GRID = (-1.0, -0.5, -0.1, 0.1, 0.5, 1.0)

# sampling boxes for jets and boundary data
_T_RANGE = (0.1, 10.0)
_X_RANGE = (0.0, 10.0)
_U_RANGE = (0.2, 10.0)
_DERIV_RANGE = (-5.0, 5.0)

# transformed states feeding a power-law diffusivity stay above this margin
# so closed-form rounding noise cannot masquerade as a residual
_U_STAR_MARGIN = 0.05
_T_STAR_MARGIN = 1e-3


@dataclass(frozen=True)
class CheckConfig:
    n: int = 200
    seed: int = 0
    eps_grid: tuple[float, ...] = DEFAULT_EPS_GRID
    tol: float = 1e-9


@dataclass(frozen=True)
class Witness:
    """Concrete failure evidence: which criterion, at which parameter, where."""

    criterion: str
    eps: Optional[float] = None
    jet: Optional[Jet] = None
    value: Optional[float] = None
    detail: str = ""


@dataclass
class InvarianceReport:
    verdict: str  # invariant | not_invariant | undecided
    max_residual: float
    witness: Optional[Witness]
    checks_run: dict[str, int] = field(default_factory=dict)
    parts: dict[str, "InvarianceReport"] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}", f"max_residual: {self.max_residual!r}"]
        for key in sorted(self.checks_run):
            lines.append(f"checks.{key}: {self.checks_run[key]}")
        if self.witness is None:
            lines.append("witness: none")
        else:
            w = self.witness
            lines.append(f"witness.criterion: {w.criterion}")
            if w.eps is not None:
                lines.append(f"witness.eps: {w.eps!r}")
            if w.value is not None:
                lines.append(f"witness.value: {w.value!r}")
            if w.jet is not None:
                j = w.jet
                lines.append(
                    "witness.jet: "
                    f"t={j.t!r} x={j.x!r} u={j.u!r} u_t={j.u_t!r} "
                    f"u_x={j.u_x!r} u_xx={j.u_xx!r}"
                )
            if w.detail:
                lines.append(f"witness.detail: {w.detail}")
        return "\n".join(lines)


def _merge_counts(*reports: InvarianceReport) -> dict[str, int]:
    out: dict[str, int] = {}
    for r in reports:
        for k, v in r.checks_run.items():
            out[k] = out.get(k, 0) + v
    return out


# ---------------------------------------------------------------------------
# sampling


def _d_domain_ok(d: FuncForm, u: float) -> bool:
    if isinstance(d, Power):
        return u >= _U_STAR_MARGIN
    return math.isfinite(u)


def _q_domain_ok(q: FuncForm, t: float) -> bool:
    if isinstance(q, Power) and not float(q.a).is_integer():
        return t >= _T_STAR_MARGIN
    if isinstance(q, Power) and q.a < 0:
        return abs(t) >= _T_STAR_MARGIN
    return math.isfinite(t)


def sample_manifold_jets(spec: BVPSpec, n: int, seed: int) -> list[Jet]:
    """n random jets lying on the equation manifold of the given problem:
    u_t is set to d'(u) u_x^2 + d(u) u_xx."""
    rng = np.random.default_rng(seed)
    dp = spec.d.derivative()
    jets = []
    for _ in range(n):
        t = rng.uniform(*_T_RANGE)
        x = rng.uniform(*_X_RANGE)
        u = rng.uniform(*_U_RANGE)
        u_x = rng.uniform(*_DERIV_RANGE)
        u_xx = rng.uniform(*_DERIV_RANGE)
        u_t = dp.value(u) * u_x**2 + spec.d.value(u) * u_xx
        jets.append(Jet(t, x, u, u_t, u_x, u_xx))
    return jets


def _sample_equation_jets(spec, g, eps_grid, n, seed):
    """On-manifold jets that stay inside the group's validity region for
    every parameter in the grid (pole margins, transformed-state domain)."""
    rng = np.random.default_rng(seed)
    dp = spec.d.derivative()
    jets: list[Jet] = []
    attempts = 0
    cap = 500 * n
    while len(jets) < n and attempts < cap:
        attempts += 1
        t = rng.uniform(*_T_RANGE)
        x = rng.uniform(*_X_RANGE)
        u = rng.uniform(*_U_RANGE)
        if not all(g.point_ok(e, x) for e in eps_grid):
            continue
        try:
            if not all(_d_domain_ok(spec.d, g.umap(e).value(x, u)) for e in eps_grid):
                continue
        except DomainError:
            continue
        u_x = rng.uniform(*_DERIV_RANGE)
        u_xx = rng.uniform(*_DERIV_RANGE)
        u_t = dp.value(u) * u_x**2 + spec.d.value(u) * u_xx
        jets.append(Jet(t, x, u, u_t, u_x, u_xx))
    return jets


# ---------------------------------------------------------------------------
# the three criteria


def check_equation_invariance(
    spec: BVPSpec,
    g: GroupFamily,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    n: int = 200,
    seed: int = 0,
    tol: float = 1e-9,
) -> InvarianceReport:
    """Transformed on-manifold jets must still satisfy the equation."""
    jets = _sample_equation_jets(spec, g, eps_grid, n, seed)
    if len(jets) < n:
        return InvarianceReport(
            "undecided",
            math.nan,
            Witness("equation", detail="could not sample enough valid jets"),
            {"equation": 0},
        )
    dp = spec.d.derivative()
    max_res = 0.0
    witness = None
    count = 0
    for jet in jets:
        for eps in eps_grid:
            count += 1
            try:
                s = prolong2(g, eps, jet)
                res = abs(s.u_t - dp.value(s.u) * s.u_x**2 - spec.d.value(s.u) * s.u_xx)
            except (DomainError, SingularTransformError) as exc:
                return InvarianceReport(
                    "undecided",
                    math.nan,
                    Witness("equation", eps=eps, jet=jet, detail=str(exc)),
                    {"equation": count},
                )
            if res > max_res:
                max_res = res
                if res > tol:
                    witness = Witness(
                        "equation",
                        eps=eps,
                        jet=jet,
                        value=res,
                        detail="transformed jet leaves the equation manifold",
                    )
    verdict = "invariant" if max_res <= tol else "not_invariant"
    return InvarianceReport(verdict, max_res, witness, {"equation": count})


def check_flux_invariance(
    spec: BVPSpec,
    g: GroupFamily,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    n: int = 200,
    seed: int = 0,
    tol: float = 1e-9,
) -> InvarianceReport:
    """Boundary-curve invariance plus invariance of the flux condition on
    the manifold {x = 0, d(u) u_x = q(t)}."""
    rng = np.random.default_rng(seed)
    max_res = 0.0
    witness = None

    # (i) the boundary curve x = 0 must map to itself
    boundary_count = 0
    for _ in range(n):
        t = rng.uniform(*_T_RANGE)
        u = rng.uniform(*_U_RANGE)
        for eps in eps_grid:
            boundary_count += 1
            x_star = g.xmap(eps).value(0.0)
            res = abs(x_star)
            if res > max_res:
                max_res = res
                if res > tol and witness is None:
                    witness = Witness(
                        "boundary_curve",
                        eps=eps,
                        jet=Jet(t, 0.0, u, 0.0, 0.0, 0.0),
                        value=x_star,
                        detail="boundary curve x = 0 is not preserved",
                    )

    # (ii) flux expression on the boundary manifold
    flux_count = 0
    sampled = 0
    attempts = 0
    cap = 500 * n
    while sampled < n and attempts < cap:
        attempts += 1
        t = rng.uniform(*_T_RANGE)
        u = rng.uniform(*_U_RANGE)
        try:
            ok = _q_domain_ok(spec.q, t) and all(
                _q_domain_ok(spec.q, g.tmap(eps).value(t))
                and _d_domain_ok(spec.d, g.umap(eps).value(0.0, u))
                for eps in eps_grid
            )
        except DomainError:
            ok = False
        if not ok:
            continue
        sampled += 1
        u_x = spec.q.value(t) / spec.d.value(u)
        jet = Jet(t, 0.0, u, 0.0, u_x, 0.0)
        for eps in eps_grid:
            flux_count += 1
            try:
                s = prolong2(g, eps, jet)
                res = abs(spec.d.value(s.u) * s.u_x - spec.q.value(s.t))
            except (DomainError, SingularTransformError) as exc:
                return InvarianceReport(
                    "undecided",
                    math.nan,
                    Witness("flux", eps=eps, jet=jet, detail=str(exc)),
                    {"boundary_curve": boundary_count, "flux": flux_count},
                )
            if res > max_res:
                max_res = res
                if res > tol:
                    witness = Witness(
                        "flux",
                        eps=eps,
                        jet=jet,
                        value=res,
                        detail="flux condition not preserved on the boundary manifold",
                    )
    if sampled < n:
        return InvarianceReport(
            "undecided",
            math.nan,
            Witness("flux", detail="could not sample enough boundary states"),
            {"boundary_curve": boundary_count, "flux": flux_count},
        )
    verdict = "invariant" if max_res <= tol else "not_invariant"
    return InvarianceReport(
        verdict, max_res, witness, {"boundary_curve": boundary_count, "flux": flux_count}
    )


def check_infinity_invariance(
    spec: BVPSpec,
    g: GroupFamily,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
) -> InvarianceReport:
    """Symbolic check of the far-field condition: x* -> +inf and u* -> u_inf.

    Decided on the closed-form maps: scalings of u preserve the condition
    only for u_inf = 0, additive shifts only when the shift vanishes, and a
    finite limit of the x-map is an immediate failure.
    """
    count = 0
    u_inf = spec.u_inf
    tol = 1e-12 * max(1.0, abs(u_inf))
    for eps in eps_grid:
        count += 1
        try:
            x_lim = g.xmap(eps).limit_pos_inf()
        except (UnsupportedFormError, DomainError) as exc:
            return InvarianceReport(
                "undecided",
                math.nan,
                Witness("infinity", eps=eps, detail=str(exc)),
                {"infinity": count},
            )
        if x_lim != math.inf:
            return InvarianceReport(
                "not_invariant",
                math.inf,
                Witness(
                    "infinity",
                    eps=eps,
                    value=x_lim,
                    detail=f"x-limit is {x_lim!r}, not +inf",
                ),
                {"infinity": count},
            )
        umap = g.umap(eps)
        if umap.m is None:
            u_lim = umap.a * u_inf + umap.b
        elif u_inf == 0.0:
            u_lim = umap.b
        else:
            try:
                m_lim = umap.m.limit_pos_inf()
            except (UnsupportedFormError, DomainError) as exc:
                return InvarianceReport(
                    "undecided",
                    math.nan,
                    Witness("infinity", eps=eps, detail=str(exc)),
                    {"infinity": count},
                )
            u_lim = umap.a * m_lim * u_inf + umap.b
        if not abs(u_lim - u_inf) <= tol:
            return InvarianceReport(
                "not_invariant",
                abs(u_lim - u_inf),
                Witness(
                    "infinity",
                    eps=eps,
                    value=u_lim,
                    detail=f"far-field value maps to {u_lim!r}, not {u_inf!r}",
                ),
                {"infinity": count},
            )
    return InvarianceReport("invariant", 0.0, None, {"infinity": count})


def check_bvp_invariance(
    spec: BVPSpec, g: GroupFamily, cfg: CheckConfig | None = None
) -> InvarianceReport:
    """Conjunction of the equation, flux, and infinity criteria."""
    cfg = cfg or CheckConfig()
    parts = {
        "equation": check_equation_invariance(
            spec, g, cfg.eps_grid, cfg.n, cfg.seed, cfg.tol
        ),
        "flux": check_flux_invariance(spec, g, cfg.eps_grid, cfg.n, cfg.seed, cfg.tol),
        "infinity": check_infinity_invariance(spec, g, cfg.eps_grid),
    }
    residuals = [r.max_residual for r in parts.values() if not math.isnan(r.max_residual)]
    max_res = max(residuals) if residuals else math.nan
    if any(r.verdict == "not_invariant" for r in parts.values()):
        verdict = "not_invariant"
        witness = next(
            r.witness for r in parts.values() if r.verdict == "not_invariant"
        )
    elif any(r.verdict == "undecided" for r in parts.values()):
        verdict = "undecided"
        witness = next(r.witness for r in parts.values() if r.verdict == "undecided")
    else:
        verdict = "invariant"
        witness = None
    return InvarianceReport(
        verdict, max_res, witness, _merge_counts(*parts.values()), parts
    )


# ---------------------------------------------------------------------------
# classification


def _q_power_exponent(q: FuncForm) -> Optional[float]:
    """Exponent p for flux forms of the shape q0 * t**p (const means p = 0)."""
    if is_zero_form(q):
        return None
    if isinstance(q, Const):
        return 0.0
    if isinstance(q, Power):
        return float(q.a)
    return None


def candidate_groups(spec: BVPSpec) -> list[GroupFamily]:
    """Catalogue groups whose parameters match the problem's arbitrary
    elements; the classification harness checks exactly these."""
    cands = [Tt(), Td(), Tx()]
    if isinstance(spec.d, Power):
        k = float(spec.d.a)
        cands.append(Tk(k))
        if k != -2.0:
            p = _q_power_exponent(spec.q)
            if p is not None and p != -0.5:
                cands.append(Tkp(k, p))
            if isinstance(spec.q, Exp) and spec.q.c != 0.0 and spec.q.lam == 1.0:
                cands.append(Tke(k))
        if k == -4.0 / 3.0:
            cands.append(Tc())
    if isinstance(spec.d, Exp) and spec.d.lam == 1.0:
        cands.append(Te())
    return cands


@dataclass
class ClassifyResult:
    admitted: list[str]
    reports: dict[str, InvarianceReport]
    row: Optional[tuple[int, list[str]]]
    notes: list[str]


def classify(
    spec: BVPSpec,
    catalogue: Sequence[GroupFamily] | None = None,
    cfg: CheckConfig | None = None,
) -> list[str]:
    """Names of the catalogue groups the problem admits."""
    return classify_detailed(spec, catalogue, cfg).admitted


def classify_detailed(
    spec: BVPSpec,
    catalogue: Sequence[GroupFamily] | None = None,
    cfg: CheckConfig | None = None,
) -> ClassifyResult:
    cfg = cfg or CheckConfig()
    groups_to_try = list(catalogue) if catalogue is not None else candidate_groups(spec)
    admitted: list[str] = []
    reports: dict[str, InvarianceReport] = {}
    notes: list[str] = []
    for g in groups_to_try:
        rep = check_bvp_invariance(spec, g, cfg)
        reports[g.name] = rep
        if rep.verdict == "invariant":
            admitted.append(g.name)
        elif rep.verdict == "undecided":
            notes.append(f"{g.name}: undecided ({rep.witness.detail if rep.witness else ''})")
        elif g.name == "Tc":
            crit = rep.witness.criterion if rep.witness else "?"
            notes.append(f"Tc rejected ({crit} check fails)")
    row = match_table2_row(spec)
    if row is not None and sorted(row[1]) != sorted(admitted):
        notes.append(
            f"admitted set {admitted} differs from the catalogue row {row[0]} "
            f"listing {row[1]} (overlapping special case)"
        )
    return ClassifyResult(admitted, reports, row, notes)


def match_table2_row(spec: BVPSpec) -> Optional[tuple[int, list[str]]]:
    """Most specific classification-table row matching the arbitrary
    elements, as (case number, expected admitted group names)."""
    q = spec.q
    p = _q_power_exponent(q)
    q_zero = is_zero_form(q)
    q_const = p == 0.0
    q_half = p == -0.5
    q_exp = isinstance(q, Exp) and q.c != 0.0 and q.lam == 1.0

    if isinstance(spec.d, Power) and spec.u_inf == 0.0:
        k = float(spec.d.a)
        if k == -2.0:
            if q_half:
                return 9, ["Td", f"Tk({_fmt(k)})"]
            return 8, [f"Tk({_fmt(k)})"]
        if q_zero:
            return 7, ["Tt", "Td", f"Tk({_fmt(k)})"]
        if q_const:
            return 6, ["Tt", f"Tkp({_fmt(k)},0)"]
        if q_exp:
            return 5, [f"Tke({_fmt(k)})"]
        if p is not None and not q_half:
            return 4, [f"Tkp({_fmt(k)},{_fmt(p)})"]
    if q_half:
        return 1, ["Td"]
    if q_const:
        return 2, ["Tt"]
    if q_zero:
        return 3, ["Tt", "Td"]
    return None


# ---------------------------------------------------------------------------
# conjugation by equivalence transforms


def conjugate(g: GroupFamily, e: EquivalenceTransform) -> GroupFamily:
    """The group expressed in the transformed variables: e o g o e^-1.

    Component maps stay closed-form; shapes that would acquire an
    x-dependent additive u-term (factor maps combined with a u-shift) are
    rejected.
    """
    if e.is_identity():
        return g

    t_pre = Affine(1.0 / e.e1, -e.t0 / e.e1)
    t_post = Affine(e.e1, e.t0)
    x_pre = Affine(1.0 / e.e2, 0.0)
    x_post = Affine(e.e2, 0.0)

    def tmap(eps: float) -> ComponentMap:
        return ComponentMap((t_pre, *g.tmap(eps).stages, t_post))

    def xmap(eps: float) -> ComponentMap:
        return ComponentMap((x_pre, *g.xmap(eps).stages, x_post))

    def umap(eps: float) -> ULinear:
        base = g.umap(eps)
        if base.m is None:
            return ULinear(base.a, e.e3 * base.b + e.u0 * (1.0 - base.a))
        if e.u0 != 0.0:
            raise UnsupportedFormError(
                "conjugating an x-dependent u-factor with a u-shift leaves "
                "the supported map shape"
            )
        return ULinear(base.a, e.e3 * base.b, ComponentMap((x_pre, *base.m.stages)))

    def gen(t: float, x: float, u: float):
        xi0, xi1, eta = g.gen(
            (t - e.t0) / e.e1, x / e.e2, (u - e.u0) / e.e3
        )
        return e.e1 * xi0, e.e2 * xi1, e.e3 * eta

    guard = None
    if g.x_guard is not None:
        guard = lambda eps, x: g.x_guard(eps, x / e.e2)

    return GroupFamily(
        g.name,
        tmap=tmap,
        xmap=xmap,
        umap=umap,
        gen=gen,
        params=dict(g.params),
        x_guard=guard,
    )
