"""Problem specifications and the equivalence group acting on them.

A problem instance is the triple (d, q, u_inf): diffusivity d(u) > 0 (not
constant), boundary flux q(t) at x = 0, and the far-field value u_inf.  The
admissible changes of variables that map the whole problem class to itself
form a five-parameter family

    t -> e1 t + t0,   x -> e2 x,   u -> e3 u + u0
    d -> (e2^2/e1) d,  q -> (e2 e3/e1) q,  u_inf -> e3 u_inf + u0

with e2 > 0 and e1 e3 != 0 (no x-shift: it would move the flux boundary).
The action on a time-dependent q includes the pullback of the time argument,
t -> (t - t0)/e1, so that mapped solutions of a mapped problem solve the
mapped problem; the transformed d and q must stay inside the closed function
catalogue, and transforms that would silently change a power-law diffusivity
u**k into c u**k are rejected instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .errors import ConstraintError, SpecFileError, UnsupportedFormError
from .symfun import (
    Affine,
    Const,
    Exp,
    FuncForm,
    Mobius,
    Power,
    RandomSmooth,
    Zero,
    format_form,
    is_zero_form,
    parse_form,
)

__all__ = [
    "BVPSpec",
    "EquivalenceTransform",
    "apply_equivalence",
    "normalize_q0",
    "map_solution",
    "q_amplitude",
    "load_spec_file",
    "parse_spec_text",
    "dump_spec",
]


@dataclass(frozen=True)
class BVPSpec:
    """One problem from the class: diffusivity, boundary flux, far-field value."""

    d: FuncForm
    q: FuncForm
    u_inf: float

    def __post_init__(self):
        if isinstance(self.d, (Const, Zero)):
            raise ConstraintError("diffusivity must not be constant")
        if isinstance(self.d, Power):
            if self.d.a == 0.0:
                raise ConstraintError("power-law diffusivity needs a nonzero exponent")
            if self.d.c <= 0.0:
                raise ConstraintError("power-law diffusivity needs a positive coefficient")


@dataclass(frozen=True)
class EquivalenceTransform:
    """Scales (e1, e2, e3) and shifts (t0, u0); e2 > 0, e1 e3 != 0."""

    e1: float
    e2: float
    e3: float
    t0: float = 0.0
    u0: float = 0.0

    def __post_init__(self):
        if self.e2 <= 0.0:
            raise ConstraintError("e2 must be > 0")
        if self.e1 == 0.0 or self.e3 == 0.0:
            raise ConstraintError("e1 and e3 must be nonzero")

    def point(self, t: float, x: float, u: float):
        return self.e1 * t + self.t0, self.e2 * x, self.e3 * u + self.u0

    def inverse(self) -> "EquivalenceTransform":
        return EquivalenceTransform(
            1.0 / self.e1,
            1.0 / self.e2,
            1.0 / self.e3,
            -self.t0 / self.e1,
            -self.u0 / self.e3,
        )

    def compose(self, first: "EquivalenceTransform") -> "EquivalenceTransform":
        """Transform equal to applying ``first`` and then this one."""
        return EquivalenceTransform(
            self.e1 * first.e1,
            self.e2 * first.e2,
            self.e3 * first.e3,
            self.e1 * first.t0 + self.t0,
            self.e3 * first.u0 + self.u0,
        )

    @staticmethod
    def identity() -> "EquivalenceTransform":
        return EquivalenceTransform(1.0, 1.0, 1.0, 0.0, 0.0)

    def is_identity(self) -> bool:
        return self == EquivalenceTransform.identity()


def _pullback(f: FuncForm, amp: float, scale: float, shift: float) -> FuncForm:
    """amp * f((s - shift)/scale) as a catalogue form, or raise."""
    if isinstance(f, Zero):
        return Zero()
    if isinstance(f, Const):
        return Const(amp * f.c)
    if isinstance(f, Power):
        if shift != 0.0:
            raise UnsupportedFormError("shift takes a power form out of the catalogue")
        if scale < 0.0 and not float(f.a).is_integer():
            raise UnsupportedFormError(
                "negative state scale with fractional power exponent leaves the catalogue"
            )
        return Power(amp * f.c * scale**-f.a, f.a)
    if isinstance(f, Exp):
        return Exp(amp * f.c * math.exp(-f.lam * shift / scale), f.lam / scale)
    if isinstance(f, Affine):
        return Affine(amp * f.a / scale, amp * (f.b - f.a * shift / scale))
    if isinstance(f, Mobius):
        if shift != 0.0 or not math.isclose(amp, scale, rel_tol=1e-12):
            raise UnsupportedFormError("transformed Moebius form leaves the catalogue")
        return Mobius(f.e / scale)
    if isinstance(f, RandomSmooth):
        # shape-rigid: only the identity action keeps the form; tolerate
        # rounding residue from composed scale factors
        if (
            not math.isclose(amp, 1.0, rel_tol=1e-12)
            or not math.isclose(scale, 1.0, rel_tol=1e-12)
            or shift != 0.0
        ):
            raise UnsupportedFormError(
                "randsmooth admits only shape-preserving transforms "
                "(unit amplitude, unit scale, zero shift)"
            )
        return f
    raise UnsupportedFormError(f"no pullback rule for {f!r}")


def apply_equivalence(spec: BVPSpec, g: EquivalenceTransform) -> BVPSpec:
    """Transformed problem (d~, q~, u_inf~).

    Power-law diffusivities must keep their coefficient: for d = c u**k this
    requires e2^2/e1 = e3^k, otherwise the transform is rejected so that a
    normalized problem never silently changes its arbitrary-element pattern.
    """
    amp_d = g.e2**2 / g.e1
    d_new = _pullback(spec.d, amp_d, g.e3, g.u0)
    if isinstance(spec.d, Power):
        if not math.isclose(d_new.c, spec.d.c, rel_tol=1e-12, abs_tol=0.0):
            raise ConstraintError(
                "transform breaks the power-law diffusivity: "
                f"needs e2^2/e1 = e3^k, got coefficient {d_new.c!r} vs {spec.d.c!r}"
            )
        d_new = spec.d
    q_new = _pullback(spec.q, g.e2 * g.e3 / g.e1, g.e1, g.t0)
    return BVPSpec(d_new, q_new, g.e3 * spec.u_inf + g.u0)


def q_amplitude(q: FuncForm) -> float:
    """Scalar amplitude of the flux form (its leading coefficient)."""
    if isinstance(q, Zero):
        return 0.0
    if isinstance(q, (Const,)):
        return float(q.c)
    if isinstance(q, (Power, Exp)):
        return float(q.c)
    raise UnsupportedFormError(f"flux form {format_form(q)} has no scalar amplitude")


def normalize_q0(spec: BVPSpec) -> tuple[BVPSpec, EquivalenceTransform]:
    """Equivalent problem whose flux amplitude is +-1, and the transform used.

    The transform preserves the diffusivity exactly (shape and coefficient)
    and the sign of the amplitude.  A zero flux has nothing to normalize and
    returns the identity.  For d = u**(-2) with q = q0 t**(-1/2) the
    amplitude is invariant under every admissible transform; that case is
    reported as a constraint error rather than silently left unnormalized.
    """
    ident = EquivalenceTransform.identity()
    if is_zero_form(spec.q):
        return spec, ident
    q0 = q_amplitude(spec.q)
    if q0 == 0.0:
        return spec, ident
    if abs(q0) == 1.0:
        return spec, ident

    a = abs(q0)
    if isinstance(spec.d, Power):
        k = spec.d.a
        if isinstance(spec.q, Const):
            g = EquivalenceTransform(a * a, a, 1.0)
        elif isinstance(spec.q, Power):
            p = spec.q.a
            if p != -0.5:
                e1 = a ** (1.0 / (p + 0.5))
                g = EquivalenceTransform(e1, math.sqrt(e1), 1.0)
            elif k != -2.0:
                e3 = a ** (-2.0 / (k + 2.0))
                g = EquivalenceTransform(1.0, e3 ** (k / 2.0), e3)
            else:
                raise ConstraintError(
                    "flux amplitude is an equivalence invariant for "
                    "d = u^-2 with q ~ t^-1/2"
                )
        elif isinstance(spec.q, Exp):
            if k == -2.0:
                raise ConstraintError(
                    "flux amplitude of an exponential q cannot be normalized for k = -2 "
                    "without rescaling time"
                )
            e3 = a ** (-2.0 / (k + 2.0))
            g = EquivalenceTransform(1.0, e3 ** (k / 2.0), e3)
        else:
            raise UnsupportedFormError("cannot normalize this flux form")
    else:
        # shape-preserving transforms only: e3 = 1 and e2^2 = e1
        if isinstance(spec.q, Const):
            g = EquivalenceTransform(a * a, a, 1.0)
        elif isinstance(spec.q, Power):
            p = spec.q.a
            if 2.0 * p + 1.0 == 0.0:
                raise ConstraintError(
                    "flux amplitude of q ~ t^-1/2 is invariant under "
                    "shape-preserving transforms"
                )
            e2 = a ** (1.0 / (2.0 * p + 1.0))
            g = EquivalenceTransform(e2 * e2, e2, 1.0)
        elif isinstance(spec.q, Exp):
            # amplitude moves to +-1 at the cost of rescaling the rate
            g = EquivalenceTransform(a * a, a, 1.0)
        else:
            raise UnsupportedFormError("cannot normalize this flux form")

    out = apply_equivalence(spec, g)
    amp = q_amplitude(out.q)
    if not math.isclose(abs(amp), 1.0, rel_tol=1e-9):
        raise ConstraintError(f"normalization failed, amplitude {amp!r}")
    # snap rounding residue so the normalized amplitude is exactly +-1
    q_snapped = _with_amplitude(out.q, math.copysign(1.0, amp))
    return BVPSpec(out.d, q_snapped, out.u_inf), g


def _with_amplitude(q: FuncForm, c: float) -> FuncForm:
    if isinstance(q, Const):
        return Const(c)
    if isinstance(q, Power):
        return Power(c, q.a)
    if isinstance(q, Exp):
        return Exp(c, q.lam)
    raise UnsupportedFormError(f"no amplitude slot in {q!r}")


def map_solution(
    g: EquivalenceTransform, surface: Callable[[float, float], float]
) -> Callable[[float, float], float]:
    """Pushforward of a solution surface: the mapped surface evaluated in the
    new variables, u~(t~, x~) = e3 u((t~ - t0)/e1, x~/e2) + u0."""

    def mapped(t: float, x: float) -> float:
        return g.e3 * surface((t - g.t0) / g.e1, x / g.e2) + g.u0

    return mapped


# ---------------------------------------------------------------------------
# spec files: "key = value" lines with catalogue-form syntax


def parse_spec_text(text: str, origin: str = "<string>") -> BVPSpec:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecFileError(f"{origin}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in fields:
            raise SpecFileError(f"{origin}:{lineno}: duplicate key {key!r}")
        fields[key] = value
    missing = {"d", "q", "u_inf"} - fields.keys()
    if missing:
        raise SpecFileError(f"{origin}: missing keys {sorted(missing)}")
    extra = fields.keys() - {"d", "q", "u_inf"}
    if extra:
        raise SpecFileError(f"{origin}: unknown keys {sorted(extra)}")
    try:
        d = parse_form(fields["d"])
        q = parse_form(fields["q"])
    except SpecFileError as exc:
        raise SpecFileError(f"{origin}: {exc}") from exc
    try:
        u_inf = float(fields["u_inf"])
    except ValueError as exc:
        raise SpecFileError(f"{origin}: bad u_inf literal {fields['u_inf']!r}") from exc
    try:
        return BVPSpec(d, q, u_inf)
    except ConstraintError as exc:
        raise SpecFileError(f"{origin}: {exc}") from exc


def load_spec_file(path: str | Path) -> BVPSpec:
    path = Path(path)
    return parse_spec_text(path.read_text(), origin=str(path))


def dump_spec(spec: BVPSpec) -> str:
    from .symfun import _fmt

    return (
        f"d = {format_form(spec.d)}\n"
        f"q = {format_form(spec.q)}\n"
        f"u_inf = {_fmt(spec.u_inf)}\n"
    )
