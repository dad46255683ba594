"""Closed catalogue of scalar function forms with exact evaluation and calculus.

The toolkit never manipulates free-form expressions.  Every scalar function it
needs (diffusivities d(u), boundary fluxes q(t), transformation components)
is one of a small set of closed forms:

    zero                  0
    const(c)              c
    power(c, a)           c * s**a
    exp(c, lam)           c * e**(lam*s)
    affine(a, b)          a*s + b
    mobius(e)             s / (1 - e*s)
    randsmooth(seed, fl)  fl + sum of 4 Gaussian bumps (deterministic in seed)

Each form evaluates exactly, differentiates analytically (first and second
order), and knows its limit at +infinity where that limit is well defined.
Values are immutable after construction; all operations are pure.

``randsmooth`` stands in for "an arbitrary smooth positive function": the
bump centers, widths and amplitudes are drawn reproducibly from the seed, and
the floor keeps the function strictly positive.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, SpecFileError, UnsupportedFormError

__all__ = [
    "FuncForm",
    "Zero",
    "Const",
    "Power",
    "Exp",
    "Affine",
    "Mobius",
    "RandomSmooth",
    "evaluate",
    "derivative",
    "limit_at_pos_infinity",
    "parse_form",
    "format_form",
]

# Fixed recipe for the randsmooth bump set.  Changing these would silently
# change every "arbitrary function" verification suite, so they are constants.
_N_BUMPS = 4
_CENTER_RANGE = (0.5, 8.0)
_WIDTH_RANGE = (0.3, 2.0)
_AMP_RANGE = (0.1, 1.0)
DEFAULT_FLOOR = 0.5


def _is_int(a: float) -> bool:
    return float(a).is_integer()


class FuncForm:
    """Base class for catalogue forms.  Subclasses are frozen dataclasses."""

    def value(self, s):
        raise NotImplementedError

    def d1(self, s):
        """First derivative evaluated pointwise."""
        raise NotImplementedError

    def d2(self, s):
        """Second derivative evaluated pointwise."""
        raise NotImplementedError

    def derivative(self) -> "FuncForm":
        raise NotImplementedError

    def limit_pos_inf(self) -> float:
        raise UnsupportedFormError(f"no symbolic limit for {self!r}")

    def limit_neg_inf(self) -> float:
        raise UnsupportedFormError(f"no symbolic limit at -inf for {self!r}")

    def text(self) -> str:
        raise NotImplementedError

    def __call__(self, s):
        return self.value(s)


@dataclass(frozen=True)
class Zero(FuncForm):
    def value(self, s):
        return np.zeros_like(s, dtype=float) if isinstance(s, np.ndarray) else 0.0

    d1 = value
    d2 = value

    def derivative(self):
        return Zero()

    def limit_pos_inf(self):
        return 0.0

    limit_neg_inf = limit_pos_inf

    def text(self):
        return "zero"


@dataclass(frozen=True)
class Const(FuncForm):
    c: float

    def value(self, s):
        if isinstance(s, np.ndarray):
            return np.full_like(s, self.c, dtype=float)
        return float(self.c)

    def d1(self, s):
        return Zero().value(s)

    d2 = d1

    def derivative(self):
        return Zero()

    def limit_pos_inf(self):
        return float(self.c)

    limit_neg_inf = limit_pos_inf

    def text(self):
        return f"const({_fmt(self.c)})"


@dataclass(frozen=True)
class Power(FuncForm):
    """c * s**a.  Fractional exponents require s > 0."""

    c: float
    a: float

    def _check(self, s):
        if _is_int(self.a):
            if self.a < 0 and np.any(np.asarray(s) == 0.0):
                raise DomainError(f"pole of {self.text()} at s = 0")
            return
        if np.any(np.asarray(s) <= 0.0):
            raise DomainError(
                f"{self.text()} needs s > 0 for fractional exponent, got s = {s}"
            )

    def value(self, s):
        self._check(s)
        return self.c * np.power(s, self.a) if isinstance(s, np.ndarray) else self.c * s**self.a

    def d1(self, s):
        if self.a == 0.0:
            return Zero().value(s)
        return Power(self.c * self.a, self.a - 1.0).value(s)

    def d2(self, s):
        if self.a in (0.0, 1.0):
            return Zero().value(s)
        return Power(self.c * self.a * (self.a - 1.0), self.a - 2.0).value(s)

    def derivative(self):
        if self.a == 0.0:
            return Zero()
        return Power(self.c * self.a, self.a - 1.0)

    def limit_pos_inf(self):
        if self.a > 0:
            return math.copysign(math.inf, self.c)
        if self.a == 0:
            return float(self.c)
        return 0.0

    def limit_neg_inf(self):
        if not _is_int(self.a):
            raise UnsupportedFormError(f"{self.text()} undefined as s -> -inf")
        if self.a > 0:
            sign = 1.0 if int(self.a) % 2 == 0 else -1.0
            return math.copysign(math.inf, self.c * sign)
        if self.a == 0:
            return float(self.c)
        return 0.0

    def text(self):
        return f"power({_fmt(self.c)},{_fmt(self.a)})"


@dataclass(frozen=True)
class Exp(FuncForm):
    """c * exp(lam * s)."""

    c: float
    lam: float

    def value(self, s):
        return self.c * np.exp(self.lam * s) if isinstance(s, np.ndarray) else self.c * math.exp(self.lam * s)

    def d1(self, s):
        return Exp(self.c * self.lam, self.lam).value(s)

    def d2(self, s):
        return Exp(self.c * self.lam**2, self.lam).value(s)

    def derivative(self):
        return Exp(self.c * self.lam, self.lam)

    def limit_pos_inf(self):
        if self.lam > 0:
            return math.copysign(math.inf, self.c)
        if self.lam == 0:
            return float(self.c)
        return 0.0

    def limit_neg_inf(self):
        if self.lam < 0:
            return math.copysign(math.inf, self.c)
        if self.lam == 0:
            return float(self.c)
        return 0.0

    def text(self):
        return f"exp({_fmt(self.c)},{_fmt(self.lam)})"


@dataclass(frozen=True)
class Affine(FuncForm):
    """a*s + b."""

    a: float
    b: float

    def value(self, s):
        return self.a * s + self.b

    def d1(self, s):
        return Const(self.a).value(s)

    def d2(self, s):
        return Zero().value(s)

    def derivative(self):
        return Const(self.a)

    def limit_pos_inf(self):
        if self.a > 0:
            return math.inf
        if self.a < 0:
            return -math.inf
        return float(self.b)

    def limit_neg_inf(self):
        if self.a > 0:
            return -math.inf
        if self.a < 0:
            return math.inf
        return float(self.b)

    def text(self):
        return f"affine({_fmt(self.a)},{_fmt(self.b)})"


@dataclass(frozen=True)
class Mobius(FuncForm):
    """s / (1 - e*s); pole at s = 1/e, identity map for e = 0."""

    e: float

    def _den(self, s):
        den = 1.0 - self.e * s
        if np.any(np.asarray(den) == 0.0):
            raise DomainError(f"pole of {self.text()} at s = 1/e = {1.0 / self.e}")
        return den

    def value(self, s):
        return s / self._den(s)

    def d1(self, s):
        return self._den(s) ** -2.0

    def d2(self, s):
        return 2.0 * self.e * self._den(s) ** -3.0

    def derivative(self):
        return _MobiusDeriv(self.e, 1)

    def limit_pos_inf(self):
        if self.e == 0.0:
            return math.inf
        return -1.0 / self.e

    def limit_neg_inf(self):
        if self.e == 0.0:
            return -math.inf
        return -1.0 / self.e

    def text(self):
        return f"mobius({_fmt(self.e)})"


@dataclass(frozen=True)
class _MobiusDeriv(FuncForm):
    """n-th derivative of mobius(e): n! * e**(n-1) / (1 - e*s)**(n+1)."""

    e: float
    n: int

    def value(self, s):
        den = 1.0 - self.e * s
        if np.any(np.asarray(den) == 0.0):
            raise DomainError(f"pole of mobius({self.e}) derivative at s = 1/e")
        return math.factorial(self.n) * self.e ** (self.n - 1) * den ** -(self.n + 1)

    def d1(self, s):
        return _MobiusDeriv(self.e, self.n + 1).value(s)

    def d2(self, s):
        return _MobiusDeriv(self.e, self.n + 2).value(s)

    def derivative(self):
        return _MobiusDeriv(self.e, self.n + 1)

    def text(self):
        return f"mobius_deriv({_fmt(self.e)},{self.n})"


@lru_cache(maxsize=None)
def _bumps(seed: int):
    rng = np.random.default_rng(seed)
    centers = rng.uniform(*_CENTER_RANGE, _N_BUMPS)
    widths = rng.uniform(*_WIDTH_RANGE, _N_BUMPS)
    amps = rng.uniform(*_AMP_RANGE, _N_BUMPS)
    return centers, widths, amps


@dataclass(frozen=True)
class RandomSmooth(FuncForm):
    """floor + sum of Gaussian bumps, reproducible from the seed alone.

    Strictly positive (>= floor) and infinitely differentiable; used wherever
    a verification suite quantifies over "arbitrary" smooth functions.
    """

    seed: int
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        if self.floor <= 0:
            raise DomainError("randsmooth floor must be > 0")

    def value(self, s):
        c, w, a = _bumps(self.seed)
        s_arr = np.asarray(s, dtype=float)
        z = (s_arr[..., None] - c) / w
        out = self.floor + np.sum(a * np.exp(-0.5 * z**2), axis=-1)
        return out if isinstance(s, np.ndarray) else float(out)

    def d1(self, s):
        c, w, a = _bumps(self.seed)
        s_arr = np.asarray(s, dtype=float)
        z = (s_arr[..., None] - c) / w
        out = np.sum(-a * z / w * np.exp(-0.5 * z**2), axis=-1)
        return out if isinstance(s, np.ndarray) else float(out)

    def d2(self, s):
        c, w, a = _bumps(self.seed)
        s_arr = np.asarray(s, dtype=float)
        z = (s_arr[..., None] - c) / w
        out = np.sum(a * (z**2 - 1.0) / w**2 * np.exp(-0.5 * z**2), axis=-1)
        return out if isinstance(s, np.ndarray) else float(out)

    def derivative(self):
        return _GaussSumDeriv(self.seed, self.floor, 1)

    def text(self):
        return f"randsmooth({self.seed},{_fmt(self.floor)})"


@dataclass(frozen=True)
class _GaussSumDeriv(FuncForm):
    """First or second analytic derivative of a RandomSmooth form."""

    seed: int
    floor: float
    n: int

    def value(self, s):
        base = RandomSmooth(self.seed, self.floor)
        return base.d1(s) if self.n == 1 else base.d2(s)

    def d1(self, s):
        if self.n >= 2:
            raise UnsupportedFormError("randsmooth derivatives supported up to order 2")
        return RandomSmooth(self.seed, self.floor).d2(s)

    def derivative(self):
        if self.n >= 2:
            raise UnsupportedFormError("randsmooth derivatives supported up to order 2")
        return _GaussSumDeriv(self.seed, self.floor, 2)

    def text(self):
        return f"randsmooth_deriv({self.seed},{_fmt(self.floor)},{self.n})"


# ---------------------------------------------------------------------------
# module-level operations


def evaluate(f: FuncForm, s):
    """Value of the represented function at s (scalar or ndarray)."""
    return f.value(s)


def derivative(f: FuncForm) -> FuncForm:
    """Exact derivative: a catalogue form where the catalogue is closed,
    otherwise an analytic derivative object with the same interface."""
    return f.derivative()


def limit_at_pos_infinity(f: FuncForm) -> float:
    """Symbolic limit as s -> +inf; +-inf encoded as float infinities."""
    return f.limit_pos_inf()


# ---------------------------------------------------------------------------
# text serialization


def _fmt(v: float) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def format_form(f: FuncForm) -> str:
    return f.text()


_FORM_RE = re.compile(r"^\s*([a-z]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")

_ARITY = {
    "zero": 0,
    "const": 1,
    "power": 2,
    "exp": 2,
    "affine": 2,
    "mobius": 1,
    "randsmooth": (1, 2),
}


def parse_form(text: str) -> FuncForm:
    """Parse the catalogue syntax, e.g. power(1,-1.5) or randsmooth(42,0.5)."""
    m = _FORM_RE.match(text)
    if not m:
        raise SpecFileError(f"cannot parse function form: {text!r}")
    name, argstr = m.group(1), m.group(2)
    args = []
    if argstr:
        try:
            args = [float(tok) for tok in argstr.split(",")]
        except ValueError as exc:
            raise SpecFileError(f"bad numeric literal in {text!r}") from exc
    if name not in _ARITY:
        raise SpecFileError(f"unknown function form {name!r} in {text!r}")
    arity = _ARITY[name]
    allowed = arity if isinstance(arity, tuple) else (arity,)
    if len(args) not in allowed:
        raise SpecFileError(f"{name} takes {allowed} arguments, got {len(args)}")
    if name == "zero":
        return Zero()
    if name == "const":
        return Const(args[0])
    if name == "power":
        return Power(args[0], args[1])
    if name == "exp":
        return Exp(args[0], args[1])
    if name == "affine":
        return Affine(args[0], args[1])
    if name == "mobius":
        return Mobius(args[0])
    seed = int(args[0])
    if seed != args[0]:
        raise SpecFileError("randsmooth seed must be an integer")
    floor = args[1] if len(args) == 2 else DEFAULT_FLOOR
    return RandomSmooth(seed, floor)


def is_zero_form(f: FuncForm) -> bool:
    """True when the form is identically zero (Zero, const(0) or power(0,a))."""
    if isinstance(f, Zero):
        return True
    if isinstance(f, Const):
        return f.c == 0.0
    if isinstance(f, Power):
        return f.c == 0.0
    return False
