"""Similarity reduction of the power-law problem and its exact fast-diffusion
branch.

For d(u) = u**k with constant flux the scaling symmetry reduces the problem
to an ODE boundary value problem on the half line:

    u = t**alpha F(w),  w = x t**(-beta),
    alpha = 1/(k+2),    beta = (k+1)/(k+2)

    (F**k F')' + (k+1)/(k+2) w F' - 1/(k+2) F = 0,
    F**k F' -> q0  as w -> 0+,        F -> 0  as w -> +inf.

Two independent solution paths are provided:

* the exact parametric branch for k = -3/2 (tau in (0, inf)):

      E(tau) = 1 + sqrt((tau+1)/tau) (C2 - ln(sqrt(tau) + sqrt(tau+1)))
      w = C1**3/2 * E**-1 sqrt((tau+1)/tau),   F = 4 C1**-4 E**2

  whose boundary-adapted specialization (C1 = 2/q0, C2 = 0) is evaluated,
  inverted (w -> tau) and lifted to u(t, x) = t**2 F(x t);

* a shooting solver integrating the first-order system in (F, P = F**k F')
  from a small w0 towards w_max, bisecting on F(w0).

The reduced flux P is the physically continuous variable; integrating in
(log F, P) over log w keeps the steep near-boundary layer well scaled.  On
the exact branch F blows up like 4/(q0 w)**2 as w -> 0+, so w = 0 is not a
regular initial point and both paths treat the flux condition as a limit.
The observed limit of F**k F' is the signed amplitude q0 (checked
numerically by the test suite); the physical branch with w > 0 and decaying
F requires q0 < 0, and positive q0 is rejected for exact evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import BracketError, DomainError, SolverAbort

__all__ = [
    "ansatz_exponents",
    "reduced_residual",
    "ParametricBranch",
    "SimilarityProfile",
    "eval_general_parametric",
    "eval_parametric",
    "solve_tau",
    "eval_solution",
    "lift",
    "shoot",
    "exact_profile",
    "tail_amplitude",
    "tail_flux",
    "write_profile_csv",
]

EXACT_K = -1.5

# ln(tau) beyond which the asymptotic forms r = 1, L = ln 2 + ln(tau)/2 are
# exact to double precision
_LNTAU_ASYMPTOTIC = 690.0
_LNTAU_LO = -60.0


def ansatz_exponents(k: float) -> tuple[float, float]:
    """Similarity exponents (alpha, beta) of u = t**alpha F(x t**-beta)."""
    if k == -2.0:
        raise DomainError("k = -2 has no scaling ansatz (degenerate exponents)")
    return 1.0 / (k + 2.0), (k + 1.0) / (k + 2.0)


def reduced_residual(k: float, w: float, F: float, F_w: float, F_ww: float) -> float:
    """Residual of the reduced ODE at one point, with (F**k F')' expanded to
    k F**(k-1) F'^2 + F**k F''."""
    if F == 0.0:
        if k > 0.0:
            return 0.0
        raise DomainError("F = 0 not admissible for non-positive exponents")
    if F < 0.0 and not float(k).is_integer():
        raise DomainError("F must be positive for fractional exponents")
    return (
        k * F ** (k - 1.0) * F_w**2
        + F**k * F_ww
        + (k + 1.0) / (k + 2.0) * w * F_w
        - F / (k + 2.0)
    )


# ---------------------------------------------------------------------------
# exact parametric branch (k = -3/2)


def _core(tau):
    """(r, L) with r = sqrt((tau+1)/tau) and L = ln(sqrt(tau)+sqrt(tau+1))."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0.0):
        raise DomainError("tau must be positive")
    r = np.sqrt(1.0 + 1.0 / tau)
    L = np.arcsinh(np.sqrt(tau))
    return r, L


def eval_general_parametric(tau, C1: float, C2: float):
    """(w, F) of the general two-constant parametric solution."""
    r, L = _core(tau)
    E = 1.0 + r * (C2 - L)
    if np.any(np.asarray(E) == 0.0):
        raise DomainError("parametric pole: E(tau) = 0")
    w = (C1**3 / 2.0) / E * r
    F = 4.0 / C1**4 * E**2
    if np.isscalar(tau) or np.asarray(tau).ndim == 0:
        return float(w), float(F)
    return w, F


def eval_parametric(tau, q0: float):
    """(w, F) on the boundary-adapted branch; physical for q0 < 0."""
    if q0 >= 0.0:
        raise DomainError("the decaying branch with w > 0 requires q0 < 0")
    r, L = _core(tau)
    G = 1.0 + r * (0.0 - L)
    w = (4.0 / q0**3) * r / G
    F = q0**4 / 4.0 * G**2
    if np.isscalar(tau) or np.asarray(tau).ndim == 0:
        return float(w), float(F)
    return w, F


# below this ln(tau) the cancellation in 1 - r L is avoided with a series
_LNTAU_SERIES = math.log(1e-3)


def _rLG_of_lntau(s):
    """(r, L, G) on the branch, stable across the whole ln(tau) line.

    G = 1 - r L cancels catastrophically as tau -> 0 (r L = 1 + tau/3 - ...),
    so small tau uses the series G = -tau/3 + 2 tau^2/15 - 8 tau^3/105; huge
    tau uses r = 1 and L = ln 2 + ln(tau)/2.
    """
    s = np.asarray(s, dtype=float)
    r = np.ones_like(s)
    L = np.empty_like(s)
    G = np.empty_like(s)
    direct = s <= _LNTAU_ASYMPTOTIC
    if np.any(direct):
        tau = np.exp(s[direct])
        r[direct] = np.sqrt(1.0 + 1.0 / tau)
        L[direct] = np.arcsinh(np.sqrt(tau))
        G[direct] = 1.0 - r[direct] * L[direct]
    big = ~direct
    if np.any(big):
        L[big] = math.log(2.0) + 0.5 * s[big]
        G[big] = 1.0 - L[big]
    series = s < _LNTAU_SERIES
    if np.any(series):
        tau = np.exp(s[series])
        G[series] = tau * (-1.0 / 3.0 + tau * (2.0 / 15.0 - tau * 8.0 / 105.0))
    return r, L, G


def _omega_of_lntau(s, q0: float):
    """w(ln tau), evaluated through the asymptotic forms for huge tau."""
    r, _, G = _rLG_of_lntau(s)
    return (4.0 / q0**3) * r / G


def _F_of_lntau(s, q0: float):
    _, _, G = _rLG_of_lntau(s)
    return q0**4 / 4.0 * G**2


def _lntau_of_omega(w, q0: float, tol: float = 1e-12):
    """Invert the strictly decreasing w(tau) by bisection in ln(tau)."""
    if q0 >= 0.0:
        raise DomainError("the decaying branch with w > 0 requires q0 < 0")
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0.0):
        raise DomainError("w must be positive")
    w_min = float(np.min(w))
    # upper ln(tau) bound from the asymptote w ~ -4/(q0^3 (L - 1))
    s_hi = max(80.0, 2.0 * (1.0 + abs(4.0 / (q0**3 * w_min))) + 20.0)
    s_lo_arr = np.full_like(w, _LNTAU_LO)
    s_hi_arr = np.full_like(w, s_hi)
    w_at_hi = _omega_of_lntau(s_hi_arr, q0)
    w_at_lo = _omega_of_lntau(s_lo_arr, q0)
    if np.any(w > w_at_lo) or np.any(w < w_at_hi):
        raise BracketError(
            f"w outside the invertible branch range [{float(np.max(w_at_hi))!r}, "
            f"{float(np.min(w_at_lo))!r}]"
        )
    iters = int(math.ceil(math.log2((s_hi - _LNTAU_LO) / tol))) + 1
    for _ in range(iters):
        mid = 0.5 * (s_lo_arr + s_hi_arr)
        too_big = _omega_of_lntau(mid, q0) > w  # w decreasing: need larger tau
        s_lo_arr = np.where(too_big, mid, s_lo_arr)
        s_hi_arr = np.where(too_big, s_hi_arr, mid)
    return 0.5 * (s_lo_arr + s_hi_arr)


def solve_tau(w, q0: float, tol: float = 1e-12):
    """The unique tau > 0 with eval_parametric(tau, q0).w = w."""
    s = _lntau_of_omega(w, q0, tol)
    if np.any(s > 709.0):
        raise BracketError(
            "tau exceeds the floating-point range for this w; "
            "use eval_solution, which works in ln(tau)"
        )
    tau = np.exp(s)
    if np.isscalar(w) or np.asarray(w).ndim == 0:
        return float(tau)
    return tau


def _branch_P_of_lntau(s, q0: float):
    """Reduced flux P = F**k F_w on the exact branch, parametrically.

    Uses dG/dtau = L/(2 tau^2 r) - 1/(2 tau), switching to its series
    -1/3 + 4 tau/15 - 8 tau^2/35 where the closed form cancels; for huge
    tau the flux has converged to q0 within double precision.
    """
    s = np.asarray(s, dtype=float)
    out = np.full_like(s, q0)
    fin = s <= _LNTAU_ASYMPTOTIC
    if np.any(fin):
        sf = s[fin]
        tau = np.exp(sf)
        r, L, G = _rLG_of_lntau(sf)
        inv_tau = np.exp(-sf)
        inv_tau2 = np.exp(-2.0 * sf)  # underflows harmlessly to 0 for huge tau
        dG = np.empty_like(sf)
        ser = sf < _LNTAU_SERIES
        dG[ser] = -1.0 / 3.0 + tau[ser] * (4.0 / 15.0 - tau[ser] * 8.0 / 35.0)
        dG[~ser] = L[~ser] * inv_tau2[~ser] / (2.0 * r[~ser]) - 0.5 * inv_tau[~ser]
        dr = -inv_tau2 / (2.0 * r)
        F = q0**4 / 4.0 * G**2
        dF = q0**4 / 2.0 * G * dG
        dw = (4.0 / q0**3) * (dr * G - r * dG) / G**2
        out[fin] = F**EXACT_K * dF / dw
    return out


def eval_solution(t, x, q0: float):
    """Exact solution u(t, x) = t**2 F(x t) for d = u**(-3/2), q = q0 < 0."""
    t_arr = np.asarray(t, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(t_arr <= 0.0) or np.any(x_arr <= 0.0):
        raise DomainError("exact solution defined for t > 0, x > 0")
    w = x_arr * t_arr
    s = _lntau_of_omega(w, q0)
    u = t_arr**2 * _F_of_lntau(s, q0)
    if np.isscalar(t) and np.isscalar(x):
        return float(u)
    return u


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class ParametricBranch:
    """General-form integration constants; the boundary-adapted branch is
    C1 = 2/q0, C2 = 0."""

    q0: float
    C1: float
    C2: float

    @staticmethod
    def for_flux(q0: float) -> "ParametricBranch":
        return ParametricBranch(q0, 2.0 / q0, 0.0)

    def eval(self, tau):
        return eval_general_parametric(tau, self.C1, self.C2)


class SimilarityProfile:
    """Reduced profile F(w) with flux column P = F**k F'.

    Either a numeric table (monotone w, cubic interpolation in log-log) or
    the exact parametric branch for k = -3/2 (interrogated through the
    parametric inverse, no interpolation error).
    """

    def __init__(self, k, q0, omega, F, P, exact=False):
        omega = np.asarray(omega, dtype=float)
        F = np.asarray(F, dtype=float)
        P = np.asarray(P, dtype=float)
        if omega.ndim != 1 or omega.size < 4:
            raise DomainError("profile table needs at least 4 points")
        if not np.all(np.diff(omega) > 0.0):
            raise DomainError("profile table needs strictly increasing w")
        if not np.all(F > 0.0):
            raise DomainError("profile table needs positive F")
        self.k = float(k)
        self.q0 = float(q0)
        self.omega = omega
        self.F = F
        self.P = P
        self.exact = bool(exact)
        self._logF = CubicSpline(np.log(omega), np.log(F))
        self._Pspline = CubicSpline(np.log(omega), P)

    def _check_range(self, w):
        w = np.asarray(w, dtype=float)
        if self.exact:
            if np.any(w <= 0.0):
                raise DomainError("w must be positive")
            return w
        lo, hi = self.omega[0], self.omega[-1]
        if np.any(w < lo * (1.0 - 1e-12)) or np.any(w > hi * (1.0 + 1e-12)):
            raise DomainError(
                f"w outside the tabulated range [{lo!r}, {hi!r}]: extrapolation refused"
            )
        return w

    def F_at(self, w):
        w_arr = self._check_range(w)
        if self.exact:
            out = _F_of_lntau(_lntau_of_omega(w_arr, self.q0), self.q0)
        else:
            out = np.exp(self._logF(np.log(w_arr)))
        return float(out) if np.asarray(w).ndim == 0 else out

    def P_at(self, w):
        w_arr = self._check_range(w)
        if self.exact:
            out = _branch_P_of_lntau(_lntau_of_omega(w_arr, self.q0), self.q0)
        else:
            out = self._Pspline(np.log(w_arr))
        return float(out) if np.asarray(w).ndim == 0 else out


def exact_profile(q0: float, omega_min: float, omega_max: float, n: int = 800) -> SimilarityProfile:
    """Exact-branch profile tabulated on a log grid (k = -3/2)."""
    if omega_min <= 0.0 or omega_max <= omega_min:
        raise DomainError("need 0 < omega_min < omega_max")
    w = np.geomspace(omega_min, omega_max, n)
    s = _lntau_of_omega(w, q0)
    return SimilarityProfile(
        EXACT_K, q0, w, _F_of_lntau(s, q0), _branch_P_of_lntau(s, q0), exact=True
    )


def lift(profile: SimilarityProfile, t: float, x: float) -> float:
    """u(t, x) = t**alpha F(x t**-beta) for the profile's exponent."""
    if t <= 0.0:
        raise DomainError("t must be positive")
    alpha, beta = ansatz_exponents(profile.k)
    w = x * t**-beta
    return t**alpha * float(profile.F_at(w))


# ---------------------------------------------------------------------------
# tail asymptotics of the reduced ODE (used by the shooting classifier)


def tail_amplitude(k: float) -> float:
    """Amplitude A of the algebraic tail F ~ A w**(2/k) of decaying
    solutions, from the dominant balance of the reduced ODE."""
    if not -2.0 < k < 0.0:
        raise DomainError("algebraic tail requires -2 < k < 0")
    return (-k / (2.0 * (k + 2.0))) ** (1.0 / k)


def tail_flux(k: float, w: float) -> float:
    """Reduced flux F**k F' of the tail asymptote at w."""
    A = tail_amplitude(k)
    return (2.0 / k) * A ** (k + 1.0) * w ** (2.0 / k + 1.0)


# ---------------------------------------------------------------------------
# shooting solver


def _integrate(k, q0, a, s0, s1, rtol, atol, floor_log, dense=False):
    """Integrate the reduced system in y = (ln F, P) over s = ln w.

    Terminal events: P reaching 0 (the profile stops decaying), P dropping
    2% below q0 (the collapse signature, see _classify_shot), and ln F
    falling through the floor.
    """

    def rhs(s, y):
        w = math.exp(s)
        lnF, P = y
        F_pow = math.exp(-(k + 1.0) * lnF)  # F**-(k+1)
        dlnF = w * F_pow * P
        dP = w * math.exp(lnF) / (k + 2.0) - (k + 1.0) / (k + 2.0) * w * w * F_pow * math.exp(lnF) * P
        return (dlnF, dP)

    p_under = q0 * 1.02

    def ev_turnaround(s, y):
        return y[1]

    ev_turnaround.terminal = True
    ev_turnaround.direction = 1.0

    def ev_collapse(s, y):
        return y[1] - p_under

    ev_collapse.terminal = True
    ev_collapse.direction = -1.0

    def ev_floor(s, y):
        return y[0] - floor_log

    ev_floor.terminal = True
    ev_floor.direction = -1.0

    sol = solve_ivp(
        rhs,
        (s0, s1),
        (math.log(a), q0),
        method="RK45",
        rtol=rtol,
        atol=atol,
        events=[ev_turnaround, ev_collapse, ev_floor],
        dense_output=dense,
    )
    if not sol.success and sol.status != 1:
        raise SolverAbort(f"reduced-ODE integration failed: {sol.message}")
    return sol


def _classify_shot(sol, q0):
    """+1 for the low side of the collapse boundary, -1 for the high side.

    Trajectories below the decaying branch keep q0 < P < 0 (the flux drifts
    up and eventually turns positive); trajectories above it collapse, and
    on re-slaving to a lower curve the flux necessarily falls below q0.
    """
    if sol.t_events[0].size:  # P reached 0: below the branch
        return 1
    if sol.t_events[1].size or sol.t_events[2].size:  # collapse
        return -1
    return 1 if sol.y[1, -1] > q0 * 1.02 else -1


def _layer_F(k: float, q0: float, a: float, omega0: float, w):
    """Near-boundary layer of the reduced system, where the flux is locked
    to q0: F**(k+1) = a**(k+1) + (k+1) q0 (w - omega0)."""
    val = a ** (k + 1.0) + (k + 1.0) * q0 * (np.asarray(w, dtype=float) - omega0)
    if np.any(val <= 0.0):
        raise SolverAbort("layer solution lost positivity before the matching point")
    return val ** (1.0 / (k + 1.0))


def shoot(
    k: float,
    q0: float,
    omega_max: float,
    tol: float = 1e-6,
    omega0: float = 1e-3,
    omega_switch: float = 0.55,
    n_points: int = 2000,
    rtol: float = 1e-12,
    atol: float = 1e-14,
    max_bisect: int = 200,
) -> SimilarityProfile:
    """Decaying reduced profile by bisection on the near-boundary value F(w0).

    For k < -1 the system F' = F**-k P, P' = F/(k+2) - (k+1)/(k+2) w F**-k P
    is violently unstable in the P-direction near w = 0 (local rate
    ~ |k+1|/(k+2) w^2 F**-k, which on the branch grows like 1/w), so a raw
    initial value problem started at w0 = 1e-3 loses the decaying branch
    within machine precision immediately.  In that layer, however, the flux
    is locked to P = q0 up to terms that decay like the inverse of the same
    exponential factor, and the locked system integrates in closed form.
    The solver therefore carries F(w0) = a through the closed-form layer up
    to omega_switch, integrates the full system from there with
    P(omega_switch) = q0, and bisects on a.  Shots are classified on a
    horizon somewhat past omega_max: below the decaying branch the flux
    drifts up and turns positive, above it the profile collapses and the
    flux falls below q0.

    The accepted profile must meet the decay criterion
    F(omega_max) < tol * F(omega0).
    """
    if not -2.0 < k < 0.0:
        raise DomainError("shooting supports the fast-diffusion range -2 < k < 0")
    if q0 >= 0.0:
        raise DomainError("decaying profiles require q0 < 0")
    if not 0.0 < omega0 < omega_max:
        raise DomainError("need 0 < omega0 < omega_max")

    w_start = min(max(omega0, omega_switch), 0.5 * omega_max)
    s_start, s1 = math.log(w_start), math.log(omega_max)
    s_classify = s1 + 2.0
    if k != -1.0:
        a_scale = (abs(k + 1.0) * abs(q0) * max(omega0, 1e-6)) ** (1.0 / (k + 1.0))
    else:
        a_scale = 1.0

    def start_value(a):
        if w_start <= omega0:
            return a
        return float(_layer_F(k, q0, a, omega0, w_start))

    def run(a, s_end, dense=False):
        f_start = start_value(a)
        floor_log = math.log(f_start) + math.log(1e-12)
        return _integrate(k, q0, f_start, s_start, s_end, rtol, atol, floor_log, dense)

    def classify_a(a):
        try:
            return _classify_shot(run(a, s_classify), q0)
        except SolverAbort:
            # the layer solution already died: far below the branch
            return 1

    lo, hi = a_scale * 1e-8, a_scale * 1e8
    cls_lo = classify_a(lo)
    cls_hi = classify_a(hi)
    if cls_lo == cls_hi:
        raise BracketError(
            f"no sign change for F(w0) in [{lo!r}, {hi!r}]: both classify as "
            f"{'low side' if cls_lo > 0 else 'high side'} (k={k}, q0={q0})"
        )

    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(max_bisect):
        if lhi - llo <= 1e-14:
            break
        mid = 0.5 * (llo + lhi)
        if classify_a(math.exp(mid)) == cls_lo:
            llo = mid
        else:
            lhi = mid

    a_star = math.exp(0.5 * (llo + lhi))
    final = run(a_star, s1, dense=True)
    if final.t[-1] < s1:
        for cand in (math.exp(llo), math.exp(lhi)):
            final = run(cand, s1, dense=True)
            if final.t[-1] >= s1:
                a_star = cand
                break
        else:
            raise SolverAbort("no bracketed trajectory reaches omega_max")

    omega = np.geomspace(omega0, omega_max, n_points)
    in_layer = omega < w_start
    F = np.empty_like(omega)
    P = np.empty_like(omega)
    if np.any(in_layer):
        F[in_layer] = _layer_F(k, q0, a_star, omega0, omega[in_layer])
        P[in_layer] = q0
    y = final.sol(np.log(omega[~in_layer]))
    F[~in_layer] = np.exp(y[0])
    P[~in_layer] = y[1]
    if not F[-1] < tol * F[0]:
        raise SolverAbort(
            f"decay criterion violated: F(omega_max) = {F[-1]!r} vs "
            f"tol * F(omega0) = {tol * F[0]!r}"
        )
    return SimilarityProfile(k, q0, omega, F, P)


# ---------------------------------------------------------------------------
# emission


def write_profile_csv(profile: SimilarityProfile, path, header_lines=()) -> None:
    """CSV with columns omega,F,P; metadata goes into leading # lines."""
    lines = [f"# {h}" for h in header_lines]
    lines.append("omega,F,P")
    for w, F, P in zip(profile.omega, profile.F, profile.P):
        lines.append(f"{float(w)!r},{float(F)!r},{float(P)!r}")
    Path(path).write_text("\n".join(lines) + "\n")
