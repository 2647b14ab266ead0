"""Running couplings: flow ODEs, closed-form trajectories, fixed points,
limit cycles, and the equivalence of the heuristic gamma-flow with the
counterterm ODEs.

The two flows (one per momentum representation) are

    Lambda d f / d Lambda = +(f + 1/4 + alpha)^2 - alpha     (Dirichlet),
    Lambda d g / d Lambda = -(g + 1/4 + alpha)^2 + alpha     (Neumann),

with alpha = m^2 real in every phase.  Closed forms are implemented through
one rational expression in R = (Lambda/Lambda_0)^{2m}, evaluated in complex
arithmetic when m is imaginary (the result is real by conjugation symmetry);
alpha = 0 uses the logarithmic limit.  Trajectories blow up at finite cutoffs
(periodically for alpha < 0); the blow-up is reported through BlowUpError
rather than inf/nan.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .core import (
    BesselParameter,
    DatumKind,
    ExtensionParameter,
    Representation,
)
from .errors import BlowUpError, ConvergenceError, UnsupportedError

_BLOWUP_VALUE = 1e8
_BLOWUP_DEN_TOL = 1e-12


class FlowKind(enum.Enum):
    """Which running coupling: f (counterterm weight f/Lambda, kernel min)
    or g (counterterm weight Lambda*g, kernel -max)."""

    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


class TrajectoryForm(enum.Enum):
    CLOSED_FORM = "closed-form"
    NUMERICAL = "numerical"


def flow_rhs(flow: FlowKind, param: BesselParameter, value: float) -> float:
    """Right-hand side of the flow equation at the given coupling value."""
    a = param.alpha
    s = (value + 0.25 + a) ** 2 - a
    return s if flow is FlowKind.DIRICHLET else -s


def _rational_coupling(flow, param, lam0, value0, lam):
    """Closed form via the rational expression in R = (lam/lam0)^{2m}.

    Returns (value, denominator_scale_ratio); raises BlowUpError when the
    denominator vanishes within tolerance.
    """
    m = param.m  # complex; real part for alpha > 0, imaginary for alpha < 0
    a_plus = (0.5 + m) ** 2 + value0
    a_minus = (0.5 - m) ** 2 + value0
    r = cmath.exp(2.0 * m * math.log(lam / lam0))
    if flow is FlowKind.DIRICHLET:
        num = a_minus * r + a_plus
        den = a_minus * r - a_plus
    else:
        num = a_plus * r + a_minus
        den = a_plus * r - a_minus
    scale = abs(a_minus * r) + abs(a_plus)
    if abs(den) <= _BLOWUP_DEN_TOL * max(scale, 1.0):
        raise BlowUpError(f"coupling blows up near Lambda = {lam:g}", lam=lam)
    sign = -1.0 if flow is FlowKind.DIRICHLET else 1.0
    val = -0.25 - param.alpha + sign * m * num / den
    return val.real


def _log_coupling(flow, lam0, value0, lam):
    """alpha = 0 logarithmic trajectory."""
    u0 = value0 + 0.25
    big_l = math.log(lam / lam0)
    den = 1.0 - u0 * big_l if flow is FlowKind.DIRICHLET else 1.0 + u0 * big_l
    if abs(den) <= _BLOWUP_DEN_TOL * max(1.0, abs(u0 * big_l)):
        raise BlowUpError(f"coupling blows up near Lambda = {lam:g}", lam=lam)
    return u0 / den - 0.25


def closed_form_coupling(flow: FlowKind, param: BesselParameter, init, lam: float) -> float:
    """Trajectory value at cutoff lam for the initial condition init = (lam0, value0).

    Uses the tan-form (imaginary m), the tanh/rational form (real m != 0),
    or the logarithmic form (m = 0); all three are the one rational formula
    in (Lambda/Lambda_0)^{2m} with the appropriate limit taken for m = 0.
    """
    lam0, value0 = init
    if lam <= 0.0 or lam0 <= 0.0:
        raise ValueError("cutoffs must be positive")
    if param.alpha == 0.0:
        return _log_coupling(flow, lam0, value0, lam)
    return _rational_coupling(flow, param, lam0, value0, lam)


def next_blowup(flow: FlowKind, param: BesselParameter, init) -> float | None:
    """First blow-up cutoff strictly above lam0, or None if the trajectory
    is regular for all larger cutoffs."""
    lam0, value0 = init
    if param.alpha == 0.0:
        u0 = value0 + 0.25
        if flow is FlowKind.DIRICHLET:
            return lam0 * math.exp(1.0 / u0) if u0 > 0.0 else None
        return lam0 * math.exp(-1.0 / u0) if u0 < 0.0 else None
    if param.is_imaginary:
        mi = param.m_value
        # value = -1/4 - alpha (+/-) mi * tan(theta0 + mi log(lam/lam0))
        centered = value0 + 0.25 + param.alpha
        theta0 = math.atan2(centered, mi) if flow is FlowKind.DIRICHLET else math.atan2(-centered, mi)
        dtheta = math.pi / 2.0 - theta0
        while dtheta <= 0.0:
            dtheta += math.pi
        return lam0 * math.exp(dtheta / mi)
    m = param.m_value
    a_plus = (0.5 + m) ** 2 + value0
    a_minus = (0.5 - m) ** 2 + value0
    if flow is FlowKind.DIRICHLET:
        ratio = a_plus / a_minus if a_minus != 0.0 else math.nan
    else:
        ratio = a_minus / a_plus if a_plus != 0.0 else math.nan
    if not math.isfinite(ratio) or ratio <= 1.0:
        # R = ratio is reached only for R > 1, i.e. past lam0
        return None
    return lam0 * ratio ** (1.0 / (2.0 * m))


@dataclass(frozen=True)
class CouplingTrajectory:
    """A running coupling with its flow kind and initial condition."""

    flow: FlowKind
    param: BesselParameter
    lam0: float
    value0: float
    form: TrajectoryForm = TrajectoryForm.CLOSED_FORM

    def value(self, lam: float) -> float:
        return closed_form_coupling(self.flow, self.param, (self.lam0, self.value0), lam)

    def sample(self, lams) -> np.ndarray:
        return np.array([self.value(l) for l in np.asarray(lams, dtype=float)])


def coupling_for_extension(flow: FlowKind, param: BesselParameter,
                           ext: ExtensionParameter, lam: float) -> float:
    """Trajectory value selecting the realization described by a
    momentum-representation boundary datum, at cutoff lam.

    The datum must live in the representation matching the flow kind.
    Restricted to |m| < 1 (beyond, the cutoff flow has no nontrivial limit).
    """
    if lam <= 0.0:
        raise ValueError("cutoff must be positive")
    if param.alpha >= 1.0:
        raise UnsupportedError("coupling trajectories require m^2 < 1")
    expected = (Representation.MOMENTUM_DIRICHLET if flow is FlowKind.DIRICHLET
                else Representation.MOMENTUM_NEUMANN)
    if ext.representation is not expected:
        raise UnsupportedError(
            f"extension datum is in {ext.representation.value}, flow needs {expected.value}")

    if param.alpha == 0.25:
        if ext.kind is not DatumKind.UNDERLINED_KAPPA:
            raise UnsupportedError("alpha = 1/4 requires the underlined-kappa datum")
        return _quarter_coupling(flow, ext.value, lam)
    if param.alpha == 0.0:
        if ext.kind is not DatumKind.NU:
            raise UnsupportedError("alpha = 0 requires the nu datum")
        return _critical_coupling(flow, ext.value, lam)
    if param.is_imaginary:
        if ext.kind is not DatumKind.UNIMODULAR_KAPPA:
            raise UnsupportedError("alpha < 0 requires the unimodular-kappa datum")
    elif ext.kind is not DatumKind.KAPPA:
        raise UnsupportedError("0 < alpha < 1, alpha != 1/4 requires the kappa datum")
    return _generic_coupling(flow, param, ext.value, lam)


def _generic_coupling(flow, param, kt, lam):
    """f or g from the kappa-tilde datum (m != 0, m^2 != 1/4 handled too)."""
    m = param.m
    lam_m = cmath.exp(m * math.log(lam))
    lam_mi = 1.0 / lam_m
    if isinstance(kt, float) and math.isinf(kt):
        # kappa-tilde = infinity: keep only the kt terms
        if flow is FlowKind.DIRICHLET:
            num, den = (0.5 + m) * lam_m, lam_m / (0.5 + m)
        else:
            num, den = (0.5 - m) * lam_m, lam_m / (0.5 - m)
    elif flow is FlowKind.DIRICHLET:
        num = (0.5 - m) * lam_mi + kt * (0.5 + m) * lam_m
        den = lam_mi / (0.5 - m) + kt * lam_m / (0.5 + m)
    else:
        num = (0.5 + m) * lam_mi + kt * (0.5 - m) * lam_m
        den = lam_mi / (0.5 + m) + kt * lam_m / (0.5 - m)
    scale = abs(num) + abs(den)
    if abs(den) <= _BLOWUP_DEN_TOL * max(scale, 1.0):
        raise BlowUpError(f"coupling blows up near Lambda = {lam:g}", lam=lam)
    val = -num / den
    return val.real


def _quarter_coupling(flow, kappa, lam):
    """alpha = 1/4 trajectories from the underlined-kappa datum.

    Dirichlet: f = -Lambda/(Lambda + pi/(2 kappa)).
    Neumann:   Lambda g = 1/(pi/(2 kappa) - 1/Lambda), the flow-equation
    solution whose counterterm cancels the p^-2 tail in the limit.
    """
    if kappa == 0.0:
        return 0.0
    half_pi_over_k = 0.0 if math.isinf(kappa) else math.pi / (2.0 * kappa)
    if flow is FlowKind.DIRICHLET:
        den = lam + half_pi_over_k
        if abs(den) <= _BLOWUP_DEN_TOL * lam:
            raise BlowUpError(f"coupling blows up near Lambda = {lam:g}", lam=lam)
        return -lam / den
    den = half_pi_over_k - 1.0 / lam
    if abs(den) <= _BLOWUP_DEN_TOL * max(abs(half_pi_over_k), 1.0 / lam):
        raise BlowUpError(f"coupling blows up near Lambda = {lam:g}", lam=lam)
    return 1.0 / (lam * den)


def _critical_coupling(flow, nu_t, lam):
    """alpha = 0 trajectories from the momentum-side nu datum."""
    if math.isinf(nu_t):
        return -0.25
    big_l = math.log(lam)
    if flow is FlowKind.DIRICHLET:
        den = big_l + nu_t - 2.0
        num = big_l + nu_t + 2.0
    else:
        den = big_l + nu_t + 2.0
        num = big_l + nu_t - 2.0
    if abs(den) <= _BLOWUP_DEN_TOL * max(abs(num), 1.0):
        raise BlowUpError(f"coupling blows up near Lambda = {lam:g}", lam=lam)
    return -num / (4.0 * den)


def integrate_flow(flow: FlowKind, param: BesselParameter, init, lam_end: float,
                   rel_tol: float = 1e-10, lam_eval=None):
    """Integrate the flow ODE in s = log Lambda from init = (lam0, value0).

    Returns (lams, values) sampled at lam_eval (default: 200 log-spaced
    points).  Raises BlowUpError (with the escape location) when |value|
    exceeds 1e8 before lam_end.
    """
    lam0, value0 = init
    if lam0 <= 0.0 or lam_end <= 0.0:
        raise ValueError("cutoffs must be positive")
    s0, s1 = math.log(lam0), math.log(lam_end)
    if lam_eval is None:
        s_eval = np.linspace(s0, s1, 200)
    else:
        s_eval = np.log(np.asarray(lam_eval, dtype=float))
    if s0 == s1:
        return np.exp(s_eval), np.full(s_eval.shape, float(value0))

    sign = 1.0 if flow is FlowKind.DIRICHLET else -1.0
    a = param.alpha

    def rhs(_s, y):
        return sign * ((y[0] + 0.25 + a) ** 2 - a)

    def escape(_s, y):
        return abs(y[0]) - _BLOWUP_VALUE

    escape.terminal = True
    escape.direction = 1.0

    sol = solve_ivp(rhs, (s0, s1), [value0], t_eval=s_eval, rtol=rel_tol,
                    atol=rel_tol * 1e-2, events=escape, method="RK45", max_step=0.25)
    if not sol.success and sol.status != 1:
        raise ConvergenceError(f"flow integration failed: {sol.message}")
    if sol.status == 1:  # escape event fired
        lam_escape = math.exp(sol.t_events[0][0])
        raise BlowUpError(f"flow escaped |value| > {_BLOWUP_VALUE:g} near "
                          f"Lambda = {lam_escape:g}", lam=lam_escape)
    return np.exp(sol.t), sol.y[0]


def integrate_flow_restarting(flow: FlowKind, param: BesselParameter, init,
                              lam_eval, rel_tol: float = 1e-10):
    """Integrate the flow across blow-ups by switching charts at the poles.

    Near a blow-up the coupling obeys a simple Riccati pole; the reciprocal
    u = -1/(value + 1/4 + alpha) satisfies the regular equation
    u' = +/-(1 - alpha u^2) and crosses u = 0 smoothly, restarting the
    coupling on the other branch.  Returns values at lam_eval (ascending,
    all >= lam0); raises BlowUpError only when an evaluation point falls too
    close to a pole for the value to be representable.
    """
    lam0, value0 = init
    lams = np.asarray(lam_eval, dtype=float)
    if np.any(lams < lam0 * (1.0 - 1e-12)):
        raise ValueError("evaluation cutoffs must lie above lam0")
    s_eval = np.log(lams)
    out = np.empty(s_eval.shape)
    done = np.zeros(s_eval.shape, dtype=bool)

    a = param.alpha
    c = 0.25 + a
    sign = 1.0 if flow is FlowKind.DIRICHLET else -1.0

    def rhs_f(_s, y):
        return sign * ((y[0] + c) ** 2 - a)

    def rhs_u(_s, y):
        return sign * (1.0 - a * y[0] ** 2)

    period = math.pi / param.m_value if param.is_imaginary else math.inf
    delta = min(0.15, period / 6.0)
    s_cur = math.log(lam0)
    f_cur = float(value0)
    s_goal = float(s_eval.max())
    for _ in range(1000):
        pole = next_blowup(flow, param, (math.exp(s_cur), f_cur))
        s_pole = math.log(pole) if pole is not None else math.inf
        seg_end = min(s_goal, s_pole - delta)
        if seg_end > s_cur:
            inside = ~done & (s_eval >= s_cur - 1e-12) & (s_eval <= seg_end + 1e-12)
            t_eval = np.unique(np.concatenate([s_eval[inside], [seg_end]]))
            sol = solve_ivp(rhs_f, (s_cur, seg_end), [f_cur], t_eval=t_eval,
                            rtol=rel_tol, atol=rel_tol * 1e-2, max_step=0.25)
            if not sol.success:
                raise ConvergenceError(f"flow integration failed: {sol.message}")
            lookup = dict(zip(sol.t, sol.y[0]))
            for idx in np.nonzero(inside)[0]:
                out[idx] = lookup[min(lookup, key=lambda t, s=s_eval[idx]: abs(t - s))]
            done |= inside
            s_cur, f_cur = seg_end, float(sol.y[0][-1])
        if done.all():
            return lams, out
        # cross the pole in the reciprocal chart
        cross_end = s_pole + delta
        inside = ~done & (s_eval <= cross_end + 1e-12)
        t_eval = np.unique(np.concatenate([s_eval[inside], [cross_end]]))
        sol = solve_ivp(rhs_u, (s_cur, cross_end), [-1.0 / (f_cur + c)],
                        t_eval=t_eval, rtol=rel_tol, atol=rel_tol * 1e-2,
                        max_step=delta / 4.0)
        if not sol.success:
            raise ConvergenceError(f"flow integration failed: {sol.message}")
        u_lookup = dict(zip(sol.t, sol.y[0]))
        for idx in np.nonzero(inside)[0]:
            u = u_lookup[min(u_lookup, key=lambda t, s=s_eval[idx]: abs(t - s))]
            f_val = -c - 1.0 / u if u != 0.0 else math.inf
            if not math.isfinite(f_val) or abs(f_val) > _BLOWUP_VALUE:
                raise BlowUpError(
                    f"evaluation cutoff sits at a blow-up near Lambda = {pole:g}",
                    lam=pole)
            out[idx] = f_val
        done |= inside
        u_end = float(sol.y[0][-1])
        s_cur, f_cur = cross_end, -c - 1.0 / u_end
        if done.all():
            return lams, out
    raise ConvergenceError("too many pole crossings")  # pragma: no cover


class Stability(enum.Enum):
    ATTRACTIVE = "attractive"   # as Lambda -> infinity
    REPULSIVE = "repulsive"


@dataclass(frozen=True)
class FixedPointReport:
    values: tuple
    stability: tuple
    cycle_period: float | None  # log-Lambda period, alpha < 0 only


def fixed_points(flow: FlowKind, param: BesselParameter) -> FixedPointReport:
    """Real roots of the flow RHS with their Lambda -> infinity stability.

    For alpha < 0 there are no real roots; the flow is a limit cycle of
    log-Lambda period pi/m_I.
    """
    a = param.alpha
    if a < 0.0:
        return FixedPointReport((), (), math.pi / param.m_value)
    m = param.m_value
    roots = sorted({-0.25 - a - m, -0.25 - a + m})
    stab = []
    for r in roots:
        # d(RHS)/dvalue = +/- 2 (r + 1/4 + alpha)
        slope = 2.0 * (r + 0.25 + a)
        if flow is FlowKind.NEUMANN:
            slope = -slope
        if slope < 0.0:
            stab.append(Stability.ATTRACTIVE)
        elif slope > 0.0:
            stab.append(Stability.REPULSIVE)
        else:
            stab.append(Stability.REPULSIVE)  # degenerate double root (alpha = 0)
    return FixedPointReport(tuple(roots), tuple(stab), None)


@dataclass(frozen=True)
class GammaFlowCheck:
    """Result of the consistency check between the heuristic gamma-flow and
    the counterterm ODE (they are the same equation under gamma = f/Lambda)."""

    gamma: float
    section_rhs: float   # [gamma - (1/4 - alpha)/Lambda]^2
    residual: float      # identically zero up to roundoff


def wilson_gamma_equivalence(param: BesselParameter, f: float, lam: float) -> GammaFlowCheck:
    """Evaluate gamma = f/Lambda and the algebraic identity that equates
    d(gamma)/dLambda = [gamma - (1/4-alpha)/Lambda]^2 with the f-flow ODE.

    Substituting f = Lambda*gamma into the f equation gives
    Lambda^2 gamma' = (f + 1/4 + alpha)^2 - alpha - f, and the identity
    (f + 1/4 + alpha)^2 - alpha - f = (f - 1/4 + alpha)^2 makes both flows
    one equation; the residual returns the difference of the two sides.
    """
    if lam <= 0.0:
        raise ValueError("cutoff must be positive")
    a = param.alpha
    gamma = f / lam
    rhs_gamma = (gamma - (0.25 - a) / lam) ** 2
    lhs = (f + 0.25 + a) ** 2 - a - f
    rhs = (f - 0.25 + a) ** 2
    return GammaFlowCheck(gamma=gamma, section_rhs=rhs_gamma, residual=lhs - rhs)
