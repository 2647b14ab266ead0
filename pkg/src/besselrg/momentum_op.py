"""Discretized cutoff Hamiltonians with rank-one counterterms, and the
regularized action of the maximal operator on tailed functions.

The cutoff operator on a quadrature grid is symmetrized by conjugating the
Nystrom matrix with diag(sqrt(w)) -- a unitary rescaling of the discrete L^2
space that preserves the spectrum while keeping the matrix exactly symmetric:

    M_ij = p_i^2 delta_ij + sqrt(w_i w_j) k(p_i, p_j),

with k(p,q) = (alpha - 1/4) min(p,q) + (f/Lambda) p q on the sine side and
k(p,q) = -(alpha - 1/4) max(p,q) + Lambda g on the cosine side.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import BesselParameter, MomentumGrid
from .errors import DomainError, TailMismatchError, UnsupportedError
from .rgflow import FlowKind


def kernel_min_max(flow: FlowKind, param: BesselParameter, p: float, q: float) -> float:
    """Interaction kernel: (alpha-1/4) min(p,q) (Dirichlet) or
    -(alpha-1/4) max(p,q) (Neumann); p, q > 0."""
    if p <= 0.0 or q <= 0.0:
        raise DomainError("kernel arguments must be positive momenta")
    c = param.alpha - 0.25
    if flow is FlowKind.DIRICHLET:
        return c * min(p, q)
    return -c * max(p, q)


def counterterm_matrix(grid: MomentumGrid, flow: FlowKind, lam: float | None = None) -> np.ndarray:
    """Rank-one counterterm in the symmetrized discretization (unit coupling).

    Dirichlet: outer product of v_i = sqrt(w_i) p_i; Neumann: of sqrt(w_i).
    The running-coupling weight (f/Lambda or Lambda g) multiplies this matrix.
    """
    sw = np.sqrt(grid.weights)
    v = sw * grid.nodes if flow is FlowKind.DIRICHLET else sw
    return np.outer(v, v)


@dataclass(frozen=True)
class CutoffHamiltonian:
    """Dense symmetric discretization of the cutoff operator."""

    grid: MomentumGrid
    flow: FlowKind
    param: BesselParameter
    coupling: float
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)


def assemble_cutoff(grid: MomentumGrid, flow: FlowKind, param: BesselParameter,
                    coupling: float) -> CutoffHamiltonian:
    """Assemble the symmetric cutoff matrix including the rank-one counterterm.

    ``coupling`` is the trajectory value (f or g) at the grid's cutoff; the
    counterterm weight f/Lambda resp. Lambda*g is applied here.
    """
    if not math.isfinite(coupling):
        raise DomainError("coupling must be finite (blow-up cutoffs are excluded)")
    c = param.alpha - 0.25
    lam = grid.cutoff
    if flow is FlowKind.DIRICHLET:
        matrix = _kernels.assemble_dirichlet(grid.nodes, grid.weights, c, coupling / lam)
    else:
        matrix = _kernels.assemble_neumann(grid.nodes, grid.weights, c, lam * coupling)
    return CutoffHamiltonian(grid, flow, param, coupling, matrix)


class TailKind(enum.Enum):
    POWER_PAIR = "power-pair"      # c+ p^(-3/2-m) + c- p^(-3/2+m), alpha != 0, 1/4
    LOG_PAIR = "log-pair"          # c+ p^(-3/2) log p + c- p^(-3/2), alpha = 0
    INVERSE_P = "inverse-p"        # c p^-1, alpha = 1/4 Dirichlet
    INVERSE_P2 = "inverse-p2"      # c p^-2, alpha = 1/4 Neumann


@dataclass(frozen=True)
class TailFunction:
    """Samples on a momentum grid plus declared large-p tail data.

    Beyond the matching scale lam0 the samples must equal the declared tail;
    build with from_samples(..., enforce_tail=True) to overwrite them with
    the tail values.
    """

    grid: np.ndarray
    samples: np.ndarray
    lam0: float
    kind: TailKind
    c_plus: complex = 0.0
    c_minus: complex = 0.0

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        samples = np.asarray(self.samples)
        if grid.ndim != 1 or grid.shape != samples.shape:
            raise DomainError("grid and samples must be matching 1-d arrays")
        if grid[0] <= 0.0 or np.any(np.diff(grid) <= 0.0):
            raise DomainError("grid must be positive and strictly ascending")
        grid.setflags(write=False)
        samples.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_samples(cls, grid, samples, lam0, kind, param=None, c_plus=0.0,
                     c_minus=0.0, enforce_tail=True):
        grid = np.asarray(grid, dtype=float)
        samples = np.array(samples)
        kind = TailKind(kind)
        if enforce_tail:
            mask = grid > lam0
            if mask.any():
                tail = _tail_values(grid[mask], kind, param, c_plus, c_minus)
                samples = samples.astype(np.result_type(samples.dtype, tail.dtype))
                samples[mask] = tail
        return cls(grid, samples, lam0, kind, c_plus, c_minus)


def _tail_values(p, kind, param, c_plus, c_minus):
    if kind is TailKind.POWER_PAIR:
        m = param.m
        vals = (c_plus * np.exp((-1.5 - m) * np.log(p))
                + c_minus * np.exp((-1.5 + m) * np.log(p)))
        if np.iscomplexobj(vals) and np.max(np.abs(vals.imag)) <= 1e-12 * max(1e-300, np.max(np.abs(vals.real))):
            return vals.real
        return np.asarray(vals)
    if kind is TailKind.LOG_PAIR:
        return np.asarray(c_plus * p ** -1.5 * np.log(p) + c_minus * p ** -1.5)
    if kind is TailKind.INVERSE_P:
        return np.asarray(c_plus / p)
    return np.asarray(c_plus / p ** 2)


def _expected_tail_kind(flow: FlowKind, param: BesselParameter) -> TailKind:
    if param.alpha == 0.25:
        return TailKind.INVERSE_P if flow is FlowKind.DIRICHLET else TailKind.INVERSE_P2
    if param.alpha == 0.0:
        return TailKind.LOG_PAIR
    return TailKind.POWER_PAIR


def _segment_integrals(grid, values):
    """Per-segment integrals of the parabolic interpolant (averaged over the
    two parabolas sharing each interior segment); O(h^4) on smooth data."""
    n = grid.size
    if n < 3:
        return 0.5 * np.diff(grid) * (values[:-1] + values[1:])

    def parab(ia, u, v):
        # integral over [u, v] of the quadratic through nodes ia, ia+1, ia+2
        xa, xb, xc = grid[ia], grid[ia + 1], grid[ia + 2]
        fa, fb, fc = values[ia], values[ia + 1], values[ia + 2]
        c1 = (fb - fa) / (xb - xa)
        c2 = ((fc - fb) / (xc - xb) - c1) / (xc - xa)
        i0 = v - u
        i1 = 0.5 * ((v - xa) ** 2 - (u - xa) ** 2)
        i2 = ((v ** 3 - u ** 3) / 3.0 - 0.5 * (xa + xb) * (v ** 2 - u ** 2)
              + xa * xb * (v - u))
        return fa * i0 + c1 * i1 + c2 * i2

    idx = np.arange(n - 1)
    left = np.clip(idx - 1, 0, n - 3)   # parabola starting one node left
    right = np.clip(idx, 0, n - 3)      # parabola starting at the segment
    seg_l = parab(left, grid[:-1], grid[1:])
    seg_r = parab(right, grid[:-1], grid[1:])
    return 0.5 * (seg_l + seg_r)


def _cumtrapz_from_zero(grid, values):
    """integral_0^p values dq at each node; the [0, p_1] sliver uses a
    linear-through-origin extension of the first sample."""
    seg = _segment_integrals(grid, values)
    out = np.concatenate([[0.0 + 0.0 * values[0]], np.cumsum(seg)])
    return out + 0.5 * grid[0] * values[0]


def apply_maximal(flow: FlowKind, param: BesselParameter, psi: TailFunction,
                  working_cutoff: float | None = None) -> np.ndarray:
    """Regularized maximal-operator action on a tailed function, sampled on
    psi's grid (nodes up to the matching scale).

    The finite-cutoff integral plus its explicit counterterm is constant in
    the working cutoff once it exceeds the matching scale, because the
    counterterm cancels the closed-form tail integral exactly; the limit is
    therefore evaluated in closed form.  Restricted to |m| < 1.
    """
    if param.alpha >= 1.0:
        raise UnsupportedError("maximal action implemented for m^2 < 1 only")
    expected = _expected_tail_kind(flow, param)
    if psi.kind is not expected:
        raise TailMismatchError(
            f"tail kind {psi.kind.value} does not match (alpha={param.alpha:g}, "
            f"{flow.value}): expected {expected.value}")

    p = psi.grid
    vals = psi.samples
    lam0 = psi.lam0
    if working_cutoff is None:
        working_cutoff = 2.0 * max(lam0, float(p[-1]))
    if working_cutoff < max(lam0, float(p[-1])):
        raise DomainError("working cutoff must exceed the matching scale")

    if param.alpha == 0.25:
        # alpha = 1/4: the kernel coefficient vanishes; the action is
        # p^2 (psi - c * tail) pointwise.
        if flow is FlowKind.DIRICHLET:
            return p * p * vals - psi.c_plus * p
        return p * p * vals - psi.c_plus

    c = param.alpha - 0.25
    if p[-1] < lam0:
        raise DomainError("the grid must reach the matching scale")
    # Numerics stop at the first node past the matching scale; every integral
    # over the tail region is taken in closed form so that the large-p
    # cancellation against p^2 psi(p) happens analytically.
    split = min(int(np.searchsorted(p, lam0, side="right")), p.size - 1)
    p_split = float(p[split])
    above = np.arange(p.size) > split

    int_q_psi = _cumtrapz_from_zero(p[:split + 1], (p * vals)[:split + 1])
    int_psi_up = _int_to_end(p[:split + 1], vals[:split + 1])
    if above.any():
        tail_q = _tail_integral(psi, param, p_split, p[above], moment=1)
        tail_1 = _tail_integral(psi, param, p_split, p[above], moment=0)

    if flow is FlowKind.DIRICHLET:
        tail_const = _dirichlet_tail_constant(param, psi, p_split, working_cutoff)
        out = np.empty(p.shape, dtype=np.result_type(vals, type(tail_const), float))
        lo = slice(0, split + 1)
        out[lo] = p[lo] ** 2 * vals[lo] + c * (int_q_psi + p[lo] * int_psi_up
                                               + p[lo] * tail_const)
        if above.any():
            out[above] = (p[above] ** 2 * vals[above]
                          + c * (int_q_psi[-1] + tail_q
                                 + p[above] * (tail_const - tail_1)))
        return _real_if_close_array(out)

    int_psi_from0 = _cumtrapz_from_zero(p[:split + 1], vals[:split + 1])
    int_qpsi_up = _int_to_end(p[:split + 1], (p * vals)[:split + 1])
    tail_const = _neumann_tail_constant(param, psi, p_split, working_cutoff)
    out = np.empty(p.shape, dtype=np.result_type(vals, type(tail_const), float))
    lo = slice(0, split + 1)
    out[lo] = p[lo] ** 2 * vals[lo] - c * (p[lo] * int_psi_from0 + int_qpsi_up
                                           + tail_const)
    if above.any():
        out[above] = (p[above] ** 2 * vals[above]
                      - c * (p[above] * (int_psi_from0[-1] + tail_1)
                             + tail_const - tail_q))
    return _real_if_close_array(out)


def _int_to_end(grid, values):
    seg = _segment_integrals(grid, values)
    out = np.zeros_like(values, dtype=np.result_type(values, float))
    out[:-1] = seg[::-1].cumsum()[::-1]
    return out


def _power_integral(coeff, exponent, a, b):
    """coeff * integral_a^b q^exponent dq, complex exponents allowed."""
    ex = exponent + 1.0
    return coeff * (np.exp(ex * np.log(b)) - np.exp(ex * np.log(a))) / ex


def _tail_integral(psi, param, a, b, moment):
    """integral_a^b q^moment * tail(q) dq in closed form (b may be an array)."""
    b = np.asarray(b, dtype=float)
    if psi.kind is TailKind.LOG_PAIR:
        ex = -1.5 + moment
        if moment == 0:
            def log_anti(q):
                return -2.0 * q ** -0.5 * np.log(q) - 4.0 * q ** -0.5
        else:
            def log_anti(q):
                return 2.0 * q ** 0.5 * np.log(q) - 4.0 * q ** 0.5
        plain = psi.c_minus * (b ** (ex + 1.0) - a ** (ex + 1.0)) / (ex + 1.0)
        return psi.c_plus * (log_anti(b) - log_anti(a)) + plain
    m = param.m if param.is_imaginary else param.m_value
    val = (_power_integral(psi.c_plus, -1.5 - m + moment, a, b)
           + _power_integral(psi.c_minus, -1.5 + m + moment, a, b))
    return _real_if_close_array(val)


def _real_if_close_array(arr):
    arr = np.asarray(arr)
    if np.iscomplexobj(arr):
        scale = max(1e-300, float(np.max(np.abs(arr.real))))
        if float(np.max(np.abs(arr.imag))) <= 1e-9 * scale:
            return arr.real
    return arr


def _dirichlet_tail_constant(param, psi, lam0, lam_work):
    """integral_lam0^L of the tail plus the explicit counterterm at L, the
    p-independent factor multiplying (alpha - 1/4) p.  The L-dependence
    cancels between the two pieces; evaluating both at the finite working
    cutoff realizes the regularized limit."""
    if psi.kind is TailKind.LOG_PAIR:
        def antider(q):  # integral of q^(-3/2) log q, resp. q^(-3/2)
            return (-2.0 * q ** -0.5 * math.log(q) - 4.0 * q ** -0.5,
                    -2.0 * q ** -0.5)
        f1, f0 = antider(lam_work)
        g1, g0 = antider(lam0)
        tail_int = psi.c_plus * (f1 - g1) + psi.c_minus * (f0 - g0)
        counterterm = (psi.c_plus * (4.0 * lam_work ** -0.5
                                     + 2.0 * lam_work ** -0.5 * math.log(lam_work))
                       + 2.0 * psi.c_minus * lam_work ** -0.5)
        return tail_int + counterterm
    m = param.m
    tail_int = (psi.c_plus * (lam_work ** (-0.5 - m) - lam0 ** (-0.5 - m)) / (-0.5 - m)
                + psi.c_minus * (lam_work ** (-0.5 + m) - lam0 ** (-0.5 + m)) / (-0.5 + m))
    counterterm = (psi.c_plus * lam_work ** (-0.5 - m) / (0.5 + m)
                   + psi.c_minus * lam_work ** (-0.5 + m) / (0.5 - m))
    return _real_if_close(tail_int + counterterm)


def _neumann_tail_constant(param, psi, lam0, lam_work):
    """integral_lam0^L of q*tail minus the counterterm at L (the additive
    constant in the Neumann action); L-dependence cancels as above."""
    if psi.kind is TailKind.LOG_PAIR:
        def antider(q):  # integral of q^(-1/2) log q, resp. q^(-1/2)
            return (2.0 * q ** 0.5 * math.log(q) - 4.0 * q ** 0.5, 2.0 * q ** 0.5)
        f1, f0 = antider(lam_work)
        g1, g0 = antider(lam0)
        tail_int = psi.c_plus * (f1 - g1) + psi.c_minus * (f0 - g0)
        counterterm = (psi.c_plus * (4.0 * lam_work ** 0.5
                                     - 2.0 * lam_work ** 0.5 * math.log(lam_work))
                       - 2.0 * psi.c_minus * lam_work ** 0.5)
        return tail_int + counterterm
    m = param.m
    tail_int = (psi.c_plus * (lam_work ** (0.5 - m) - lam0 ** (0.5 - m)) / (0.5 - m)
                + psi.c_minus * (lam_work ** (0.5 + m) - lam0 ** (0.5 + m)) / (0.5 + m))
    counterterm = -(psi.c_plus * lam_work ** (0.5 - m) / (0.5 - m)
                    + psi.c_minus * lam_work ** (0.5 + m) / (0.5 + m))
    return _real_if_close(tail_int + counterterm)


def _real_if_close(z):
    z = complex(z)
    if abs(z.imag) <= 1e-10 * max(1.0, abs(z.real)):
        return z.real
    return z
