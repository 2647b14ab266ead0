"""Hot numeric kernels with numba-jitted and pure-numpy implementations.

The backend is chosen once at import time: numba when importable, unless the
environment variable BESSELRG_NUMBA is set to 0/false/off (the pure-numpy
fallback).  Both implementations are importable directly for the parity tests
and for benchmarks/kernel_bench.py.

Kernels
-------
assemble_dirichlet / assemble_neumann
    Dense symmetric cutoff-Hamiltonian assembly (N^2 fill).
filon_sine / filon_cosine
    Exact integration of sin(px)/cos(px) against the piecewise-linear
    interpolant of sampled data, for a batch of output momenta.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("BESSELRG_NUMBA", "auto").strip().lower()
if _env in ("0", "false", "off", "no"):
    _HAVE_NUMBA = False
else:
    try:
        import numba

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is an optional extra
        _HAVE_NUMBA = False

USING_NUMBA = _HAVE_NUMBA

# segment phase increments below this threshold use the Taylor path;
# the closed forms lose ~|d|^-1 digits of cancellation there.
_SMALL_PHASE = 1e-4


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def assemble_dirichlet_numpy(p, w, coeff, ct_weight):
    """M = diag(p^2) + sqrt(w_i w_j) * (coeff*min(p_i,p_j) + ct_weight*p_i*p_j)."""
    sw = np.sqrt(w)
    kern = coeff * np.minimum.outer(p, p) + ct_weight * np.outer(p, p)
    m = np.outer(sw, sw) * kern
    m[np.diag_indices_from(m)] += p * p
    return m


def assemble_neumann_numpy(p, w, coeff, ct_weight):
    """M = diag(p^2) + sqrt(w_i w_j) * (-coeff*max(p_i,p_j) + ct_weight)."""
    sw = np.sqrt(w)
    kern = -coeff * np.maximum.outer(p, p) + ct_weight
    m = np.outer(sw, sw) * kern
    m[np.diag_indices_from(m)] += p * p
    return m


def _filon_numpy(x, y, p, trig):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    p = np.asarray(p, dtype=float)
    out = np.zeros(p.shape, dtype=complex if np.iscomplexobj(y) else float)
    h = np.diff(x)
    a = y[:-1]
    b = np.diff(y) / h
    for i, pp in enumerate(p):
        if pp == 0.0:
            if trig == "sin":
                out[i] = 0.0
            else:
                out[i] = np.sum(h * (a + 0.5 * b * h))
            continue
        th0 = pp * x[:-1]
        d = pp * h
        s0 = np.sin(th0)
        c0 = np.cos(th0)
        s1 = np.sin(th0 + d)
        c1 = np.cos(th0 + d)
        if trig == "sin":
            big_a = (c0 - c1) / pp
            big_b = (s1 - s0) / pp**2 - h * c1 / pp
        else:
            big_a = (s1 - s0) / pp
            big_b = (c1 - c0) / pp**2 + h * s1 / pp
        small = np.abs(d) < _SMALL_PHASE
        if small.any():
            dd = d[small]
            hh = h[small]
            ss = s0[small]
            cc = c0[small]
            if trig == "sin":
                big_a[small] = hh * (ss + dd * cc / 2 - dd**2 * ss / 6 - dd**3 * cc / 24)
                big_b[small] = hh * hh * (ss / 2 + dd * cc / 3 - dd**2 * ss / 8 - dd**3 * cc / 30)
            else:
                big_a[small] = hh * (cc - dd * ss / 2 - dd**2 * cc / 6 + dd**3 * ss / 24)
                big_b[small] = hh * hh * (cc / 2 - dd * ss / 3 - dd**2 * cc / 8 + dd**3 * ss / 30)
        out[i] = np.sum(a * big_a + b * big_b)
    return out


def filon_sine_numpy(x, y, p):
    """integral sin(p t) * interp(y)(t) dt over the sampled range, per p."""
    return _filon_numpy(x, y, p, "sin")


def filon_cosine_numpy(x, y, p):
    return _filon_numpy(x, y, p, "cos")


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _assemble_dirichlet_nb(p, w, coeff, ct_weight):
        n = p.shape[0]
        m = np.empty((n, n))
        sw = np.sqrt(w)
        for i in range(n):
            for j in range(i, n):
                pij = p[i] if p[i] < p[j] else p[j]
                v = sw[i] * sw[j] * (coeff * pij + ct_weight * p[i] * p[j])
                m[i, j] = v
                m[j, i] = v
            m[i, i] += p[i] * p[i]
        return m

    @numba.njit(cache=True)
    def _assemble_neumann_nb(p, w, coeff, ct_weight):
        n = p.shape[0]
        m = np.empty((n, n))
        sw = np.sqrt(w)
        for i in range(n):
            for j in range(i, n):
                pij = p[i] if p[i] > p[j] else p[j]
                v = sw[i] * sw[j] * (-coeff * pij + ct_weight)
                m[i, j] = v
                m[j, i] = v
            m[i, i] += p[i] * p[i]
        return m

    @numba.njit(cache=True)
    def _filon_nb(x, y, p, sine):
        nseg = x.shape[0] - 1
        out = np.zeros(p.shape[0], dtype=y.dtype)
        for i in range(p.shape[0]):
            pp = p[i]
            acc = 0.0 * y[0]
            if pp == 0.0:
                if not sine:
                    for s in range(nseg):
                        h = x[s + 1] - x[s]
                        acc += h * 0.5 * (y[s] + y[s + 1])
                out[i] = acc
                continue
            for s in range(nseg):
                h = x[s + 1] - x[s]
                a = y[s]
                b = (y[s + 1] - y[s]) / h
                th0 = pp * x[s]
                d = pp * h
                s0 = np.sin(th0)
                c0 = np.cos(th0)
                if abs(d) < _SMALL_PHASE:
                    if sine:
                        big_a = h * (s0 + d * c0 / 2 - d * d * s0 / 6 - d * d * d * c0 / 24)
                        big_b = h * h * (s0 / 2 + d * c0 / 3 - d * d * s0 / 8 - d * d * d * c0 / 30)
                    else:
                        big_a = h * (c0 - d * s0 / 2 - d * d * c0 / 6 + d * d * d * s0 / 24)
                        big_b = h * h * (c0 / 2 - d * s0 / 3 - d * d * c0 / 8 + d * d * d * s0 / 30)
                else:
                    s1 = np.sin(th0 + d)
                    c1 = np.cos(th0 + d)
                    if sine:
                        big_a = (c0 - c1) / pp
                        big_b = (s1 - s0) / (pp * pp) - h * c1 / pp
                    else:
                        big_a = (s1 - s0) / pp
                        big_b = (c1 - c0) / (pp * pp) + h * s1 / pp
                acc += a * big_a + b * big_b
            out[i] = acc
        return out

    def assemble_dirichlet_numba(p, w, coeff, ct_weight):
        return _assemble_dirichlet_nb(
            np.ascontiguousarray(p, dtype=np.float64),
            np.ascontiguousarray(w, dtype=np.float64),
            float(coeff),
            float(ct_weight),
        )

    def assemble_neumann_numba(p, w, coeff, ct_weight):
        return _assemble_neumann_nb(
            np.ascontiguousarray(p, dtype=np.float64),
            np.ascontiguousarray(w, dtype=np.float64),
            float(coeff),
            float(ct_weight),
        )

    def _filon_numba(x, y, p, trig):
        y = np.asarray(y)
        dtype = np.complex128 if np.iscomplexobj(y) else np.float64
        return _filon_nb(
            np.ascontiguousarray(x, dtype=np.float64),
            np.ascontiguousarray(y, dtype=dtype),
            np.ascontiguousarray(p, dtype=np.float64),
            trig == "sin",
        )

    def filon_sine_numba(x, y, p):
        return _filon_numba(x, y, p, "sin")

    def filon_cosine_numba(x, y, p):
        return _filon_numba(x, y, p, "cos")


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if USING_NUMBA:
    assemble_dirichlet = assemble_dirichlet_numba
    assemble_neumann = assemble_neumann_numba
    filon_sine = filon_sine_numba
    filon_cosine = filon_cosine_numba
else:
    assemble_dirichlet = assemble_dirichlet_numpy
    assemble_neumann = assemble_neumann_numpy
    filon_sine = filon_sine_numpy
    filon_cosine = filon_cosine_numpy


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"
