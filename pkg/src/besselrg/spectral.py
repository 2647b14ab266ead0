"""Bound-state spectra: exact point spectra in the position representation,
the position <-> momentum parameter dictionaries, dense symmetric
eigen-solving, and the cutoff-convergence driver.

Exact spectra
-------------
With m = sqrt(alpha) canonical and kappa the ratio of the x^(1/2-m) to the
x^(1/2+m) boundary coefficient, the bound state at energy -k^2 carries
kappa(k) = Gamma(m)/Gamma(-m) * (k/2)^(-2m).  Inverting gives the single
liquid-phase energy -4 (kappa Gamma(-m)/Gamma(m))^(-1/m) for kappa < 0, its
multivalued continuation for imaginary m (the geometric ladder with ratio
e^(2 pi / m_I)), and -4 e^(2(nu - gamma)) at alpha = 0.
"""

from __future__ import annotations

import cmath
import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    BesselParameter,
    DatumKind,
    ExtensionParameter,
    GridScheme,
    MomentumGrid,
    Phase,
    Representation,
    classify_phase,
    make_grid,
)
from .errors import ConvergenceError, DomainError, UnsupportedError
from .momentum_op import assemble_cutoff
from .rgflow import FlowKind, coupling_for_extension
from .special import EULER_GAMMA, gamma_complex


class SpectrumSource(enum.Enum):
    EXACT_ORACLE = "exact"
    CUTOFF_NUMERIC = "numeric"


@dataclass(frozen=True)
class SpectrumReport:
    """Bound-state energies (descending, shallowest first) with provenance."""

    bound_energies: tuple
    source: SpectrumSource
    param: BesselParameter
    ext: ExtensionParameter | None
    cutoff: float | None = None
    n_nodes: int | None = None
    ladder_ratio: float | None = None          # solid phase only
    eigenvectors: np.ndarray | None = None     # grid-sampled psi columns, numeric only
    grid: MomentumGrid | None = None


DEFAULT_WINDOW = (-1e8, -1e-8)


def exact_point_spectrum(param: BesselParameter, ext: ExtensionParameter | None,
                         window=DEFAULT_WINDOW) -> SpectrumReport:
    """Exact bound-state energies of the selected realization.

    ``ext`` must be a position-representation datum (map momentum data with
    map_extension first).  ``window`` clips the solid-phase ladder.
    """
    phase = classify_phase(param)
    if phase in (Phase.GAS, Phase.BOUNDARY):
        if ext is not None:
            raise UnsupportedError("alpha >= 1 has a unique realization; pass ext=None")
        return SpectrumReport((), SpectrumSource.EXACT_ORACLE, param, None)
    if ext is None:
        raise DomainError("alpha < 1 requires an extension datum")
    if ext.representation is not Representation.POSITION:
        raise DomainError("exact_point_spectrum expects a position-representation datum")

    lo, hi = window
    if not (lo < hi <= 0.0 or hi < 0.0):
        raise DomainError("window must be a negative-energy interval (lo < hi < 0)")

    if phase is Phase.CRITICAL:
        if ext.kind is not DatumKind.NU:
            raise DomainError("alpha = 0 realizations carry the nu datum")
        if ext.is_infinite:
            return SpectrumReport((), SpectrumSource.EXACT_ORACLE, param, ext)
        energy = -4.0 * math.exp(2.0 * (ext.value - EULER_GAMMA))
        energies = (energy,) if lo <= energy <= hi else ()
        return SpectrumReport(energies, SpectrumSource.EXACT_ORACLE, param, ext)

    if phase is Phase.LIQUID:
        if ext.kind not in (DatumKind.KAPPA, DatumKind.UNDERLINED_KAPPA):
            raise DomainError("0 < alpha < 1 realizations carry a kappa datum")
        kappa = ext.value
        if not (kappa < 0.0) or math.isinf(kappa):
            return SpectrumReport((), SpectrumSource.EXACT_ORACLE, param, ext)
        m = param.m_value
        ratio = kappa * (gamma_complex(-m) / gamma_complex(m)).real
        energy = -4.0 * ratio ** (-1.0 / m)
        energies = (energy,) if lo <= energy <= hi else ()
        return SpectrumReport(energies, SpectrumSource.EXACT_ORACLE, param, ext)

    # solid phase: geometric ladder
    if ext.kind is not DatumKind.UNIMODULAR_KAPPA:
        raise DomainError("alpha < 0 realizations carry the unimodular kappa datum")
    mi = param.m_value
    kappa = complex(ext.value)
    # E_n = -4 exp((-arg(kappa Gamma(-i mI)/Gamma(i mI)) + 2 pi n)/mI): the
    # analytic continuation of the liquid formula (kappa ...)^(-1/m).
    theta = -cmath.phase(kappa * gamma_complex(complex(0.0, -mi))
                         / gamma_complex(complex(0.0, mi)))
    ladder_ratio = math.exp(2.0 * math.pi / mi)
    n_lo = math.ceil((math.log(-hi / 4.0) * mi - theta) / (2.0 * math.pi))
    n_hi = math.floor((math.log(-lo / 4.0) * mi - theta) / (2.0 * math.pi))
    energies = tuple(-4.0 * math.exp((theta + 2.0 * math.pi * n) / mi)
                     for n in range(n_lo, n_hi + 1))
    energies = tuple(sorted((e for e in energies if lo <= e <= hi), reverse=True))
    return SpectrumReport(energies, SpectrumSource.EXACT_ORACLE, param, ext,
                          ladder_ratio=ladder_ratio)


# ---------------------------------------------------------------------------
# parameter dictionaries (position <-> momentum)
# ---------------------------------------------------------------------------

def _kappa_dictionary_factor(param: BesselParameter, rep: Representation):
    """Multiplier of kappa in the position -> momentum map."""
    m = param.m
    if abs(param.alpha - 0.25) < 1e-14 and not param.is_imaginary:
        raise UnsupportedError("m = 1/2 is handled by the underlined-kappa dictionary")
    gm = gamma_complex(-0.5 - m) / gamma_complex(-0.5 + m)
    if rep is Representation.MOMENTUM_DIRICHLET:
        trig = cmath.sin(math.pi / 4.0 + math.pi * m / 2.0) / cmath.sin(math.pi / 4.0 - math.pi * m / 2.0)
    else:
        trig = cmath.cos(math.pi / 4.0 + math.pi * m / 2.0) / cmath.cos(math.pi / 4.0 - math.pi * m / 2.0)
    factor = trig * gm
    if not param.is_imaginary:
        return factor.real
    return factor


def _nu_shift(rep: Representation) -> float:
    base = -2.0 + EULER_GAMMA + math.log(4.0)
    return base + (math.pi / 2.0 if rep is Representation.MOMENTUM_DIRICHLET else -math.pi / 2.0)


def map_extension(ext: ExtensionParameter, to_rep: Representation,
                  param: BesselParameter) -> ExtensionParameter:
    """Translate a boundary datum between representations (Theorem-style
    dictionaries); round trips are identities and infinity maps to infinity.

    For alpha = 1/4 the underlined kappa equals the position kappa on the
    Dirichlet side and its inverse on the Neumann side (the canonical m
    flips sign between the two free Laplacians).
    """
    if abs(complex(param.m)) >= 1.0 and not param.is_imaginary:
        raise UnsupportedError("dictionaries require |m| < 1")
    to_rep = Representation(to_rep)
    if ext.representation is to_rep:
        return ext
    if ext.representation is not Representation.POSITION and to_rep is not Representation.POSITION:
        return map_extension(map_extension(ext, Representation.POSITION, param), to_rep, param)

    momentum_rep = to_rep if to_rep is not Representation.POSITION else ext.representation
    forward = to_rep is not Representation.POSITION  # position -> momentum

    if param.alpha == 0.0:
        if ext.kind is not DatumKind.NU:
            raise DomainError("alpha = 0 data carry nu")
        if ext.is_infinite:
            return ExtensionParameter(to_rep, DatumKind.NU, math.inf)
        # nu_t = -nu + shift in both directions (involutive up to the shift)
        value = -ext.value + _nu_shift(momentum_rep)
        return ExtensionParameter(to_rep, DatumKind.NU, value)

    if param.alpha == 0.25:
        if ext.kind not in (DatumKind.KAPPA, DatumKind.UNDERLINED_KAPPA):
            raise DomainError("alpha = 1/4 data carry kappa")
        value = ext.value
        if momentum_rep is Representation.MOMENTUM_NEUMANN:
            value = _extended_inverse(value)
        kind = DatumKind.UNDERLINED_KAPPA if forward else DatumKind.KAPPA
        return ExtensionParameter(to_rep, kind, value)

    expected = DatumKind.UNIMODULAR_KAPPA if param.is_imaginary else DatumKind.KAPPA
    if ext.kind is not expected:
        raise DomainError(f"datum kind {ext.kind.value} invalid for alpha = {param.alpha:g}")
    factor = _kappa_dictionary_factor(param, momentum_rep)
    if param.is_imaginary:
        value = complex(ext.value) * factor if forward else complex(ext.value) / factor
        return ExtensionParameter(to_rep, DatumKind.UNIMODULAR_KAPPA, value)
    if ext.is_infinite:
        return ExtensionParameter(to_rep, DatumKind.KAPPA, math.inf)
    value = ext.value * factor if forward else ext.value / factor
    return ExtensionParameter(to_rep, DatumKind.KAPPA, value)


def _extended_inverse(value: float) -> float:
    if math.isinf(value):
        return 0.0
    if value == 0.0:
        return math.inf
    return 1.0 / value


# ---------------------------------------------------------------------------
# eigensolver
# ---------------------------------------------------------------------------

def symmetric_eigensolve(matrix: np.ndarray, want_vectors: bool = True):
    """All eigenvalues (ascending) of a dense symmetric matrix, with
    optional orthonormal eigenvectors; LAPACK divide-and-conquer behind the
    spec's contract (backward error ~ machine precision * ||M||)."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError("matrix must be square")
    if not np.all(np.isfinite(matrix)):
        raise DomainError("matrix entries must be finite")
    try:
        if want_vectors:
            return np.linalg.eigh(matrix)
        return np.linalg.eigvalsh(matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"symmetric eigensolve failed: {exc}") from exc


# ---------------------------------------------------------------------------
# cutoff bound states and the convergence driver
# ---------------------------------------------------------------------------

def default_n_nodes(lam: float, p_min_factor: float = 1e-4) -> int:
    """Grid-size rule: constant resolution per log decade, floor 800."""
    decades = math.log10(1.0 / p_min_factor)
    return max(800, int(200.0 * decades))


def numeric_bound_states(flow: FlowKind, param: BesselParameter,
                         ext: ExtensionParameter, lam: float,
                         scheme: GridScheme = GridScheme.LOG_SPACED,
                         n_nodes: int | None = None,
                         p_min_factor: float = 1e-4,
                         drop_cutoff_artifacts: bool = True) -> SpectrumReport:
    """Bound states of the assembled cutoff Hamiltonian at cutoff lam.

    Position-representation data are mapped to the flow's momentum side.
    Negative eigenvalues below the spurious-negative threshold are reported
    shallowest first, with eigenvectors (grid-sampled, L2-normalized,
    positive at their largest node).  Two validity filters apply:

    * solid phase: only 100 |E| <= Lambda^2 (deeper states are
      cutoff-distorted) and |E| >= (10 p_min)^2 (shallower ones are below
      the infrared resolution of the grid);
    * states with most of their mass within a factor 4 of the cutoff are
      discretization artifacts of the counterterm and are dropped when
      drop_cutoff_artifacts is set.
    """
    momentum_rep = (Representation.MOMENTUM_DIRICHLET if flow is FlowKind.DIRICHLET
                    else Representation.MOMENTUM_NEUMANN)
    if ext.representation is not momentum_rep:
        ext = map_extension(ext, momentum_rep, param)
    if n_nodes is None:
        n_nodes = default_n_nodes(lam, p_min_factor)
    grid = make_grid(lam, n_nodes, scheme, p_min_factor)
    coupling = coupling_for_extension(flow, param, ext, lam)
    ham = assemble_cutoff(grid, flow, param, coupling)
    evals, evecs = symmetric_eigensolve(ham.matrix)

    norm = float(np.max(np.abs(evals)))
    threshold = -1e3 * np.finfo(float).eps * norm
    keep = evals < threshold
    energies = evals[keep]
    vectors = evecs[:, keep]

    if drop_cutoff_artifacts and energies.size:
        uv_mass = np.sum(vectors[grid.nodes > lam / 4.0, :] ** 2, axis=0)
        phys = uv_mass < 0.5
        energies, vectors = energies[phys], vectors[:, phys]

    if classify_phase(param) is Phase.SOLID and energies.size:
        ok = (100.0 * np.abs(energies) <= lam ** 2) & \
             (np.abs(energies) >= (10.0 * grid.nodes[0]) ** 2)
        energies, vectors = energies[ok], vectors[:, ok]

    order = np.argsort(energies)[::-1]  # shallowest first
    energies = energies[order]
    vectors = vectors[:, order]

    # grid-sampled functions psi_i = v_i / sqrt(w_i), unit discrete L2 norm,
    # positive at the node where |psi| peaks
    psi = vectors / np.sqrt(grid.weights)[:, None]
    for j in range(psi.shape[1]):
        peak = int(np.argmax(np.abs(psi[:, j])))
        if psi[peak, j] < 0.0:
            psi[:, j] = -psi[:, j]
        psi[:, j] /= math.sqrt(float(np.sum(grid.weights * psi[:, j] ** 2)))

    return SpectrumReport(tuple(float(e) for e in energies),
                          SpectrumSource.CUTOFF_NUMERIC, param, ext,
                          cutoff=lam, n_nodes=n_nodes,
                          eigenvectors=psi, grid=grid)


def fit_tail_exponent(grid: MomentumGrid, psi: np.ndarray, p_lo: float, p_hi: float) -> float:
    """Least-squares slope of log|psi| against log p over [p_lo, p_hi]."""
    mask = (grid.nodes >= p_lo) & (grid.nodes <= p_hi) & (np.abs(psi) > 0.0)
    if np.count_nonzero(mask) < 4:
        raise DomainError("tail fit window contains too few nodes")
    return float(np.polyfit(np.log(grid.nodes[mask]), np.log(np.abs(psi[mask])), 1)[0])


@dataclass(frozen=True)
class ConvergenceRow:
    lam: float
    energy_numeric: float
    energy_exact: float
    rel_err: float


def _max_threads() -> int:
    env = os.environ.get("BESSELRG_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def convergence_study(flow: FlowKind, param: BesselParameter,
                      ext: ExtensionParameter, lam_ladder,
                      scheme: GridScheme = GridScheme.LOG_SPACED,
                      n_nodes: int | None = None,
                      p_min_factor: float = 1e-4):
    """Ground-state energy of the cutoff matrix along a cutoff ladder against
    the exact oracle.  Rows are ordered by cutoff; entries are computed in
    parallel (BESSELRG_THREADS caps the pool).
    """
    position = ext if ext.representation is Representation.POSITION else \
        map_extension(ext, Representation.POSITION, param)
    exact = exact_point_spectrum(param, position)
    if not exact.bound_energies:
        energy_exact = math.nan
    else:
        energy_exact = min(exact.bound_energies)  # deepest in window

    lam_ladder = [float(l) for l in lam_ladder]

    def one(lam):
        report = numeric_bound_states(flow, param, ext, lam, scheme=scheme,
                                      n_nodes=n_nodes, p_min_factor=p_min_factor)
        if report.bound_energies:
            e_num = min(report.bound_energies)
        else:
            e_num = math.nan
        rel = abs(e_num - energy_exact) / abs(energy_exact) if energy_exact else math.nan
        return ConvergenceRow(lam, e_num, energy_exact, rel)

    with ThreadPoolExecutor(max_workers=_max_threads()) as pool:
        rows = list(pool.map(one, lam_ladder))
    return rows


def monotone_within_noise(rows, noise_factor: float = 1.1, validity_factor: float = 100.0) -> bool:
    """True when rel_err is non-increasing (within the noise factor) along
    the ladder, restricted to cutoffs with Lambda^2 >= 100 |E_exact|."""
    prev = None
    for row in rows:
        if math.isnan(row.rel_err):
            return False
        if row.lam ** 2 < validity_factor * abs(row.energy_exact):
            continue
        if prev is not None and row.rel_err > noise_factor * prev:
            return False
        prev = row.rel_err
    return True
