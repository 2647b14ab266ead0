"""Domain types shared by all modules: coupling parameter, phases, boundary
data, momentum grids, and the scaling action.

Conventions
-----------
The operator family is -d^2/dx^2 + (alpha - 1/4)/x^2 on (0, inf).  We write
m = sqrt(alpha): real and >= 0 for alpha >= 0, purely imaginary with positive
imaginary part for alpha < 0.  Boundary data are stored in the canonical
labelling with m >= 0 (real case), using the identification that the
realization labelled (m, kappa) equals the one labelled (-m, 1/kappa).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


class Phase(enum.Enum):
    """Phase of the coupling constant alpha (one value per alpha regime)."""

    GAS = "gas"            # alpha > 1: unique self-adjoint realization
    BOUNDARY = "boundary"  # alpha = 1: edge of the one-parameter family
    LIQUID = "liquid"      # 0 < alpha < 1: two flow fixed points
    CRITICAL = "critical"  # alpha = 0: single degenerate fixed point
    SOLID = "solid"        # alpha < 0: limit cycle, geometric bound-state ladder


@dataclass(frozen=True)
class BesselParameter:
    """Coupling alpha and its square root m (real or purely imaginary)."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be finite, got {self.alpha}")

    @property
    def is_imaginary(self) -> bool:
        """True when m is purely imaginary (alpha < 0)."""
        return self.alpha < 0.0

    @property
    def m_value(self) -> float:
        """m for alpha >= 0, the positive imaginary part m_I for alpha < 0."""
        return math.sqrt(abs(self.alpha))

    @property
    def m(self) -> complex:
        """m = sqrt(alpha) as a complex number (canonical branch)."""
        if self.is_imaginary:
            return complex(0.0, self.m_value)
        return complex(self.m_value, 0.0)


def classify_phase(param: BesselParameter) -> Phase:
    """Total classification of alpha into the five phase regimes."""
    a = param.alpha
    if a < 0.0:
        return Phase.SOLID
    if a == 0.0:
        return Phase.CRITICAL
    if a < 1.0:
        return Phase.LIQUID
    if a == 1.0:
        return Phase.BOUNDARY
    return Phase.GAS


class Representation(enum.Enum):
    POSITION = "position"
    MOMENTUM_DIRICHLET = "momentum-dirichlet"
    MOMENTUM_NEUMANN = "momentum-neumann"


class DatumKind(enum.Enum):
    """Which boundary-condition parameter an ExtensionParameter carries."""

    KAPPA = "kappa"                      # real extended kappa, 0 < m < 1, m != 1/2
    UNIMODULAR_KAPPA = "unimodular"      # |kappa| = 1, imaginary m
    NU = "nu"                            # real extended nu, m = 0
    UNDERLINED_KAPPA = "underlined"      # real extended kappa, alpha = 1/4


@dataclass(frozen=True)
class ExtensionParameter:
    """Boundary-condition datum selecting one self-adjoint realization.

    ``value`` is a float (math.inf allowed for the extended-real data) or a
    unit-modulus complex number for the alpha < 0 family.  The representation
    records whether the datum lives on the position side or on one of the two
    momentum sides (where the kappa/nu dictionaries differ).
    """

    representation: Representation
    kind: DatumKind
    value: complex | float

    def __post_init__(self):
        v = self.value
        if self.kind is DatumKind.UNIMODULAR_KAPPA:
            v = complex(v)
            if not math.isclose(abs(v), 1.0, rel_tol=0, abs_tol=1e-9):
                raise DomainError(f"unimodular kappa must satisfy |kappa| = 1, got |{v}| = {abs(v)}")
            object.__setattr__(self, "value", v / abs(v))
        else:
            if isinstance(v, complex):
                if v.imag != 0.0:
                    raise DomainError(f"{self.kind.value} datum must be real, got {v}")
                v = v.real
            object.__setattr__(self, "value", float(v))

    @property
    def is_infinite(self) -> bool:
        return self.kind is not DatumKind.UNIMODULAR_KAPPA and math.isinf(self.value)


def kappa_extension(kappa, representation=Representation.POSITION) -> ExtensionParameter:
    return ExtensionParameter(representation, DatumKind.KAPPA, kappa)


def unimodular_extension(kappa, representation=Representation.POSITION) -> ExtensionParameter:
    return ExtensionParameter(representation, DatumKind.UNIMODULAR_KAPPA, kappa)


def nu_extension(nu, representation=Representation.POSITION) -> ExtensionParameter:
    return ExtensionParameter(representation, DatumKind.NU, nu)


def underlined_extension(kappa, representation=Representation.POSITION) -> ExtensionParameter:
    return ExtensionParameter(representation, DatumKind.UNDERLINED_KAPPA, kappa)


def canonicalize_datum(m_signed: complex, value):
    """Map the label (m, datum) to the canonical one with m >= 0.

    The realization labelled (m, kappa) is the realization labelled
    (-m, 1/kappa), so a negative-branch m flips kappa to its inverse
    (complex conjugate on the unimodular family).  Returns the canonical
    (m, datum) pair; m = 0 data pass through unchanged.
    """
    m = complex(m_signed)
    if m.real != 0.0 and m.imag != 0.0:
        raise DomainError("m must be real or purely imaginary")
    if m.real > 0.0 or m.imag > 0.0 or m == 0.0:
        return m_signed, value
    flipped = -m_signed if isinstance(m_signed, complex) else abs(m_signed)
    if isinstance(value, complex) and value.imag != 0.0:
        inv = 1.0 / value
    elif math.isinf(value):
        inv = 0.0
    elif value == 0.0:
        inv = math.inf
    else:
        inv = 1.0 / value
    return flipped, inv


class GridScheme(enum.Enum):
    UNIFORM = "uniform"
    LOG_SPACED = "log"
    GAUSS_LEGENDRE = "gauss"


@dataclass(frozen=True)
class MomentumGrid:
    """Quadrature grid on (0, cutoff] for Nystrom discretization.

    nodes are strictly ascending positive momenta, weights the matching
    quadrature weights (so sum(weights) approximates cutoff - nodes[0]).
    """

    nodes: np.ndarray
    weights: np.ndarray
    cutoff: float
    scheme: GridScheme = field(default=GridScheme.LOG_SPACED)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise DomainError("nodes and weights must be matching 1-d arrays")
        if nodes[0] <= 0.0:
            raise DomainError("grid nodes must be positive")
        if np.any(np.diff(nodes) <= 0.0):
            raise DomainError("grid nodes must be strictly ascending")
        if nodes[-1] > self.cutoff * (1.0 + 1e-12):
            raise DomainError("grid nodes must not exceed the cutoff")
        if np.any(weights <= 0.0):
            raise DomainError("quadrature weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return self.nodes.size


def uniform_grid(cutoff: float, n: int) -> MomentumGrid:
    """Midpoint rule on (0, cutoff] with n nodes."""
    h = cutoff / n
    nodes = (np.arange(n) + 0.5) * h
    return MomentumGrid(nodes, np.full(n, h), cutoff, GridScheme.UNIFORM)


def log_grid(cutoff: float, n: int, p_min_factor: float = 1e-4) -> MomentumGrid:
    """Trapezoid rule in log momentum from p_min_factor*cutoff up to cutoff.

    The default floor of 1e-4 * cutoff gives four decades of resolution;
    solid-phase runs that must resolve shallow ladder states lower it.
    """
    if not 0.0 < p_min_factor < 1.0:
        raise DomainError("p_min_factor must lie in (0, 1)")
    u = np.linspace(math.log(p_min_factor * cutoff), math.log(cutoff), n)
    nodes = np.exp(u)
    du = u[1] - u[0]
    weights = nodes * du
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return MomentumGrid(nodes, weights, cutoff, GridScheme.LOG_SPACED)


def gauss_grid(cutoff: float, n: int) -> MomentumGrid:
    """Gauss-Legendre rule mapped to [0, cutoff]."""
    x, w = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * cutoff * (x + 1.0)
    return MomentumGrid(nodes, 0.5 * cutoff * w, cutoff, GridScheme.GAUSS_LEGENDRE)


def make_grid(cutoff, n, scheme=GridScheme.LOG_SPACED, p_min_factor=1e-4) -> MomentumGrid:
    scheme = GridScheme(scheme)
    if scheme is GridScheme.UNIFORM:
        return uniform_grid(cutoff, n)
    if scheme is GridScheme.GAUSS_LEGENDRE:
        return gauss_grid(cutoff, n)
    return log_grid(cutoff, n, p_min_factor)


def scale_grid(grid: MomentumGrid, tau: float) -> MomentumGrid:
    """Dilate a grid: nodes, weights and cutoff all scale by e^tau."""
    s = math.exp(tau)
    return MomentumGrid(grid.nodes * s, grid.weights * s, grid.cutoff * s, grid.scheme)
