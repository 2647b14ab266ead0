"""Bessel operators -d^2/dx^2 + (alpha - 1/4)/x^2 in the momentum
representation: cutoff Hamiltonians with running counterterms, RG coupling
flows, exact and numerical bound-state spectra, and half-line Fourier
analysis with analytic tail handling."""

from .core import (
    BesselParameter,
    DatumKind,
    ExtensionParameter,
    GridScheme,
    MomentumGrid,
    Phase,
    Representation,
    canonicalize_datum,
    classify_phase,
    gauss_grid,
    kappa_extension,
    log_grid,
    make_grid,
    nu_extension,
    scale_grid,
    underlined_extension,
    uniform_grid,
    unimodular_extension,
)
from .errors import (
    BesselRGError,
    BlowUpError,
    ConfigError,
    ConvergenceError,
    DomainError,
    ExponentError,
    NonConvergenceError,
    PoleError,
    TailExponentError,
    TailMismatchError,
    UnsupportedError,
)
from .halfline_fourier import (
    SampledFunction,
    cosine_transform,
    homogeneous_transform_closed_form,
    oscillatory_integral,
    sine_transform,
    tail_antiderivatives,
)
from .momentum_op import (
    CutoffHamiltonian,
    TailFunction,
    TailKind,
    apply_maximal,
    assemble_cutoff,
    counterterm_matrix,
    kernel_min_max,
)
from .rgflow import (
    CouplingTrajectory,
    FixedPointReport,
    FlowKind,
    Stability,
    closed_form_coupling,
    coupling_for_extension,
    fixed_points,
    flow_rhs,
    integrate_flow,
    integrate_flow_restarting,
    next_blowup,
    wilson_gamma_equivalence,
)
from .special import EULER_GAMMA, euler_gamma, gamma_complex, macdonald_k
from .spectral import (
    SpectrumReport,
    SpectrumSource,
    convergence_study,
    exact_point_spectrum,
    fit_tail_exponent,
    map_extension,
    monotone_within_noise,
    numeric_bound_states,
    symmetric_eigensolve,
)

__version__ = "0.1.0"
