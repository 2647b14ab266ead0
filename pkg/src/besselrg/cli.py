"""Command-line front end: reproducible experiment drivers emitting CSV/JSON.

Subcommands: flow, fixed-points, spectrum, converge, transform, phase-diagram.
A JSON config file (--config) may carry any option under a top-level
"command"; explicit CLI flags override file values.  Exit codes: 0 success,
1 config error, 2 numerical-domain event (blow-up / failed monotonicity)
with partial results written.

Output is byte-deterministic: floats are formatted with 17 significant
digits, rows have a fixed order, CSV uses comma separators and LF endings,
JSON is emitted with sorted keys.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import (
    BesselParameter,
    DatumKind,
    ExtensionParameter,
    GridScheme,
    Phase,
    Representation,
    classify_phase,
)
from .errors import BesselRGError, BlowUpError, ConfigError
from .halfline_fourier import (
    SampledFunction,
    cosine_transform,
    homogeneous_transform_closed_form,
    sine_transform,
)
from .rgflow import (
    CouplingTrajectory,
    FlowKind,
    fixed_points,
    integrate_flow_restarting,
)
from .spectral import (
    convergence_study,
    exact_point_spectrum,
    map_extension,
    monotone_within_noise,
    numeric_bound_states,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2


def fmt(x) -> str:
    """Fixed 17-significant-digit float formatting (byte-deterministic)."""
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return f"{x:.17g}"
    return str(x)


@dataclass
class RunConfig:
    """Validated parameters of one CLI run."""

    command: str
    alpha: float | None = None
    flow: str = "dirichlet"
    representation: str = "position"
    kappa: str | None = None
    nu: float | None = None
    lambda_0: float = 1.0
    value_0: float | None = None
    lambda_ladder: list = field(default_factory=list)
    n_points: int = 41
    grid: str = "log"
    n_nodes: int | None = None
    p_min_factor: float = 1e-4
    rel_tol: float = 1e-10
    mode: str = "both"          # spectrum: exact | numeric | both
    window: list = field(default_factory=lambda: [-1e8, -1e-8])
    function: str = "exp"       # transform: exp | power
    transform_kind: str = "sine"
    lambda_exponent: float = -0.5
    p_nodes: list = field(default_factory=lambda: [0.5, 1.0, 2.0, 5.0])
    alphas: list = field(default_factory=list)
    out: str | None = None
    format: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        if "command" not in data:
            raise ConfigError("config file must carry a top-level 'command'")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


_FLOWS = {"dirichlet": FlowKind.DIRICHLET, "neumann": FlowKind.NEUMANN}
_GRIDS = {"uniform": GridScheme.UNIFORM, "log": GridScheme.LOG_SPACED,
          "gauss": GridScheme.GAUSS_LEGENDRE}
_REPS = {"position": Representation.POSITION,
         "momentum-dirichlet": Representation.MOMENTUM_DIRICHLET,
         "momentum-neumann": Representation.MOMENTUM_NEUMANN}


def _parse_kappa(token: str):
    token = token.strip().lower()
    if token in ("inf", "+inf", "infinity"):
        return math.inf
    if token == "-inf":
        return -math.inf
    try:
        return float(token)
    except ValueError:
        pass
    try:
        return complex(token.replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"cannot parse kappa token {token!r}") from exc


def _extension_from_config(cfg: RunConfig, param: BesselParameter) -> ExtensionParameter:
    rep = _REPS[cfg.representation]
    phase = classify_phase(param)
    if phase is Phase.CRITICAL:
        if cfg.nu is None:
            raise ConfigError("alpha = 0 needs --nu")
        return ExtensionParameter(rep, DatumKind.NU, cfg.nu)
    if cfg.kappa is None:
        raise ConfigError("this alpha needs --kappa")
    kappa = _parse_kappa(str(cfg.kappa))
    if phase is Phase.SOLID:
        if isinstance(kappa, float) and math.isinf(kappa):
            raise ConfigError("alpha < 0 needs a unit-modulus kappa")
        kappa = complex(kappa)
        if not math.isclose(abs(kappa), 1.0, rel_tol=0, abs_tol=1e-8):
            raise ConfigError(f"alpha < 0 needs |kappa| = 1, got {abs(kappa):g}")
        return ExtensionParameter(rep, DatumKind.UNIMODULAR_KAPPA, kappa)
    if isinstance(kappa, complex):
        raise ConfigError("alpha >= 0 needs a real (or inf) kappa")
    kind = DatumKind.UNDERLINED_KAPPA if param.alpha == 0.25 and rep is not Representation.POSITION \
        else DatumKind.KAPPA
    return ExtensionParameter(rep, kind, kappa)


def _validate_common(cfg: RunConfig):
    if cfg.command in ("flow", "fixed-points", "spectrum", "converge"):
        if cfg.alpha is None:
            raise ConfigError(f"{cfg.command} needs --alpha")
    if cfg.command in ("spectrum", "converge") and cfg.alpha is not None and cfg.alpha >= 1.0:
        raise ConfigError("spectral commands need alpha < 1")
    if cfg.flow not in _FLOWS:
        raise ConfigError(f"unknown flow kind {cfg.flow!r}")
    if cfg.grid not in _GRIDS:
        raise ConfigError(f"unknown grid scheme {cfg.grid!r}")
    if cfg.representation not in _REPS:
        raise ConfigError(f"unknown representation {cfg.representation!r}")
    if cfg.lambda_ladder:
        ladder = [float(x) for x in cfg.lambda_ladder]
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("lambda ladder must be strictly ascending")
        if ladder[0] <= 0.0:
            raise ConfigError("lambda ladder must be positive")


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _require_format(cfg: RunConfig, allowed):
    chosen = cfg.format or allowed[0]
    if chosen not in allowed:
        raise ConfigError(f"command {cfg.command} supports formats {allowed}, got {chosen!r}")
    return chosen


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_flow(cfg: RunConfig) -> int:
    """Trajectory CSV: closed form vs ODE integration per ladder cutoff.

    The ODE column restarts across blow-ups (reciprocal-chart crossing); a
    ladder point landing on a blow-up itself stops the ladder with exit 2
    and partial output.
    """
    _require_format(cfg, ["csv"])
    if cfg.value_0 is None:
        raise ConfigError("flow needs --value-0 (initial coupling)")
    param = BesselParameter(cfg.alpha)
    flow = _FLOWS[cfg.flow]
    init = (cfg.lambda_0, cfg.value_0)
    if cfg.lambda_ladder:
        ladder = [float(x) for x in cfg.lambda_ladder]
    else:
        ladder = list(np.geomspace(cfg.lambda_0, cfg.lambda_0 * 1e3, cfg.n_points))

    rows = []
    code = EXIT_OK
    trajectory = CouplingTrajectory(flow, param, cfg.lambda_0, cfg.value_0)
    for lam in ladder:
        try:
            closed = trajectory.value(lam)
            _, ode_vals = integrate_flow_restarting(flow, param, init, [lam],
                                                    rel_tol=cfg.rel_tol)
            ode = float(ode_vals[-1])
        except BlowUpError:
            code = EXIT_NUMERIC
            break
        rows.append((lam, closed, ode, abs(closed - ode)))
    _emit(_csv(["lambda", "closed_form", "ode_numeric", "abs_diff"], rows), cfg.out)
    return code


def cmd_fixed_points(cfg: RunConfig) -> int:
    _require_format(cfg, ["json"])
    param = BesselParameter(cfg.alpha)
    report = fixed_points(_FLOWS[cfg.flow], param)
    payload = {
        "alpha": cfg.alpha,
        "flow": cfg.flow,
        "phase": classify_phase(param).value,
        "fixed_points": [
            {"value": v, "stability": s.value}
            for v, s in zip(report.values, report.stability)
        ],
        "cycle_period": report.cycle_period,
    }
    _emit(_json_text(payload), cfg.out)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    chosen = _require_format(cfg, ["csv", "json"])
    param = BesselParameter(cfg.alpha)
    ext = _extension_from_config(cfg, param)
    window = tuple(float(x) for x in cfg.window)
    rows = []
    position_ext = ext if ext.representation is Representation.POSITION else \
        map_extension(ext, Representation.POSITION, param)
    exact = exact_point_spectrum(param, position_ext, window=window)
    if cfg.mode in ("exact", "both"):
        for e in exact.bound_energies:
            rows.append(("exact", e, 0.0))
    code = EXIT_OK
    if cfg.mode in ("numeric", "both"):
        lam = float(cfg.lambda_ladder[-1]) if cfg.lambda_ladder else 100.0
        try:
            numeric = numeric_bound_states(_FLOWS[cfg.flow], param, ext, lam,
                                           scheme=_GRIDS[cfg.grid],
                                           n_nodes=cfg.n_nodes,
                                           p_min_factor=cfg.p_min_factor)
        except BlowUpError:
            numeric = None
            code = EXIT_NUMERIC
        if numeric is not None:
            exact_sorted = sorted(exact.bound_energies)
            for e in numeric.bound_energies:
                rel = min((abs(e - ex) / abs(ex) for ex in exact_sorted), default=math.nan)
                rows.append(("numeric", e, rel))
    if chosen == "csv":
        _emit(_csv(["source", "energy", "rel_err"], rows), cfg.out)
    else:
        payload = {
            "alpha": cfg.alpha,
            "flow": cfg.flow,
            "rows": [{"source": s, "energy": e, "rel_err": r} for s, e, r in rows],
        }
        _emit(_json_text(payload), cfg.out)
    return code


def cmd_converge(cfg: RunConfig) -> int:
    _require_format(cfg, ["csv"])
    if not cfg.lambda_ladder:
        raise ConfigError("converge needs --lambda-ladder")
    param = BesselParameter(cfg.alpha)
    ext = _extension_from_config(cfg, param)
    rows = convergence_study(_FLOWS[cfg.flow], param, ext,
                             [float(x) for x in cfg.lambda_ladder],
                             scheme=_GRIDS[cfg.grid], n_nodes=cfg.n_nodes,
                             p_min_factor=cfg.p_min_factor)
    table = [(r.lam, r.energy_numeric, r.energy_exact, r.rel_err) for r in rows]
    _emit(_csv(["lambda", "E_numeric", "E_exact", "rel_err"], table), cfg.out)
    return EXIT_OK if monotone_within_noise(rows) else EXIT_NUMERIC


def _transform_reference(cfg: RunConfig, p: np.ndarray):
    root = math.sqrt(2.0 / math.pi)
    if cfg.function == "exp":
        if cfg.transform_kind == "sine":
            return root * p / (p * p + 1.0)
        return root / (p * p + 1.0)
    c = homogeneous_transform_closed_form(cfg.transform_kind, cfg.lambda_exponent)
    return c * p ** (-cfg.lambda_exponent - 1.0)


def cmd_transform(cfg: RunConfig) -> int:
    _require_format(cfg, ["csv"])
    if cfg.transform_kind not in ("sine", "cosine"):
        raise ConfigError("transform kind must be sine or cosine")
    if cfg.function not in ("exp", "power"):
        raise ConfigError("transform function must be exp or power")
    p = np.asarray([float(x) for x in cfg.p_nodes], dtype=float)
    if cfg.function == "exp":
        x = np.linspace(0.0, 45.0, 60001)
        f = SampledFunction(x, np.exp(-x))
    else:
        lam = cfg.lambda_exponent
        x = np.geomspace(1e-8, 1.0, 4001)
        f = SampledFunction(x, x ** lam, tail_exponent=lam, tail_coeff=1.0)
    transform = sine_transform if cfg.transform_kind == "sine" else cosine_transform
    got = transform(f, p).values.real
    ref = _transform_reference(cfg, p)
    rows = [(pp, g, r, abs(g - r)) for pp, g, r in zip(p, got, ref)]
    _emit(_csv(["p", "numeric", "reference", "abs_err"], rows), cfg.out)
    return EXIT_OK


_BOUND_COUNT = {
    Phase.SOLID: "infinite",
    Phase.CRITICAL: "zero-or-one",
    Phase.LIQUID: "zero-or-one",
    Phase.BOUNDARY: "zero",
    Phase.GAS: "zero",
}


def cmd_phase_diagram(cfg: RunConfig) -> int:
    _require_format(cfg, ["json"])
    if not cfg.alphas:
        raise ConfigError("phase-diagram needs --alphas")
    flow = _FLOWS[cfg.flow]

    def one(alpha):
        param = BesselParameter(float(alpha))
        phase = classify_phase(param)
        report = fixed_points(flow, param)
        return {
            "alpha": float(alpha),
            "phase": phase.value,
            "realizations": "unique" if phase in (Phase.GAS, Phase.BOUNDARY)
                            else "one-parameter family",
            "fixed_points": [
                {"value": v, "stability": s.value}
                for v, s in zip(report.values, report.stability)
            ],
            "cycle_period": report.cycle_period,
            "bound_state_count": _BOUND_COUNT[phase],
        }

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        entries = list(pool.map(one, cfg.alphas))
    _emit(_json_text({"flow": cfg.flow, "entries": entries}), cfg.out)
    return EXIT_OK


def _threads() -> int:
    env = os.environ.get("BESSELRG_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_COMMANDS = {
    "flow": cmd_flow,
    "fixed-points": cmd_fixed_points,
    "spectrum": cmd_spectrum,
    "converge": cmd_converge,
    "transform": cmd_transform,
    "phase-diagram": cmd_phase_diagram,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="besselrg",
        description="Inverse-square Schrodinger operators in the momentum "
                    "representation: RG flows, cutoff spectra, transforms.")
    sub = parser.add_subparsers(dest="command")
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--flow", choices=sorted(_FLOWS), default=None)
        p.add_argument("--representation", choices=sorted(_REPS), default=None)
        p.add_argument("--kappa", type=str, default=None)
        p.add_argument("--nu", type=float, default=None)
        p.add_argument("--lambda-0", dest="lambda_0", type=float, default=None)
        p.add_argument("--value-0", dest="value_0", type=float, default=None)
        p.add_argument("--lambda-ladder", dest="lambda_ladder", type=str, default=None,
                       help="comma-separated ascending cutoffs")
        p.add_argument("--n-points", dest="n_points", type=int, default=None)
        p.add_argument("--grid", choices=sorted(_GRIDS), default=None)
        p.add_argument("--n-nodes", dest="n_nodes", type=int, default=None)
        p.add_argument("--p-min-factor", dest="p_min_factor", type=float, default=None)
        p.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
        p.add_argument("--mode", choices=["exact", "numeric", "both"], default=None)
        p.add_argument("--window", type=str, default=None,
                       help="energy window lo,hi (negative)")
        p.add_argument("--function", choices=["exp", "power"], default=None)
        p.add_argument("--transform-kind", dest="transform_kind",
                       choices=["sine", "cosine"], default=None)
        p.add_argument("--lambda-exponent", dest="lambda_exponent", type=float, default=None)
        p.add_argument("--p-nodes", dest="p_nodes", type=str, default=None)
        p.add_argument("--alphas", type=str, default=None,
                       help="comma-separated alpha list")
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--format", choices=["csv", "json"], default=None)
    return parser


_LIST_FIELDS = {"lambda_ladder", "p_nodes", "alphas", "window"}


def _merge_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = RunConfig.from_json(fh.read())
        if cfg.command != args.command:
            raise ConfigError(
                f"config command {cfg.command!r} does not match CLI {args.command!r}")
    else:
        cfg = RunConfig(command=args.command)
    for name in vars(args):
        if name in ("config", "command"):
            continue
        value = getattr(args, name)
        if value is None:
            continue
        if name in _LIST_FIELDS and isinstance(value, str):
            value = [float(tok) for tok in value.split(",") if tok.strip()]
        setattr(cfg, name, value)
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_CONFIG
    try:
        cfg = _merge_config(args)
        _validate_common(cfg)
        return _COMMANDS[cfg.command](cfg)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"numerical event: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BesselRGError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
