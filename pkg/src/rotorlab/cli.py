"""Batch command-line front end.

    rotorlab spectrum --config run.json [overrides]
    rotorlab scan     --config run.json [overrides]
    rotorlab geodesic --config run.json [overrides]
    rotorlab hj       --config run.json [overrides]
    rotorlab check    [--json] [--perturb NAME]

Configuration is a single JSON document; command-line flags override file
values.  Unknown keys are rejected.  Every run emits the fully-resolved
effective configuration: embedded under "config" for JSON output, as a
"<path>.config.json" sidecar for CSV output.  Output is deterministic:
identical configuration produces byte-identical files (floats are written
in shortest round-trip form, no timestamps).

Exit codes: 0 success, 1 invariant failure (check), 2 configuration error,
3 solver failure, 4 dynamics halt (pole approach / rejected step).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import check as check_mod
from . import classical, spectral
from .errors import ConfigError, PoleApproach, RotorlabError, StepRejected
from .geometry import Manifold, ManifoldSpec, RotorParams
from .operators import PotentialKind, PotentialSpec
from .spectral import Grid, NormConvention

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_DYNAMICS = 4

_SCHEMA = {
    "manifold": {"kind", "R", "L"},
    "rotor": {"M", "I", "hbar", "sig"},
    "potential": {"kind", "V0", "theta", "values"},
    "grid": {"n", "theta_max"},
    "quantum": {"m", "s", "m_range", "s_range"},
    "solver": {"k", "norm"},
    "output": {"format", "path"},
    "geodesic": {"state0", "dt", "steps"},
    "hj": {"E", "mu", "sigma", "theta_max"},
}


def _fmt(v) -> str:
    """Shortest round-trip decimal for floats, plain text otherwise."""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _validate_schema(cfg: dict) -> None:
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a JSON object")
    for key, block in cfg.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown configuration key: {key!r}")
        if not isinstance(block, dict):
            raise ConfigError(f"configuration block {key!r} must be an object")
        unknown = set(block) - _SCHEMA[key]
        if unknown:
            raise ConfigError(f"unknown keys in {key!r}: {sorted(unknown)}")


def _merged_config(args) -> dict:
    cfg = {}
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    _validate_schema(cfg)

    def put(block, key, value):
        if value is not None:
            cfg.setdefault(block, {})[key] = value

    put("manifold", "kind", getattr(args, "manifold", None))
    put("manifold", "R", getattr(args, "R", None))
    put("manifold", "L", getattr(args, "L", None))
    put("rotor", "M", getattr(args, "M", None))
    put("rotor", "I", getattr(args, "I", None))
    put("rotor", "hbar", getattr(args, "hbar", None))
    put("rotor", "sig", getattr(args, "sig", None))
    put("potential", "kind", getattr(args, "potential", None))
    put("potential", "V0", getattr(args, "V0", None))
    put("grid", "n", getattr(args, "n", None))
    put("grid", "theta_max", getattr(args, "grid_theta_max", None))
    put("quantum", "m", getattr(args, "m", None))
    put("quantum", "s", getattr(args, "s", None))
    put("quantum", "m_range", getattr(args, "m_range", None))
    put("quantum", "s_range", getattr(args, "s_range", None))
    put("solver", "k", getattr(args, "k", None))
    put("solver", "norm", getattr(args, "norm", None))
    put("output", "format", getattr(args, "format", None))
    put("output", "path", getattr(args, "output", None))
    put("geodesic", "state0", getattr(args, "state0", None))
    put("geodesic", "dt", getattr(args, "dt", None))
    put("geodesic", "steps", getattr(args, "steps", None))
    put("hj", "E", getattr(args, "E", None))
    put("hj", "mu", getattr(args, "mu", None))
    put("hj", "sigma", getattr(args, "sigma", None))
    put("hj", "theta_max", getattr(args, "hj_theta_max", None))
    _validate_schema(cfg)
    return cfg


def _build_manifold(cfg: dict) -> ManifoldSpec:
    block = cfg.get("manifold")
    if not block or "kind" not in block or "R" not in block:
        raise ConfigError("manifold.kind and manifold.R are required")
    try:
        kind = Manifold(block["kind"])
    except ValueError:
        raise ConfigError(f"unknown manifold kind: {block['kind']!r}") from None
    try:
        return ManifoldSpec(kind, float(block["R"]), float(block["L"]) if "L" in block else None)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid manifold: {exc}") from exc


def _build_rotor(cfg: dict) -> RotorParams:
    block = cfg.get("rotor")
    if not block or "M" not in block or "I" not in block:
        raise ConfigError("rotor.M and rotor.I are required")
    try:
        return RotorParams(
            float(block["M"]), float(block["I"]), float(block.get("hbar", 1.0)), int(block.get("sig", 1))
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid rotor: {exc}") from exc


def _build_potential(cfg: dict) -> PotentialSpec:
    block = cfg.get("potential", {"kind": "zero"})
    kind_name = block.get("kind", "zero")
    try:
        kind = PotentialKind(kind_name)
    except ValueError:
        raise ConfigError(f"unknown potential kind: {kind_name!r}") from None
    try:
        if kind is PotentialKind.ZERO:
            return PotentialSpec.zero()
        if kind is PotentialKind.TABULATED:
            return PotentialSpec.tabulated(block.get("theta"), block.get("values"))
        return PotentialSpec(kind, V0=float(block.get("V0", 0.0)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid potential: {exc}") from exc


def _build_grid(cfg: dict, spec: ManifoldSpec) -> Grid:
    block = cfg.get("grid", {})
    try:
        n = int(block["n"]) if "n" in block else None
        theta_max = float(block.get("theta_max", spectral.DEFAULT_THETA_MAX))
        return spectral.default_grid(spec, n=n, theta_max=theta_max)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid grid: {exc}") from exc


def _build_norm(cfg: dict) -> NormConvention:
    name = cfg.get("solver", {}).get("norm", "unit_volume")
    try:
        return NormConvention(name)
    except ValueError:
        raise ConfigError(f"unknown norm convention: {name!r}") from None


def _build_k(cfg: dict) -> int:
    try:
        return int(cfg.get("solver", {}).get("k", 6))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid solver.k: {exc}") from exc


def _output_target(cfg: dict) -> tuple[str, str]:
    block = cfg.get("output")
    if not block or "path" not in block:
        raise ConfigError("output.path is required")
    fmt = block.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {fmt!r}")
    return fmt, block["path"]


def _resolved_config(command, spec, rotor, potential, cfg, grid=None, extra=None) -> dict:
    resolved = {
        "manifold": {"kind": spec.kind.value, "R": spec.R},
        "rotor": {"M": rotor.M, "I": rotor.I, "hbar": rotor.hbar, "sig": rotor.sig},
        "potential": {"kind": potential.kind.value},
        "output": dict(cfg.get("output", {})),
        "command": command,
    }
    if spec.L is not None:
        resolved["manifold"]["L"] = spec.L
    if potential.kind in (PotentialKind.COSINE_WELL, PotentialKind.HARMONIC):
        resolved["potential"]["V0"] = potential.V0
    if potential.kind is PotentialKind.TABULATED:
        resolved["potential"]["theta"] = list(map(float, potential.theta_grid))
        resolved["potential"]["values"] = list(map(float, potential.values))
    if grid is not None:
        resolved["grid"] = {"n": grid.n, "layout": grid.layout.value, "theta_max": grid.theta_max}
    if extra:
        resolved.update(extra)
    return resolved


def _dump_json(path: str, document: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _emit(fmt, path, config, header, rows, json_payload) -> None:
    """CSV with a config sidecar, or a single JSON document."""
    if fmt == "csv":
        _write_csv(path, header, rows)
        _dump_json(path + ".config.json", config)
    else:
        _dump_json(path, {"config": config, **json_payload})


def _spectrum_rows(result) -> list[tuple]:
    return [
        (i, result.eigenvalues_dimensionless[i], result.eigenvalues_physical[i], result.convergence[i])
        for i in range(result.eigenvalues_dimensionless.size)
    ]


def _spectrum_payload(result) -> dict:
    return {
        "m": result.m,
        "s": result.s,
        "eigenvalues_dimensionless": list(map(float, result.eigenvalues_dimensionless)),
        "eigenvalues_physical": list(map(float, result.eigenvalues_physical)),
        "convergence_estimate": list(map(float, result.convergence)),
        "nodes": list(map(float, result.nodes)),
        "eigenfunctions": [list(map(float, f)) for f in result.eigenfunctions],
        "norm_convention": result.norm_convention.value,
        "norm_constant": float(result.norm_constant),
        "scattering": result.scattering,
        "truncation_warning": result.truncation_warning,
    }


def cmd_spectrum(cfg: dict) -> int:
    spec = _build_manifold(cfg)
    rotor = _build_rotor(cfg)
    potential = _build_potential(cfg)
    grid = _build_grid(cfg, spec)
    quantum = cfg.get("quantum", {})
    if "m" not in quantum or "s" not in quantum:
        raise ConfigError("quantum.m and quantum.s are required for 'spectrum'")
    m, s = int(quantum["m"]), int(quantum["s"])
    k, norm = _build_k(cfg), _build_norm(cfg)
    fmt, path = _output_target(cfg)

    result = spectral.solve_spectrum(spec, rotor, m, s, potential, grid=grid, k=k, norm_convention=norm)
    config = _resolved_config(
        "spectrum", spec, rotor, potential, cfg, grid,
        {"quantum": {"m": m, "s": s}, "solver": {"k": k, "norm": norm.value}},
    )
    _emit(
        fmt, path, config,
        ["index", "eps", "E_physical", "convergence_estimate"],
        _spectrum_rows(result),
        {"result": _spectrum_payload(result)},
    )
    return EXIT_OK


def cmd_scan(cfg: dict) -> int:
    spec = _build_manifold(cfg)
    rotor = _build_rotor(cfg)
    potential = _build_potential(cfg)
    grid = _build_grid(cfg, spec)
    quantum = cfg.get("quantum", {})
    if "m_range" not in quantum or "s_range" not in quantum:
        raise ConfigError("quantum.m_range and quantum.s_range are required for 'scan'")

    def expand(pair, name):
        try:
            lo, hi = (int(v) for v in pair)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{name} must be an [lo, hi] integer pair: {exc}") from exc
        if hi < lo:
            raise ConfigError(f"{name}: hi < lo")
        return range(lo, hi + 1)

    m_range = expand(quantum["m_range"], "quantum.m_range")
    s_range = expand(quantum["s_range"], "quantum.s_range")
    k, norm = _build_k(cfg), _build_norm(cfg)
    fmt, path = _output_target(cfg)

    results, errors = spectral.spectrum_scan(
        spec, rotor, m_range, s_range, potential, grid=grid, k=k, norm_convention=norm
    )
    for (m, s), message in sorted(errors.items()):
        print(f"scan cell (m={m}, s={s}) failed: {message}", file=sys.stderr)
    if not results:
        raise RotorlabError("all scan cells failed")

    rows = []
    for m, s in sorted(results):
        rows.extend((m, s, *row) for row in _spectrum_rows(results[(m, s)]))
    config = _resolved_config(
        "scan", spec, rotor, potential, cfg, grid,
        {
            "quantum": {"m_range": [m_range.start, m_range.stop - 1], "s_range": [s_range.start, s_range.stop - 1]},
            "solver": {"k": k, "norm": norm.value},
            "errors": {f"{m},{s}": msg for (m, s), msg in sorted(errors.items())},
        },
    )
    payload = {
        "results": [
            {"m": m, "s": s, **_spectrum_payload(results[(m, s)])} for m, s in sorted(results)
        ]
    }
    _emit(fmt, path, config, ["m", "s", "index", "eps", "E_physical", "convergence_estimate"], rows, payload)
    return EXIT_OK


def cmd_geodesic(cfg: dict) -> int:
    spec = _build_manifold(cfg)
    rotor = _build_rotor(cfg)
    potential = _build_potential(cfg)
    block = cfg.get("geodesic", {})
    for key in ("state0", "dt", "steps"):
        if key not in block:
            raise ConfigError(f"geodesic.{key} is required for 'geodesic'")
    state0 = block["state0"]
    if not (isinstance(state0, (list, tuple)) and len(state0) == 6):
        raise ConfigError("geodesic.state0 must be [theta, phi, psi, p_theta, p_phi, p_psi]")
    try:
        state = classical.State(q=tuple(map(float, state0[:3])), p=tuple(map(float, state0[3:])))
        dt = float(block["dt"])
        steps = int(block["steps"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid geodesic block: {exc}") from exc
    fmt, path = _output_target(cfg)

    status = "ok"
    exit_code = EXIT_OK
    try:
        record = classical.integrate(spec, rotor, potential, state, dt=dt, steps=steps)
    except (PoleApproach, StepRejected) as exc:
        record = exc.record
        status = "pole_approach" if isinstance(exc, PoleApproach) else "step_rejected"
        exit_code = EXIT_DYNAMICS
        print(f"dynamics halted: {exc}", file=sys.stderr)

    energy = classical.hamiltonian_values(spec, rotor, potential, record.states)
    rows = (
        (record.times[i], *record.states[i], energy[i]) for i in range(record.times.size)
    )
    config = _resolved_config(
        "geodesic", spec, rotor, potential, cfg, None,
        {
            "geodesic": {"state0": [float(v) for v in state0], "dt": dt, "steps": steps},
            "status": status,
            "steps_done": record.steps_done,
        },
    )
    payload = {
        "status": status,
        "steps_done": record.steps_done,
        "times": list(map(float, record.times)),
        "states": [list(map(float, row)) for row in record.states],
        "energy": list(map(float, energy)),
    }
    _emit(fmt, path, config, ["t", "theta", "phi", "psi", "p_theta", "p_phi", "p_psi", "H"], rows, payload)
    return exit_code


def cmd_hj(cfg: dict) -> int:
    spec = _build_manifold(cfg)
    rotor = _build_rotor(cfg)
    potential = _build_potential(cfg)
    block = cfg.get("hj", {})
    for key in ("E", "mu", "sigma"):
        if key not in block:
            raise ConfigError(f"hj.{key} is required for 'hj'")
    try:
        E, mu, sigma = (float(block[key]) for key in ("E", "mu", "sigma"))
        theta_max = float(block.get("theta_max", 12.0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid hj block: {exc}") from exc
    fmt, path = _output_target(cfg)

    solution = classical.hj_radial_momentum(spec, rotor, potential, E, mu, sigma, theta_max=theta_max)
    rows = [
        (
            i,
            iv.theta_lo,
            iv.theta_hi,
            iv.kind,
            iv.lo_is_turning,
            iv.hi_is_turning,
            iv.action,
            iv.period if iv.period is not None else math.nan,
        )
        for i, iv in enumerate(solution.intervals)
    ]
    config = _resolved_config(
        "hj", spec, rotor, potential, cfg, None,
        {"hj": {"E": E, "mu": mu, "sigma": sigma, "theta_max": theta_max}},
    )
    payload = {
        "turning_points": list(map(float, solution.turning_points)),
        "intervals": [
            {
                "theta_lo": iv.theta_lo,
                "theta_hi": iv.theta_hi,
                "kind": iv.kind,
                "lo_is_turning": iv.lo_is_turning,
                "hi_is_turning": iv.hi_is_turning,
                "action": iv.action,
                "period": iv.period,
            }
            for iv in solution.intervals
        ],
    }
    _emit(
        fmt, path, config,
        ["interval", "theta_lo", "theta_hi", "kind", "lo_is_turning", "hi_is_turning", "action", "period"],
        rows, payload,
    )
    return EXIT_OK


def cmd_check(args) -> int:
    names = args.only if args.only else None
    try:
        results = check_mod.run_checks(names=names, perturb=args.perturb)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    all_passed = all(r.passed for r in results)
    if args.json:
        report = {
            "all_passed": all_passed,
            "checks": [
                {"name": r.name, "passed": r.passed, "detail": r.detail, "seconds": round(r.seconds, 3)}
                for r in results
            ],
        }
        json.dump(report, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            flag = "PASS" if r.passed else "FAIL"
            print(f"{flag}  {r.name:<{width}}  {r.seconds:6.2f}s  {r.detail}")
        print("all checks passed" if all_passed else "CHECK FAILURES PRESENT")
    return EXIT_OK if all_passed else EXIT_INVARIANT


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--manifold", choices=[m.value for m in Manifold], help="surface kind")
    parser.add_argument("--R", type=float, help="sphere/pseudosphere radius or torus tube radius")
    parser.add_argument("--L", type=float, help="torus central radius")
    parser.add_argument("--M", type=float, help="rotor mass")
    parser.add_argument("--I", type=float, help="internal moment of inertia")
    parser.add_argument("--hbar", type=float, help="action quantum (default 1)")
    parser.add_argument("--sig", type=int, choices=[1, -1], help="sign of the rotational term")
    parser.add_argument(
        "--potential", choices=[p.value for p in PotentialKind if p is not PotentialKind.TABULATED],
        help="potential kind (tabulated potentials via config file)",
    )
    parser.add_argument("--V0", type=float, help="potential strength")
    parser.add_argument("--output", help="output file path")
    parser.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rotorlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="radial eigenvalues for one (m, s)")
    _add_common(p)
    p.add_argument("--m", type=int, help="orbital quantum number")
    p.add_argument("--s", type=int, help="spin quantum number")
    p.add_argument("--n", type=int, help="grid nodes")
    p.add_argument("--theta-max", dest="grid_theta_max", type=float, help="pseudosphere truncation")
    p.add_argument("--k", type=int, help="number of eigenvalues")
    p.add_argument("--norm", choices=[n.value for n in NormConvention], help="normalization convention")

    p = sub.add_parser("scan", help="spectra over a rectangle of (m, s)")
    _add_common(p)
    p.add_argument("--m-range", dest="m_range", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--s-range", dest="s_range", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--n", type=int, help="grid nodes")
    p.add_argument("--theta-max", dest="grid_theta_max", type=float, help="pseudosphere truncation")
    p.add_argument("--k", type=int, help="number of eigenvalues")
    p.add_argument("--norm", choices=[n.value for n in NormConvention], help="normalization convention")

    p = sub.add_parser("geodesic", help="integrate a trajectory")
    _add_common(p)
    p.add_argument(
        "--state0", type=float, nargs=6,
        metavar=("THETA", "PHI", "PSI", "P_THETA", "P_PHI", "P_PSI"),
    )
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--steps", type=int, help="number of steps")

    p = sub.add_parser("hj", help="radial-momentum quadrature at fixed (E, mu, sigma)")
    _add_common(p)
    p.add_argument("--E", type=float, help="energy")
    p.add_argument("--mu", type=float, help="conserved p_phi")
    p.add_argument("--sigma", type=float, help="conserved p_psi")
    p.add_argument("--theta-max", dest="hj_theta_max", type=float, help="pseudosphere scan bound")

    p = sub.add_parser("check", help="run the cross-module invariant suite")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.add_argument("--only", nargs="+", metavar="NAME", help="run only the named checks")
    p.add_argument("--perturb", metavar="NAME", help="inject an error into the named check (test hook)")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return cmd_check(args)
        cfg = _merged_config(args)
        handler = {"spectrum": cmd_spectrum, "scan": cmd_scan, "geodesic": cmd_geodesic, "hj": cmd_hj}
        return handler[args.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PoleApproach, StepRejected) as exc:
        print(f"dynamics halted: {exc}", file=sys.stderr)
        return EXIT_DYNAMICS
    except RotorlabError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
