"""Command-line front end: sweeps, tables and figure-style datasets.

Subcommands: trap, spectrum, v0, modes, spin, limits.  Options may come
from flags or from a TOML config file (--config); flags win.  Output is
UTF-8 comma-separated text with '#'-prefixed metadata lines (config
hash, code version, column schema) so every artifact is reproducible
from its own header.

Exit codes: 0 success, 1 configuration/parse error, 2 physical-validity
failure (trap instability, non-planarity), 3 numerical non-convergence.

Frequencies are given with explicit unit suffixes to sidestep the
nu-versus-omega ambiguity: '222.7kHz' and '2pi*222.7kHz' both denote an
angular frequency of 2 pi x 222.7 kHz, while '1.4e6rad/s' is already
angular.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__
from .constants import CONST
from .crystal import (
    CrystalConfig,
    EquilibriumError,
    SaddleError,
    export_modes,
    export_positions,
    normal_modes,
    planarity_check,
    solve_equilibrium,
)
from .dressing import export_v0, v0_of_b
from .hamiltonian import (
    BasisSet,
    TrackingError,
    export_spectrum,
    ionization_gradient,
    ionization_n,
    landau_threshold_field,
    landau_threshold_n,
    quadrupole_dominance_gradient,
    sweep_and_track,
)
from .radial import ConvergenceError
from .species import SpeciesError, SpeciesParams, bundled_species_path, load_species
from .spinmodel import export_spectrum_sweep
from .trap import TrapConfig, confinement_frequencies

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PHYSICS = 2
EXIT_NONCONVERGENCE = 3


class ConfigError(ValueError):
    pass


class PhysicsError(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route through ConfigError
    # so config problems map to exit code 1
    def error(self, message):
        raise ConfigError(message)


_FREQ_SCALE = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}


def parse_frequency(text: str) -> float:
    """Angular frequency in rad/s from '440kHz', '2pi*440kHz' or '2e6rad/s'."""
    s = text.strip().lower().replace(" ", "")
    angular_prefix = False
    if s.startswith("2pi*"):
        angular_prefix = True
        s = s[4:]
    if s.endswith("rad/s"):
        if angular_prefix:
            raise ConfigError(f"mixed frequency units in {text!r}")
        return float(s[: -len("rad/s")])
    for suffix, scale in sorted(_FREQ_SCALE.items(), key=lambda kv: -len(kv[0])):
        if s.endswith(suffix):
            return 2.0 * math.pi * float(s[: -len(suffix)]) * scale
    raise ConfigError(f"frequency {text!r} needs a unit suffix (kHz, MHz, 2pi*kHz, rad/s)")


def parse_grid(text: str) -> np.ndarray:
    """Monotone sample grid from 'start:stop:count'."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid {text!r} must be start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from None
    if count < 1 or stop < start:
        raise ConfigError(f"grid {text!r} must be non-empty and monotone")
    return np.linspace(start, stop, count)


def _load_species_arg(name: str) -> SpeciesParams:
    path = Path(name)
    if not path.exists():
        try:
            path = bundled_species_path(name)
        except SpeciesError:
            raise ConfigError(f"species {name!r}: no such file or bundled species")
    try:
        return load_species(path)
    except (OSError, SpeciesError) as exc:
        raise ConfigError(f"species {name!r}: {exc}") from None


def _config_hash(args: argparse.Namespace) -> str:
    items = sorted(
        f"{k}={v!r}" for k, v in vars(args).items() if k not in ("func", "output")
    )
    return hashlib.sha256(";".join(items).encode()).hexdigest()[:16]


def _open_output(args: argparse.Namespace, schema: str):
    fh = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    fh.write(f"# penningryd {__version__}\n")
    fh.write(f"# config sha256:{_config_hash(args)}\n")
    fh.write(f"# schema: {schema}\n")
    return fh


def _close_output(fh) -> None:
    if fh is not sys.stdout:
        fh.close()


def cmd_trap(args) -> int:
    species = _load_species_arg(args.species)
    trap = TrapConfig.for_species(species, args.B, args.beta)
    freqs = confinement_frequencies(trap)
    fh = _open_output(args, "quantity,value_rad_s,value_2pi_kHz")
    try:
        rows = [
            ("omega_z", freqs.omega_z),
            ("omega_c", freqs.omega_c),
            ("omega_rho", freqs.omega_rho),
        ]
        fh.write("quantity,value_rad_s,value_2pi_kHz\n")
        for name, w in rows:
            fh.write(f"{name},{w:.9g},{w / (2e3 * math.pi):.9g}\n")
        fh.write(f"stable,{int(freqs.stable)},\n")
    finally:
        _close_output(fh)
    if not freqs.stable:
        raise PhysicsError(
            f"radially unstable: omega_c = {freqs.omega_c:.4g} rad/s < "
            f"sqrt(2) omega_z = {math.sqrt(2) * freqs.omega_z:.4g} rad/s"
        )
    return EXIT_OK


def cmd_spectrum(args) -> int:
    species = _load_species_arg(args.species)
    basis = BasisSet(species, args.n, l_max=args.lmax)
    b_values = parse_grid(args.B)
    if b_values[0] <= 0:
        b_values = np.clip(b_values, 1e-4, None)
    track = sweep_and_track(basis, b_values, beta=args.beta, anchor_b=args.anchor_B)
    fh = _open_output(args, "B_tesla,block_mj,track_label,energy_GHz,overlap_prev")
    try:
        if args.block_mj is not None:
            import io

            buf = io.StringIO()
            export_spectrum(track, buf)
            lines = buf.getvalue().splitlines(keepends=True)
            fh.write(lines[0])
            for line in lines[1:]:
                if float(line.split(",")[1]) == args.block_mj:
                    fh.write(line)
        else:
            export_spectrum(track, fh)
    finally:
        _close_output(fh)
    return EXIT_OK


def cmd_v0(args) -> int:
    species = _load_species_arg(args.species)
    if args.ratio < 1.84:
        raise PhysicsError(
            f"omega_z/omega_rho = {args.ratio} cannot hold a planar triangle "
            "(needs >= 1.84)"
        )
    basis = BasisSet(species, args.n, l_max=args.lmax)
    b_values = parse_grid(args.B)
    b_values = np.clip(b_values, 1e-4, None)
    anchor = args.anchor_B
    if anchor is None:
        anchor = 0.4 * landau_threshold_field(args.n)
    track = sweep_and_track(basis, b_values, anchor_b=anchor)
    points = v0_of_b(track, species.mass_kg, args.ratio)
    fh = _open_output(args, "B_tesla,n,wz_over_wr,V0_MHz,planar_ok")
    try:
        export_v0(points, fh)
    finally:
        _close_output(fh)
    return EXIT_OK


def cmd_modes(args) -> int:
    species = _load_species_arg(args.species)
    w_rho = parse_frequency(args.wr)
    w_z = parse_frequency(args.wz) if args.wz else 2.0 * w_rho
    from .trap import TrapFrequencies

    freqs = TrapFrequencies(
        omega_z=w_z,
        omega_c=math.sqrt(4.0 * w_rho**2 + 2.0 * w_z**2),
        omega_rho=w_rho,
        stable=True,
    )
    report = planarity_check(args.N, freqs, species.mass_kg)
    if not report.planar:
        raise PhysicsError(
            f"N = {args.N} crystal is not planar at omega_z/omega_rho = "
            f"{report.ratio:.3f} (critical {report.critical_ratio:.3f})"
        )
    config = CrystalConfig(n_ions=args.N, freqs=freqs, mass_kg=species.mass_kg)
    eq = solve_equilibrium(config, seed=args.seed)
    modes = normal_modes(eq)
    fh = _open_output(args, "alpha,freq_over_wr,class_label")
    try:
        export_modes(modes, fh)
        if args.positions:
            export_positions(eq, fh)
    finally:
        _close_output(fh)
    return EXIT_OK


def cmd_spin(args) -> int:
    if not args.facilitation and args.V0 is None:
        raise ConfigError("either --facilitation or --V0 is required")
    omegas = parse_grid(args.Omega_sweep) * args.Delta
    fh = _open_output(args, "Omega_over_Delta,level_index,energy_over_Delta,symmetry_label")
    try:
        v0 = None if args.facilitation else args.V0
        export_spectrum_sweep(omegas, args.Delta, fh, n_sites=args.N, v0=v0)
    finally:
        _close_output(fh)
    return EXIT_OK


def cmd_limits(args) -> int:
    fh = _open_output(args, "quantity,value,unit")
    try:
        fh.write("quantity,value,unit\n")
        fh.write(f"ionization_gradient,{ionization_gradient(args.n):.6g},V/m^2\n")
        fh.write(f"landau_threshold_field,{landau_threshold_field(args.n):.6g},T\n")
        fh.write(f"landau_threshold_n,{landau_threshold_n(args.B)},\n")
        if args.beta is not None:
            fh.write(f"ionization_n,{ionization_n(args.beta)},\n")
        fh.write(
            f"quadrupole_dominance_gradient,"
            f"{quadrupole_dominance_gradient(args.B):.6g},V/m^2\n"
        )
    finally:
        _close_output(fh)
    return EXIT_OK


def _apply_config_file(parser: _Parser, argv: list[str]) -> list[str]:
    """Prepend defaults from a TOML file; explicit flags still override
    because argparse reads them later."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ConfigError("--config needs a file path")
    path = Path(argv[i + 1])
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path}: {exc}") from None
    rest = [a for k, a in enumerate(argv) if k not in (i, i + 1)]
    if not rest:
        raise ConfigError("config file given but no subcommand")
    sub = rest[0]
    table = data.get(sub, {})
    injected: list[str] = []
    for key, value in table.items():
        flag = "--" + key.replace("_", "-")
        if flag in rest or any(a.startswith(flag + "=") for a in rest):
            continue
        if isinstance(value, bool):
            if value:
                injected.append(flag)
        else:
            injected.extend([flag, str(value)])
    return [sub] + injected + rest[1:]


def build_parser() -> _Parser:
    parser = _Parser(prog="penningryd", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--species", default="ca40", help="bundled name or file path")
        p.add_argument("--output", default=None, help="output file (default stdout)")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("trap", help="single-ion confinement frequencies")
    common(p)
    p.add_argument("--B", type=float, required=True, help="magnetic field (T)")
    p.add_argument("--beta", type=float, required=True, help="field gradient (V/m^2)")
    p.set_defaults(func=cmd_trap)

    p = sub.add_parser("spectrum", help="magnetic-sweep level diagram")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--B", required=True, help="grid start:stop:count (T)")
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--lmax", type=int, default=5)
    p.add_argument("--block-mj", type=float, default=None, dest="block_mj")
    p.add_argument("--anchor-B", type=float, default=None, dest="anchor_B")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("v0", help="dipole-dipole strength along a magnetic sweep")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--B", required=True, help="grid start:stop:count (T)")
    p.add_argument("--ratio", type=float, default=2.0, help="omega_z/omega_rho")
    p.add_argument("--lmax", type=int, default=5)
    p.add_argument("--anchor-B", type=float, default=None, dest="anchor_B")
    p.set_defaults(func=cmd_v0)

    p = sub.add_parser("modes", help="crystal normal-mode table")
    common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--wr", required=True, help="radial frequency, e.g. 2pi*220kHz")
    p.add_argument("--wz", default=None, help="axial frequency (default 2x radial)")
    p.add_argument("--positions", action="store_true")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("spin", help="facilitated Ising spectrum sweep")
    common(p)
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--Delta", type=float, default=1.0)
    p.add_argument("--V0", type=float, default=None)
    p.add_argument("--facilitation", action="store_true")
    p.add_argument(
        "--Omega-sweep", required=True, dest="Omega_sweep",
        help="grid start:stop:count in units of Delta",
    )
    p.set_defaults(func=cmd_spin)

    p = sub.add_parser("limits", help="field-regime validity thresholds")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--B", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=None)
    p.set_defaults(func=cmd_limits)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"physical-validity failure: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (ConvergenceError, TrackingError, EquilibriumError, SaddleError) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (ValueError, SpeciesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
