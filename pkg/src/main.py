# src/main.py - Command-line front end: channel, spectrum, growth, bound and region subcommands
"""
Usage:
    python -m src.main channel --rate 1/3 --ebno1-db 0 --alphas 0.5,0.5 --solve cutoff
    python -m src.main spectrum --ensemble nsra --N 2 --q 3 --out s.csv
    python -m src.main growth --ensemble random --rate 1/3 --delta 0.5
    python -m src.main bound --kind ub --spectrum s.csv --ebno1-db 0 --sweep 0:4:1 --out b.csv
    python -m src.main region --ensemble nsra --q 3 --kind gallager61 --symmetric

Exit codes: 0 success, 2 usage error, 3 numeric failure.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.bounds import BoundConfig, BoundKind, sweep_bound
from src.channels import (
    ParallelChannelSet,
    avg_bhattacharyya,
    avg_capacity,
    avg_mutual_info,
    bhattacharyya,
    capacity,
    cutoff_rate,
    solve_capacity_ebno2,
    solve_cutoff_ebno2,
)
from src.core.errors import ParallelBoundsError
from src.growth import GrowthRate, convergence_check, growth_curve
from src.numerics.solvers import GridConfig
from src.regions import (
    EnsembleFlags,
    RegionConfig,
    capacity_gap_db,
    reference_boundaries,
    region_boundary,
    symmetric_threshold,
)
from src.regions.attainable import REGION_KINDS
from src.spectra import EnsembleKind, EnsembleSpec
from src.storage import emit, load_spectrum, read_header, read_results, save_iowe, save_spectrum, write_sidecar

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(ValueError):
    """Invalid flag combination; names the offending flag"""


@dataclass
class RunConfig:
    """Everything a run depends on, embedded in its output header"""
    command: str
    options: Dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        options = {k: v for k, v in sorted(vars(args).items()) if k not in ('command', 'handler')}
        return cls(command=args.command, options=options)

    def to_dict(self) -> Dict:
        return {"command": self.command, **self.options}


# =============================================================================
# FLAG PARSERS
# =============================================================================

def parse_rate(text) -> float:
    """'1/3' or '0.3333'"""
    try:
        value = float(Fraction(str(text).strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid rate '{text}'")
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"rate must lie in (0, 1), got {text}")
    return value


def parse_floats(text) -> List[float]:
    """'0.5,0.5' (or a list from a JSON config)"""
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(Fraction(x.strip())) for x in str(text).split(',') if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def parse_ints(text) -> List[int]:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    try:
        return [int(x) for x in str(text).split(',') if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def parse_sweep(text) -> List[float]:
    """'lo:hi:step', both ends included"""
    try:
        lo, hi, step = (float(x) for x in str(text).split(':'))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got '{text}'")
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"empty sweep '{text}'")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def parse_grid(text) -> Dict[str, int]:
    """'coarse:refine', e.g. 21:4"""
    if isinstance(text, dict):
        return text
    try:
        coarse, refine = (int(x) for x in str(text).split(':'))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected coarse:refine, got '{text}'")
    if coarse < 2 or refine < 0:
        raise argparse.ArgumentTypeError(f"grid needs coarse >= 2 and refine >= 0, got '{text}'")
    return {"coarse": coarse, "refine": refine}


# =============================================================================
# PARSER
# =============================================================================

def _ensemble_flags(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('ensemble')
    group.add_argument('--ensemble', choices=[k.value for k in EnsembleKind], default=None,
                       help='built-in ensemble, or file together with --iowe')
    group.add_argument('--N', type=int, default=100, help='information block length')
    group.add_argument('--M', type=int, default=None, help='SPARA precoder bypass count')
    group.add_argument('--q', type=int, default=None, help='repetition order')
    group.add_argument('--p', type=int, default=3, help='SPC order (SPRA)')
    group.add_argument('--n', type=int, default=None, help='block length of the random ensemble')
    group.add_argument('--iowe', default=None, help='IOWE CSV file')


def _channel_flags(parser: argparse.ArgumentParser, sweep_help: str):
    group = parser.add_argument_group('channels')
    group.add_argument('--rate', type=parse_rate, default=None, help="code rate, e.g. 1/3")
    group.add_argument('--alphas', type=parse_floats, default=None, help='assignment probabilities, e.g. 0.5,0.5')
    group.add_argument('--ebno1-db', type=float, default=None, help='Eb/N0 of channel 1 in dB')
    group.add_argument('--ebno2-db', type=float, default=None, help='Eb/N0 of channel 2 in dB')
    group.add_argument('--sweep', type=parse_sweep, default=None, help=sweep_help)
    group.add_argument('--channels', default=None, help='channel-set JSON descriptor')


def _output_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--out', default=None, help='output file')
    parser.add_argument('--format', choices=['csv', 'json'], default='csv')
    parser.add_argument('--threads', type=int, default=None, help='worker threads (default PARBOUND_THREADS)')


def build_parser(defaults: Optional[Dict] = None) -> argparse.ArgumentParser:
    """
    Args:
        defaults: flag defaults from a --config file, applied to every subcommand
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None, help='JSON file with flag defaults (keys are flag names)')
    parser = argparse.ArgumentParser(
        prog='parbound',
        description='ML-decoding error bounds and attainable regions over parallel MBIOS channels',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    channel = sub.add_parser('channel', parents=[common],
                             help='Bhattacharyya constants, capacity, cutoff rate, reference boundaries')
    _channel_flags(channel, 'Eb/N0_1 grid lo:hi:step for the capacity and cutoff boundaries')
    channel.add_argument('--solve', choices=['cutoff', 'capacity'], default=None,
                         help='print the Eb/N0_2 (dB) meeting the target at --ebno1-db')
    _output_flags(channel)
    channel.set_defaults(handler=run_channel)

    spectrum = sub.add_parser('spectrum', parents=[common],
                              help='generate and export IOWEs and distance spectra')
    _ensemble_flags(spectrum)
    spectrum.add_argument('--rate', type=parse_rate, default=None, help='rate of the random ensemble')
    spectrum.add_argument('--bit', action='store_true', help='export the IOWE instead of the spectrum')
    spectrum.add_argument('--out', default=None, help='output CSV')
    spectrum.set_defaults(handler=run_spectrum)

    growth = sub.add_parser('growth', parents=[common], help='asymptotic growth rates r(delta)')
    _ensemble_flags(growth)
    growth.add_argument('--rate', type=parse_rate, default=None, help='rate of the random ensemble')
    growth.add_argument('--delta', type=parse_floats, default=None, help='delta values (default: configured grid)')
    growth.add_argument('--convergence', type=parse_ints, default=None,
                        help='N values for finite-length exponents at --delta')
    growth.add_argument('--grid', type=parse_grid, default=None, help='optimizer density coarse:refine')
    _output_flags(growth)
    growth.set_defaults(handler=run_growth)

    bound = sub.add_parser('bound', parents=[common],
                           help='finite-length bound sweep over Eb/N0 of channel 2')
    _ensemble_flags(bound)
    _channel_flags(bound, 'Eb/N0_2 grid lo:hi:step')
    bound.add_argument('--spectrum', default=None, help='distance-spectrum CSV')
    bound.add_argument('--kind', default='ds2', choices=[k.value for k in BoundKind])
    bound.add_argument('--target', choices=['block', 'bit'], default='block')
    bound.add_argument('--threshold', type=float, default=None, help='union-term threshold')
    bound.add_argument('--grid', type=parse_grid, default=None, help='optimizer density coarse:refine')
    bound.add_argument('--expurgate', action='store_true', help='drop weights above n - k (specific codes)')
    bound.add_argument('--no-finite-length', dest='finite_length', action='store_false',
                       help='MSF without the finite-length partition refinement')
    bound.add_argument('--sf-variant', choices=['gallager78', 'ds2_81'], default=None)
    _output_flags(bound)
    bound.set_defaults(handler=run_bound)

    region = sub.add_parser('region', parents=[common],
                            help='attainable-region frontier for two parallel BIAWGN channels')
    _ensemble_flags(region)
    _channel_flags(region, 'Eb/N0_1 grid lo:hi:step')
    region.add_argument('--kind', default='ds2', choices=list(REGION_KINDS))
    region.add_argument('--growth', default=None, help='growth CSV written by the growth command')
    region.add_argument('--assume-conditions', action='store_true',
                        help='declare the low-weight conditions for a growth CSV ensemble')
    region.add_argument('--symmetric', action='store_true',
                        help='threshold at Eb/N0_1 = Eb/N0_2 and its gap to capacity')
    region.add_argument('--reference', action='store_true', help='also emit capacity and cutoff boundaries')
    region.add_argument('--tol', type=float, default=None, help='bisection tolerance in dB')
    region.add_argument('--grid', type=parse_grid, default=None, help='optimizer density coarse:refine')
    _output_flags(region)
    region.set_defaults(handler=run_region)

    if defaults:
        for subparser in (channel, spectrum, growth, bound, region):
            subparser.set_defaults(**defaults)
    return parser


def load_defaults(argv: Sequence[str]) -> Dict:
    """Flag defaults from the JSON file named by --config, if any"""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument('--config', default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    path = Path(known.config)
    try:
        with open(path, 'r') as f:
            defaults = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"--config: cannot read {path}: {e}")
    if not isinstance(defaults, dict):
        raise UsageError(f"--config: {path} must hold a JSON object")
    defaults = {str(k).replace('-', '_'): v for k, v in defaults.items() if k not in ('command', 'handler')}
    logging.info(f"[CLI] Defaults loaded from {path} | keys={sorted(defaults)}")
    return defaults


# =============================================================================
# HELPERS
# =============================================================================

def _ensemble(args, rate: Optional[float] = None) -> EnsembleSpec:
    if args.iowe and args.ensemble not in (None, 'file'):
        raise UsageError("--iowe: give either --ensemble or an IOWE file, not both")
    kind = 'file' if args.iowe else args.ensemble
    if kind is None:
        raise UsageError("--ensemble: no ensemble given (or pass --iowe)")
    try:
        spec = EnsembleSpec(kind=kind, N=args.N, M=args.M, q=args.q, p=args.p,
                            rate=rate if rate is not None else 1.0 / 3.0, n=args.n, iowe_path=args.iowe)
    except ValueError as e:
        raise UsageError(f"--ensemble: {e}")
    return spec


def _alphas(args, J: int = 2) -> List[float]:
    alphas = parse_floats(args.alphas) if args.alphas is not None else [1.0 / J] * J
    if len(alphas) != J:
        raise UsageError(f"--alphas: expected {J} values, got {len(alphas)}")
    return alphas


def _require(args, *names: str):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for '{args.command}'")


def _write(rows: List[Dict], args, run: RunConfig, columns: Optional[List[str]] = None,
           header: Optional[Dict[str, str]] = None) -> None:
    if args.out:
        emit(rows, args.out, args.format, run.to_dict(), columns, header)
        return
    if not rows:
        print("(no rows)")
        return
    columns = columns or list(rows[0].keys())
    print(','.join(columns))
    for row in rows:
        print(','.join(f"{row[c]:.12g}" if isinstance(row[c], float) else str(row[c]) for c in columns))


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def run_channel(args, run: RunConfig) -> int:
    if args.solve:
        _require(args, 'rate', 'ebno1_db')
        solver = solve_cutoff_ebno2 if args.solve == 'cutoff' else solve_capacity_ebno2
        value = solver(args.rate, args.ebno1_db, _alphas(args))
        logging.info(f"[CLI] {args.solve} boundary | rate={args.rate:.6g} | ebno1_db={args.ebno1_db} | "
                     f"ebno2_db={value:.6f}")
        print(f"{value:.2f}")
        return EXIT_OK

    if args.sweep is not None:
        _require(args, 'rate')
        cap, cut = reference_boundaries(args.rate, _alphas(args), args.sweep)
        _write(cap.to_rows() + cut.to_rows(), args, run, ['ebno1_db', 'ebno2_db', 'kind', 'ensemble'])
        return EXIT_OK

    channel_set = _channel_set(args)
    rows = [{
        "channel": j,
        "kind": ch.kind.value,
        "alpha": float(a),
        "gamma": bhattacharyya(ch),
        "capacity_bits": capacity(ch),
    } for j, (ch, a) in enumerate(zip(channel_set.channels, channel_set.alphas))]
    rows.append({
        "channel": -1,
        "kind": "average",
        "alpha": 1.0,
        "gamma": avg_bhattacharyya(channel_set),
        "capacity_bits": avg_capacity(channel_set),
    })
    logging.info(f"[CLI] Channel set | J={channel_set.J} | R0={cutoff_rate(channel_set):.6f} bits | "
                 f"I_bar={avg_mutual_info(channel_set):.6f} bits")
    _write(rows, args, run)
    return EXIT_OK


def _channel_set(args, ebno2_db: Optional[float] = None) -> ParallelChannelSet:
    if args.channels:
        return ParallelChannelSet.from_json(args.channels)
    _require(args, 'rate', 'ebno1_db')
    ebno2 = ebno2_db if ebno2_db is not None else args.ebno2_db
    if ebno2 is None:
        raise UsageError(f"--ebno2-db (or --channels) is required for '{args.command}'")
    return ParallelChannelSet.biawgn_ebno(args.rate, [args.ebno1_db, ebno2], _alphas(args))


def run_spectrum(args, run: RunConfig) -> int:
    spec = _ensemble(args, args.rate)
    if args.bit:
        iowe = spec.build_iowe()
        if args.out:
            save_iowe(iowe, args.out)
        print(f"iowe {spec.tag} | n={iowe.n} | k={iowe.k}")
        return EXIT_OK

    spectrum = spec.spectrum()
    if args.out:
        save_spectrum(spectrum, args.out)
    finite = spectrum.support()
    total = float(np.sum(np.exp(spectrum.log_a[finite]))) if finite.size else 0.0
    print(f"spectrum {spec.tag} | n={spectrum.n} | k={spectrum.k} | sum_h>=1 A_h={total:.12g}")
    return EXIT_OK


def run_growth(args, run: RunConfig) -> int:
    spec = _ensemble(args, args.rate)
    if args.convergence:
        if not args.delta or len(args.delta) != 1:
            raise UsageError("--delta: --convergence needs exactly one delta")
        _write(convergence_check(spec, args.delta[0], args.convergence), args, run)
        return EXIT_OK

    grid = None
    if args.grid:
        grid = GridConfig(coarse=args.grid['coarse'], refine_rounds=args.grid['refine'])
    try:
        curve = growth_curve(spec, deltas=args.delta, grid=grid, threads=args.threads)
    except ValueError as e:
        raise UsageError(f"--ensemble: {e}")
    _write(curve.to_rows(), args, run, ['delta', 'r_nats'],
           header={"ensemble": spec.tag, "rate": f"{curve.rate:.12g}"})
    return EXIT_OK


def run_bound(args, run: RunConfig) -> int:
    if args.spectrum and (args.ensemble or args.iowe):
        raise UsageError("--spectrum: give one spectrum source")
    source = load_spectrum(args.spectrum) if args.spectrum else _ensemble(args, args.rate)
    if isinstance(source, EnsembleSpec):
        source = source.spectrum()
    rate = args.rate if args.rate is not None else source.rate

    overrides = {"threshold": args.threshold, "grid": args.grid, "expurgate": args.expurgate,
                 "finite_length": args.finite_length}
    if args.sf_variant:
        overrides["sf_variant"] = args.sf_variant
    config = BoundConfig.from_config(overrides)

    _require(args, 'ebno1_db')
    points = args.sweep if args.sweep is not None else ([args.ebno2_db] if args.ebno2_db is not None else None)
    if points is None:
        raise UsageError("--sweep (or --ebno2-db) is required for 'bound'")
    rows, diagnostics = sweep_bound(source, rate, args.ebno1_db, points, _alphas(args), args.kind,
                                    args.target, config, args.threads)
    _write(rows, args, run, ['snr2_db', 'log10_Pe', 'kind'])
    if args.out:
        sidecar = Path(args.out).with_suffix('.diagnostics.json')
        write_sidecar({"config": run.to_dict(), "points": diagnostics}, sidecar)
    return EXIT_OK


def _region_config(args) -> RegionConfig:
    config = RegionConfig.from_config()
    if args.tol is not None:
        config.tol_db = float(args.tol)
    if args.grid:
        config.grid = GridConfig(coarse=args.grid['coarse'], refine_rounds=args.grid['refine'])
    try:
        config.validate()
    except ValueError as e:
        raise UsageError(f"--tol: {e}")
    return config


def run_region(args, run: RunConfig) -> int:
    config = _region_config(args)
    alphas = _alphas(args)
    if args.growth:
        header = read_header(args.growth)
        rate = args.rate
        if rate is None:
            if 'rate' not in header:
                raise UsageError(f"--rate is required for '{args.command}' when {args.growth} records no rate")
            try:
                rate = parse_rate(header['rate'])
            except argparse.ArgumentTypeError as e:
                raise UsageError(f"--growth: {e}")
        frame = read_results(args.growth)
        name = header.get('ensemble', Path(args.growth).stem)
        ensemble = GrowthRate.from_points(name, rate, frame['delta'], frame['r_nats'])
        flags = EnsembleFlags(True, True) if args.assume_conditions else EnsembleFlags()
    else:
        ensemble = _ensemble(args, args.rate)
        flags = None
    rate = ensemble.rate

    if args.symmetric:
        value = symmetric_threshold(ensemble, args.kind, rate, alphas, flags, config, args.threads)
        gap = capacity_gap_db(value, rate)
        rows = [{"ebno_db": value, "capacity_gap_db": gap, "kind": args.kind}]
        _write(rows, args, run)
        return EXIT_OK

    grid = args.sweep if args.sweep is not None else ([args.ebno1_db] if args.ebno1_db is not None else None)
    if grid is None:
        raise UsageError("--sweep (or --ebno1-db) is required for 'region'")
    boundary = region_boundary(ensemble, args.kind, rate, alphas, grid, flags, config, args.threads)
    rows = boundary.to_rows()
    if args.reference:
        cap, cut = reference_boundaries(rate, alphas, grid)
        rows += cap.to_rows() + cut.to_rows()
    _write(rows, args, run, ['ebno1_db', 'ebno2_db', 'kind', 'ensemble'])
    return EXIT_OK


# =============================================================================
# DISPATCH
# =============================================================================

def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns the process exit code"""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser(load_defaults(argv)).parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    run = RunConfig.from_args(args)
    try:
        return args.handler(args, run)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as e:
        print(f"usage error: {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParallelBoundsError as e:
        logging.error(f"[CLI] {args.command} failed | {type(e).__name__}: {e}")
        print(f"error: {args.command} failed: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        print(f"usage error: {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
