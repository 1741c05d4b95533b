# test_system.py - Long-running acceptance checks: growth rates, bound dominance, region gaps, small-delta slope
import argparse
import logging
import math
import sys
import time
from dataclasses import replace

import numpy as np

from src.bounds import (
    BoundConfig,
    GallagerSubcode,
    ds2_bound,
    error_bound,
    hybrid_subcode_value,
    msf_bound,
    union_bhattacharyya,
    union_bound_q,
)
from src.bounds.union import union_log_terms
from src.channels import ParallelChannelSet
from src.growth import (
    growth_curve,
    nsra_growth,
    random_growth,
    spara_constraint_slack,
    spara_growth,
    spara_growth_point,
    spra_constraint_slack,
    spra_growth,
    spra_growth_point,
)
from src.numerics.solvers import GridConfig
from src.regions import RegionConfig, capacity_gap_db, ds2_exponent, small_delta_slope, symmetric_threshold
from src.spectra import EnsembleSpec

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)

SLACK = 1e-9


def check_growth() -> bool:
    """NSRA endpoints and interior maximum, constraint slack, ensemble ordering at delta = 1/2"""
    ok = True
    ends = [nsra_growth(d, 3) for d in (1e-9, 1.0)]
    if max(abs(v) for v in ends) > 1e-6:
        logging.error(f"NSRA growth at the endpoints: {ends}")
        ok = False

    for delta in (0.1, 0.3, 0.5, 0.7, 0.9):
        refined = nsra_growth(delta, 3)
        scan = nsra_growth(delta, 3, GridConfig(coarse=20001, refine_rounds=0))
        if abs(refined - scan) > 1e-6:
            logging.error(f"NSRA maximum at delta={delta}: refined={refined:.9f} scan={scan:.9f}")
            ok = False

    for delta in (0.1, 0.3, 0.5, 0.7):
        p = spra_growth_point(delta)
        if np.isfinite(p.value):
            slack = spra_constraint_slack(delta, p.params['eta'], p.params['rho1'], p.params['rho2'])
            if slack < -SLACK:
                logging.error(f"SPRA constraint violated at delta={delta}: slack={slack}")
                ok = False
        q = spara_growth_point(delta, 2.0 / 15.0)
        if np.isfinite(q.value):
            slack = spara_constraint_slack(delta, 2.0 / 15.0, q.params['eta'], q.params['rho1'],
                                           q.params['rho2'], q.params['eps1'], q.params['eps2'])
            if slack < -SLACK:
                logging.error(f"SPARA constraint violated at delta={delta}: slack={slack}")
                ok = False

    chain = [
        float(random_growth(0.5, 1.0 / 3.0)),
        nsra_growth(0.5, 3),
        spra_growth(0.5),
        spara_growth(0.5, 0.25),
        spara_growth(0.5, 2.0 / 15.0),
    ]
    logging.info(f"Growth at delta=0.5: {[round(v, 6) for v in chain]}")
    if any(a < b - 1e-6 for a, b in zip(chain, chain[1:])):
        logging.error("Ensemble ordering at delta=0.5 violated")
        ok = False
    return ok


def check_dominance(config: BoundConfig) -> bool:
    """Bound ordering on NSRA(N=100, q=3) over two BIAWGN channels"""
    spectrum = EnsembleSpec(kind='nsra', N=100, q=3).spectrum()
    ok = True
    for ebno2 in (1.0, 3.0, 5.0):
        channel_set = ParallelChannelSet.biawgn_ebno(1.0 / 3.0, [2.0, ebno2], [0.5, 0.5])
        ub = union_bhattacharyya(spectrum, channel_set, config=config.quadrature)
        uq = union_bound_q(spectrum, channel_set, config=config.quadrature)
        ds2 = ds2_bound(spectrum, channel_set, config=config)
        ub_terms = ub.log_values()
        for term in ds2.per_subcode:
            if term.log_value > ub_terms[term.h] + SLACK:
                logging.error(f"DS2 above union-Bhattacharyya at h={term.h}, Eb/N0_2={ebno2}")
                ok = False
        if uq.log_total > ub.log_total + SLACK:
            logging.error(f"union-q above union-Bhattacharyya at Eb/N0_2={ebno2}")
            ok = False

        gallager = error_bound(spectrum, channel_set, 'gallager61', config=config)
        evaluator = GallagerSubcode(spectrum.n, channel_set, config)
        union = union_log_terms(spectrum.log_a, channel_set, config.quadrature)
        for term in gallager.per_subcode:
            if term.method == 'union':
                continue
            if term.log_value > evaluator.fallback(float(spectrum.log_a[term.h]), term.h) + SLACK:
                logging.error(f"Gallager above its fallback at h={term.h}")
                ok = False
            if term.log_value > union[term.h] + SLACK:
                logging.error(f"Gallager above the union term at h={term.h}")
                ok = False

        exact = replace(config, threshold=0.0)
        block = error_bound(spectrum, channel_set, 'ds2', target='block', config=exact)
        bit = error_bound(spectrum, channel_set, 'ds2', target='bit', config=exact)
        if bit.log_total > block.log_total + SLACK:
            logging.error(f"Bit bound above block bound at Eb/N0_2={ebno2}")
            ok = False

        refined, _ = msf_bound(spectrum, channel_set, finite_length=True, config=config)
        plain, _ = msf_bound(spectrum, channel_set, finite_length=False, config=config)
        if refined.log_unclamped > plain.log_unclamped + SLACK:
            logging.error(f"Refined MSF above unrefined MSF at Eb/N0_2={ebno2}")
            ok = False

        for h in (5, 20, 60):
            if not math.isfinite(spectrum.log_a[h]):
                continue
            tight, jensen = hybrid_subcode_value(float(spectrum.log_a[h]), h, spectrum.n, channel_set,
                                                 0.4, 0.7, config=config)
            if tight > jensen + SLACK:
                logging.error(f"Hybrid tight form above its Jensen form at h={h}")
                ok = False
        logging.info(f"Eb/N0_2={ebno2} dB | ub={ub.log10_total:.4f} | ds2={ds2.log10_total:.4f} | "
                     f"gallager61={gallager.log10_total:.4f} | msf={refined.log10_total:.4f}")
    return ok


def check_regions(config: RegionConfig) -> bool:
    """Gap between the Gallager-exponent symmetric threshold and the capacity limit"""
    cases = [
        (EnsembleSpec(kind='nsra', q=3), 2.2, 0.1),
        (EnsembleSpec(kind='spra', N=100), 0.5, 0.1),
        (EnsembleSpec(kind='spara', N=15, M=6), None, 0.1),
    ]
    ok = True
    for spec, expected, tol in cases:
        threshold = symmetric_threshold(spec, 'gallager61', spec.rate, [0.5, 0.5], config=config)
        gap = capacity_gap_db(threshold, spec.rate)
        logging.info(f"{spec.tag} | threshold={threshold:.3f} dB | gap to capacity={gap:.3f} dB")
        if expected is None:
            if gap > tol:
                logging.error(f"{spec.tag}: gap {gap:.3f} dB exceeds {tol} dB")
                ok = False
        elif abs(gap - expected) > tol:
            logging.error(f"{spec.tag}: gap {gap:.3f} dB, expected {expected} +/- {tol} dB")
            ok = False
    return ok


def check_small_delta(config: RegionConfig) -> bool:
    """E_ds2(delta)/delta at delta = 1e-4 against -r0 - ln gamma_bar"""
    growth = growth_curve(EnsembleSpec(kind='nsra', q=3))
    channel_set = ParallelChannelSet.biawgn_ebno(1.0 / 3.0, [4.0, 4.0], [0.5, 0.5])
    delta = 1e-4
    estimate = ds2_exponent(delta, growth, channel_set, config) / delta
    closed = small_delta_slope(growth, channel_set, config)
    logging.info(f"E_ds2/delta={estimate:.6f} | -r0 - ln gamma_bar={closed:.6f}")
    return abs(estimate - closed) <= 0.1 * abs(closed)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description='Parallel-channel bounds acceptance suite')
    parser.add_argument('--coarse', action='store_true',
                        help='coarse optimizer grids and a 40-point delta grid (minutes instead of an hour)')
    parser.add_argument('--only', choices=['growth', 'dominance', 'regions', 'slope'], default=None,
                        help='run a single check')
    args = parser.parse_args()

    bound_config = BoundConfig.from_config()
    region_config = RegionConfig.from_config()
    if args.coarse:
        bound_config = bound_config.with_grid(GridConfig(coarse=11, refine_rounds=3))
        region_config.delta_points = 40
        region_config.tol_db = 0.05
        region_config.grid = GridConfig(coarse=11, refine_rounds=3)

    checks = {
        'growth': check_growth,
        'dominance': lambda: check_dominance(bound_config),
        'regions': lambda: check_regions(region_config),
        'slope': lambda: check_small_delta(region_config),
    }
    selected = [args.only] if args.only else list(checks)

    logging.info("=" * 70)
    logging.info(f"ACCEPTANCE SUITE | checks={selected} | coarse={args.coarse}")
    logging.info("=" * 70)

    failed = []
    for name in selected:
        start = time.time()
        passed = checks[name]()
        logging.info(f"[{'OK' if passed else 'FAIL'}] {name} | elapsed={time.time() - start:.1f}s")
        if not passed:
            failed.append(name)

    logging.info("=" * 70)
    logging.info("ALL CHECKS PASSED" if not failed else f"FAILED: {failed}")
    logging.info("=" * 70)
    sys.exit(1 if failed else 0)
