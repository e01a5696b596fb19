"""Command line front end.

Subcommands: ``decompose``, ``check``, ``music`` and ``reproduce-fig2``.
Angles are in degrees at this boundary. Exit codes: 0 success, 2 user or
configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .decomposition import DecompositionQuery, enumerate_decompositions, rank_decompositions
from .geometry import Decomposition, MimoArrayPair, SensorPositions
from .identifiability import (FalsificationConfig, RankBudgetError, check_condition_a,
                              check_condition_b)
from .manifold import AngleSet, simulate_snapshot
from .music import DEFAULT_GRID_STEP_DEG, angle_grid, estimate_doa, is_resolved
from .presets import PRESETS, get_preset

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USER = 2
EXIT_NUMERIC = 3

FIG2_SCENES = {'scene1': [10.0, 12.0], 'scene2': [10.0, 76.82]}
RESOLVE_TOL_DEG = 0.5


class UserError(Exception):
    """Invalid input; reported with exit code 2."""


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + '\n'


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _positions(text: str) -> SensorPositions:
    try:
        return SensorPositions.parse(text)
    except ValueError as e:
        raise UserError('Bad array %r: %s' % (text, e)) from None


def _falsification_config(args) -> FalsificationConfig:
    return FalsificationConfig(seed=args.seed)


def cmd_decompose(args) -> int:
    parent = _positions(args.array)
    if args.ns > len(parent) or args.l > len(parent) or args.ns < 1 or args.l < 1:
        raise UserError('Need 1 <= N_s, L <= |S| = %d (got N_s=%d, L=%d).'
                        % (len(parent), args.ns, args.l))
    query = DecompositionQuery(parent, args.ns, args.l, max_results=args.max_results)
    found = enumerate_decompositions(query)
    if not found.decompositions:
        raise UserError('No decomposition of %s with N_s=%d and L=%d exists.'
                        % (parent.to_list(), args.ns, args.l))
    if not found.complete:
        log.warning('Search stopped early after %d nodes; results are partial.',
                    found.nodes)
    ranked = rank_decompositions(found.decompositions, args.k,
                                 _falsification_config(args))
    report = {'parent': parent.to_list(), 'n_s': args.ns, 'l': args.l, 'k': args.k,
              'complete': found.complete,
              'decompositions': [r.to_json() for r in ranked]}
    if args.out:
        _emit(_dump_json(report), args.out)
    if args.json:
        sys.stdout.write(_dump_json(report))
    else:
        for r in ranked:
            a = r.verdict_a.status.value if r.verdict_a else '-'
            b = r.verdict_b.status.value if r.verdict_b else '-'
            if not r.feasible:
                a = b = 'infeasible'
            print('S_b=%-30s S_c=%-16s N_b=%-3d (a)=%-20s (b)=%s' % (
                r.decomposition.basic.to_list(), r.decomposition.shifts.to_list(),
                r.aperture_b, a, b))
    return EXIT_OK


def cmd_check(args) -> int:
    if args.sb is None and args.sc is None:
        raise UserError('Give at least one of --sb and --sc.')
    cfg = _falsification_config(args)
    report = {'k': args.k}
    try:
        if args.sb is not None:
            report['verdict_a'] = check_condition_a(_positions(args.sb), args.k, cfg).to_json()
        if args.sc is not None:
            report['verdict_b'] = check_condition_b(_positions(args.sc), args.k, cfg).to_json()
    except (RankBudgetError, ValueError) as e:
        raise UserError(str(e)) from None
    if args.sb is not None and args.sc is not None:
        n_s, l = len(_positions(args.sb)), len(_positions(args.sc))
        report['k_max'] = min(n_s, l + 1) - 1
    _emit(_dump_json(report), args.out)
    return EXIT_OK


def _scene_geometry(cfg: dict) -> tuple[SensorPositions, Optional[Decomposition]]:
    if 'preset' in cfg:
        preset = get_preset(cfg['preset'])
        return preset.virtual, preset.decomposition
    if 'array' in cfg:
        return SensorPositions.from_iterable(cfg['array']), None
    if 'tx' in cfg and 'rx' in cfg:
        pair = MimoArrayPair(SensorPositions.from_iterable(cfg['tx']),
                             SensorPositions.from_iterable(cfg['rx']))
        return pair.virtual, None
    raise UserError('Scene needs "preset", "array" or "tx"/"rx".')


def _resolve_decomposition(cfg: dict, array: SensorPositions,
                           default: Optional[Decomposition], k: int) -> Decomposition:
    spec = cfg.get('decomposition')
    if spec is None:
        if default is None:
            raise UserError('No "decomposition" given and no preset default.')
        return default
    if 'search' in spec:
        search = spec['search']
        found = enumerate_decompositions(
            DecompositionQuery(array, int(search['ns']), int(search['l'])))
        if not found.decompositions:
            raise UserError('No decomposition with N_s=%s, L=%s.'
                            % (search['ns'], search['l']))
        return rank_decompositions(found.decompositions, k)[0].decomposition
    return Decomposition(SensorPositions.from_iterable(spec['basic']),
                         SensorPositions.from_iterable(spec['shifts']), array)


def load_config(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UserError('Cannot read config %s: %s' % (path, e)) from None


def run_music(cfg: dict) -> dict:
    """Runs one scene described by a config dict; returns the artifacts.

    The returned dict has ``spectrum_csv`` (text), ``peaks`` (JSON-ready
    dict) and ``snapshot`` (list of ``[re, im]`` pairs).
    """
    array, default = _scene_geometry(cfg)
    targets = cfg.get('targets_deg')
    if not targets:
        raise UserError('"targets_deg" must list at least one angle.')
    if any(not -90.0 <= t < 90.0 for t in targets):
        raise UserError('Target angles must lie in [-90, 90).')
    music = cfg.get('music', {})
    k = int(music.get('k', len(targets)))
    step = float(music.get('grid_step_deg', DEFAULT_GRID_STEP_DEG))
    snr_db = cfg.get('snr_db')
    snr_db = math.inf if snr_db is None else float(snr_db)
    seed = int(cfg.get('seed', 0))
    try:
        deco = _resolve_decomposition(cfg, array, default, k)
    except (ValueError, KeyError, TypeError) as e:
        raise UserError('Bad decomposition: %s' % e) from None
    if not 1 <= k < deco.n_s:
        raise UserError('k must satisfy 1 <= k < N_s = %d.' % deco.n_s)
    snap = simulate_snapshot(array, AngleSet.from_degrees(targets), snr_db, seed)
    est = estimate_doa(snap, deco, k, angle_grid(step))
    peaks = est.peaks_json()
    peaks['resolved'] = is_resolved(est.angles_deg, targets, RESOLVE_TOL_DEG,
                                    est.shortfall)
    return {'spectrum_csv': est.spectrum.to_csv(), 'peaks': peaks,
            'snapshot': snap.to_pairs(), 'decomposition': deco}


def _apply_overrides(cfg: dict, args) -> dict:
    cfg = dict(cfg)
    if args.snr_db is not None:
        cfg['snr_db'] = args.snr_db
    if args.seed is not None:
        cfg['seed'] = args.seed
    if args.grid_step_deg is not None:
        cfg['music'] = dict(cfg.get('music', {}), grid_step_deg=args.grid_step_deg)
    if args.k is not None:
        cfg['music'] = dict(cfg.get('music', {}), k=args.k)
    return cfg


def cmd_music(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    result = run_music(cfg)
    output = cfg.get('output', {})
    out_dir = Path(args.out or output.get('dir', '.'))
    out_dir.mkdir(parents=True, exist_ok=True)
    spectrum_path = out_dir / output.get('spectrum_csv', 'spectrum.csv')
    peaks_path = out_dir / output.get('peaks_json', 'peaks.json')
    spectrum_path.write_text(result['spectrum_csv'])
    peaks_path.write_text(_dump_json(result['peaks']))
    if output.get('snapshot_json'):
        (out_dir / output['snapshot_json']).write_text(_dump_json(result['snapshot']))
    print(_dump_json(result['peaks']), end='')
    return EXIT_OK


def reproduce_fig2(out_dir: Path, seed: int = 0, snr_db: float = 20.0,
                   grid_step_deg: float = DEFAULT_GRID_STEP_DEG) -> dict:
    """Runs both two-target scenes on S1, S2 and S3 and writes the artifacts."""
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {'seed': seed, 'snr_db': snr_db, 'grid_step_deg': grid_step_deg,
               'resolve_tol_deg': RESOLVE_TOL_DEG, 'scenes': FIG2_SCENES}
    for name in sorted(PRESETS):
        summary[name] = {}
        for scene, targets in FIG2_SCENES.items():
            cfg = {'preset': name, 'targets_deg': targets, 'snr_db': snr_db,
                   'seed': seed, 'music': {'k': len(targets),
                                           'grid_step_deg': grid_step_deg}}
            result = run_music(cfg)
            csv_name = '%s_%s.csv' % (name, scene)
            (out_dir / csv_name).write_text(result['spectrum_csv'])
            summary[name][scene] = dict(targets_deg=targets,
                                        peaks_deg=result['peaks']['angles_deg'],
                                        shortfall=result['peaks']['shortfall'],
                                        k_hat=result['peaks']['k_hat'],
                                        resolved=result['peaks']['resolved'],
                                        spectrum_csv=csv_name)
    (out_dir / 'summary.json').write_text(_dump_json(summary))
    return summary


def cmd_reproduce_fig2(args) -> int:
    summary = reproduce_fig2(Path(args.out), seed=args.seed if args.seed is not None else 0,
                             snr_db=args.snr_db if args.snr_db is not None else 20.0,
                             grid_step_deg=args.grid_step_deg or DEFAULT_GRID_STEP_DEG)
    for name in sorted(PRESETS):
        for scene in FIG2_SCENES:
            row = summary[name][scene]
            print('%s %s resolved=%s peaks=%s' % (
                name, scene, row['resolved'], ['%.3f' % a for a in row['peaks_deg']]))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='smoothdoa',
        description='Single-snapshot DOA estimation with spatial smoothing on sparse arrays.')
    parser.add_argument('--version', action='version', version=__version__)
    parser.add_argument('-v', '--verbose', action='store_true')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('decompose', help='enumerate and rank sum-set decompositions')
    p.add_argument('--array', required=True, help='comma separated positions')
    p.add_argument('--ns', type=int, required=True, help='basic subarray size N_s')
    p.add_argument('--l', type=int, required=True, help='number of shifts L')
    p.add_argument('--k', type=int, default=None, help='number of sources to rank for')
    p.add_argument('--max-results', type=int, default=10000)
    p.add_argument('--seed', type=int, default=0, help='falsification seed')
    p.add_argument('--json', action='store_true', help='print JSON instead of a table')
    p.add_argument('--out', help='write the JSON report here')
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser('check', help='check the two identifiability conditions')
    p.add_argument('--sb', help='basic subarray, condition (a)')
    p.add_argument('--sc', help='shift set, condition (b)')
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--out')
    p.set_defaults(func=cmd_check)

    p = sub.add_parser('music', help='run MUSIC on a JSON scene config')
    p.add_argument('config')
    p.add_argument('--snr-db', type=float, default=None)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--grid-step-deg', type=float, default=None)
    p.add_argument('--k', type=int, default=None)
    p.add_argument('--out', help='output directory')
    p.set_defaults(func=cmd_music)

    p = sub.add_parser('reproduce-fig2', help='run the built-in two-target scenes')
    p.add_argument('--out', required=True, help='output directory')
    p.add_argument('--snr-db', type=float, default=None)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--grid-step-deg', type=float, default=None)
    p.set_defaults(func=cmd_reproduce_fig2)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(levelname)s: %(message)s')
    try:
        return args.func(args)
    except UserError as e:
        print('error: %s' % e, file=sys.stderr)
        return EXIT_USER
    except (np.linalg.LinAlgError, FloatingPointError) as e:
        print('numerical failure: %s' % e, file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        print('error: %s' % e, file=sys.stderr)
        return EXIT_USER


if __name__ == '__main__':
    sys.exit(main())
