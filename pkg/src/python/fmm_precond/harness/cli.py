import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from fmm_precond.discretize.assembly import ElementType
from fmm_precond.discretize.grid import Grid
from fmm_precond.discretize.problems import ProblemId, make_problem
from fmm_precond.discretize.system import build_system
from fmm_precond.harness.catalog import CATALOG, experiment
from fmm_precond.harness.config import ExperimentConfig, ExperimentKind, load_config
from fmm_precond.harness.emit import emit_experiment
from fmm_precond.harness.matrix_market import export_matrix
from fmm_precond.harness.runner import run_experiment
from fmm_precond.harness.selftest import selftest
from fmm_precond.utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED_CHECKS = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fmm-precond',
                                     description='FMM/BEM preconditioning workbench for interior Helmholtz problems')
    parser.add_argument('--out-dir', help='root directory for result files (default: results)')
    parser.add_argument('--seed', type=int, help='seed for every random choice in the run')
    parser.add_argument('--threads', type=int, help='worker threads for independent cells')
    parser.add_argument('--maxit', type=int, help='outer iteration cap')
    parser.add_argument('--no-timings', action='store_true', help='leave wall times out for byte-identical reruns')
    parser.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='run catalog experiments by identifier')
    run.add_argument('experiments', nargs='+', metavar='ID', help=f'one of {", ".join(CATALOG)}')
    commands.add_parser('run-all', help='run the whole catalog')

    solve = commands.add_parser('solve', help='run a solve sweep described by a TOML file')
    solve.add_argument('config', type=Path)
    spectrum = commands.add_parser('spectrum', help='compute spectra for a sweep described by a TOML file')
    spectrum.add_argument('config', type=Path)

    export = commands.add_parser('export-matrix', help='write A and b of one FEM system in Matrix Market format')
    export.add_argument('--problem', required=True, choices=[p.value for p in ProblemId])
    export.add_argument('--h', type=float, required=True, help='mesh level')
    export.add_argument('--kappa', type=float)
    export.add_argument('--mu', type=float)
    export.add_argument('--element', default='Q1', choices=[e.value for e in ElementType])
    export.add_argument('--output', type=Path, required=True)

    commands.add_parser('selftest', help='fast property sweep over the numerical core')
    return parser


def _overrides(args) -> dict:
    return {'out_dir': args.out_dir, 'seed': args.seed, 'threads': args.threads, 'maxit': args.maxit,
            'record_timings': False if args.no_timings else None}


def _run(experiment_id: str, configs: Sequence[ExperimentConfig], args) -> None:
    configs = [config.with_overrides(**_overrides(args)) for config in configs]
    results = [run_experiment(config) for config in configs]
    emit_experiment(experiment_id, results, configs[0].out_dir, seed=configs[0].seed)


def _run_file(path: Path, kind: ExperimentKind, args) -> None:
    config = load_config(path, **_overrides(args))
    if config.kind is not kind:
        config = config.with_overrides(kind=kind)
    _run(config.experiment_id, [config], args)


def _export(args) -> None:
    problem = make_problem(ProblemId(args.problem), kappa=args.kappa, mu=args.mu)
    system = build_system(problem, Grid.for_mesh_level(problem.bounds, args.h), ElementType(args.element))
    export_matrix(system.A, system.b, args.output)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        if args.command == 'run':
            for experiment_id in args.experiments:
                _run(experiment_id, experiment(experiment_id), args)
        elif args.command == 'run-all':
            for experiment_id in CATALOG:
                _run(experiment_id, experiment(experiment_id), args)
        elif args.command == 'solve':
            _run_file(args.config, ExperimentKind.SOLVE, args)
        elif args.command == 'spectrum':
            _run_file(args.config, ExperimentKind.SPECTRUM, args)
        elif args.command == 'export-matrix':
            _export(args)
        elif args.command == 'selftest':
            checks = selftest(args.seed or 0)
            for check in checks:
                print(f'{"ok" if check.passed else "FAILED":6} {check.name}: {check.detail}')
            return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILED_CHECKS
    except (ConfigurationError, ValueError, OSError) as e:
        logger.error('%s', e)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
