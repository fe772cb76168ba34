#!/usr/bin/env python3
"""
opencarnot command line.

Sub-commands:
    info      structure summary, Hörmander and Métivier verdicts
    presets   list the preset library
    distance  solve d(0, target) and write the optimal control as CSV
    scan      distance values on a 2-D coordinate section
    probe     semiconcavity probes with a verdict exit code
"""

import argparse
import json
import logging
import os
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

try:
    from . import __version__
    from .analysis.probes import (
        ProbeError, ProbeReport, admissible_cusp_pair, engel_horizontal_probe,
        engel_vertical_probe, free_vertical_cusp_probe, horizontal_semiconcavity_probe,
        martinet_horizontal_probe, martinet_vertical_probe, second_difference,
        vertical_cusp_probe
    )
    from .analysis.scan import distance_section
    from .constants import (
        ALL_PROBE_KINDS, DEFAULT_CONTROL_CSV, DEFAULT_CUSP_BETAS, DEFAULT_ENGEL_VERTICAL_LAMBDAS,
        DEFAULT_FEAS_TOL, DEFAULT_HORIZONTAL_DELTA, DEFAULT_HORIZONTAL_LAMBDAS, DEFAULT_LOG_LEVEL,
        DEFAULT_N_STARTS, DEFAULT_N_STEPS, DEFAULT_N_WORKERS, DEFAULT_SECOND_DIFFERENCE_SCALES,
        DEFAULT_SEED, EXIT_INCONCLUSIVE, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION,
        LOG_DATE_FORMAT, LOG_FORMAT_DETAILED, LOG_FORMAT_SIMPLE, LOG_LEVEL_DEBUG, LOG_LEVEL_ENV_VAR,
        LOG_LEVEL_INFO, PROBE_CUSP, PROBE_ENGEL_HORIZONTAL, PROBE_ENGEL_VERTICAL, PROBE_FREE_CUSP,
        PROBE_HORIZONTAL, PROBE_MARTINET_HORIZONTAL, PROBE_MARTINET_VERTICAL, PROBE_SECOND_DIFFERENCE,
        VERDICT_INCONCLUSIVE, VERDICT_VIOLATION
    )
    from .distance import NotConvergedError, distance
    from .groups import CarnotStructure, GroupError, ModelSystem, StepTwoGroup, check_metivier
    from .io.export import dumps_json, write_control_csv, write_probe_csv, write_scan_csv, write_solver_report
    from .linalg_skew import bivector_index
    from .optimizer import SolverOptions
    from .preset_library import get_preset_library, resolve_group
    from .validation import ValidationError, parse_float_list
except ImportError:
    from src import __version__
    from src.analysis.probes import (
        ProbeError, ProbeReport, admissible_cusp_pair, engel_horizontal_probe,
        engel_vertical_probe, free_vertical_cusp_probe, horizontal_semiconcavity_probe,
        martinet_horizontal_probe, martinet_vertical_probe, second_difference,
        vertical_cusp_probe
    )
    from src.analysis.scan import distance_section
    from src.constants import (
        ALL_PROBE_KINDS, DEFAULT_CONTROL_CSV, DEFAULT_CUSP_BETAS, DEFAULT_ENGEL_VERTICAL_LAMBDAS,
        DEFAULT_FEAS_TOL, DEFAULT_HORIZONTAL_DELTA, DEFAULT_HORIZONTAL_LAMBDAS, DEFAULT_LOG_LEVEL,
        DEFAULT_N_STARTS, DEFAULT_N_STEPS, DEFAULT_N_WORKERS, DEFAULT_SECOND_DIFFERENCE_SCALES,
        DEFAULT_SEED, EXIT_INCONCLUSIVE, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION,
        LOG_DATE_FORMAT, LOG_FORMAT_DETAILED, LOG_FORMAT_SIMPLE, LOG_LEVEL_DEBUG, LOG_LEVEL_ENV_VAR,
        LOG_LEVEL_INFO, PROBE_CUSP, PROBE_ENGEL_HORIZONTAL, PROBE_ENGEL_VERTICAL, PROBE_FREE_CUSP,
        PROBE_HORIZONTAL, PROBE_MARTINET_HORIZONTAL, PROBE_MARTINET_VERTICAL, PROBE_SECOND_DIFFERENCE,
        VERDICT_INCONCLUSIVE, VERDICT_VIOLATION
    )
    from src.distance import NotConvergedError, distance
    from src.groups import CarnotStructure, GroupError, ModelSystem, StepTwoGroup, check_metivier
    from src.io.export import dumps_json, write_control_csv, write_probe_csv, write_scan_csv, write_solver_report
    from src.linalg_skew import bivector_index
    from src.optimizer import SolverOptions
    from src.preset_library import get_preset_library, resolve_group
    from src.validation import ValidationError, parse_float_list

logger = logging.getLogger(__name__)

VERDICT_EXIT_CODES = {
    VERDICT_VIOLATION: EXIT_VIOLATION,
    VERDICT_INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


def configure_logging(verbose: bool = False, debug: bool = False) -> int:
    """
    Install the root handler.

    The level comes from --debug, then --verbose, then the environment
    variable, then the default.

    Returns:
        The numeric level in effect
    """
    if debug:
        name = LOG_LEVEL_DEBUG
    elif verbose:
        name = LOG_LEVEL_INFO
    else:
        name = os.environ.get(LOG_LEVEL_ENV_VAR, DEFAULT_LOG_LEVEL).upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        level = logging.getLevelName(DEFAULT_LOG_LEVEL)
    fmt = LOG_FORMAT_DETAILED if level <= logging.DEBUG else LOG_FORMAT_SIMPLE
    logging.basicConfig(level=level, format=fmt, datefmt=LOG_DATE_FORMAT, force=True)
    return level


# ============================================================================
# Argument parsing
# ============================================================================

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose', action='store_true', help="log at INFO level")
    common.add_argument('--debug', action='store_true', help="log at DEBUG level")
    common.add_argument('--json', action='store_true', help="print the report as JSON")
    return common


def _solver_parser() -> argparse.ArgumentParser:
    solver = argparse.ArgumentParser(add_help=False)
    group = solver.add_argument_group('solver options')
    group.add_argument('--n-steps', type=int, default=DEFAULT_N_STEPS,
                       help=f"control grid size (default {DEFAULT_N_STEPS})")
    group.add_argument('--n-starts', type=int, default=DEFAULT_N_STARTS,
                       help=f"multistart count (default {DEFAULT_N_STARTS})")
    group.add_argument('--seed', type=int, default=DEFAULT_SEED,
                       help=f"random seed (default {DEFAULT_SEED})")
    group.add_argument('--feas-tol', type=float, default=DEFAULT_FEAS_TOL,
                       help=f"endpoint residual tolerance (default {DEFAULT_FEAS_TOL:g})")
    group.add_argument('--workers', type=int, default=DEFAULT_N_WORKERS,
                       help=f"worker processes for multistart (default {DEFAULT_N_WORKERS})")
    return solver


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    solver = _solver_parser()
    parser = argparse.ArgumentParser(
        prog='opencarnot',
        description="Numerical sub-Riemannian distances on step-two Carnot groups and model systems",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    info = sub.add_parser('info', parents=[common], help="describe a group")
    info.add_argument('--group', required=True, help="config file (.json) or preset such as free(3)")

    sub.add_parser('presets', parents=[common], help="list preset groups")

    dist = sub.add_parser('distance', parents=[common, solver], help="solve d(0, target)")
    dist.add_argument('--group', required=True, help="config file (.json) or preset")
    dist.add_argument('--target', required=True, help="comma separated coordinates x1,..,xm,t1,..,tl")
    dist.add_argument('--out', default=DEFAULT_CONTROL_CSV, help=f"control CSV (default {DEFAULT_CONTROL_CSV})")
    dist.add_argument('--report', default=None, help="optional JSON solver report")

    scan = sub.add_parser('scan', parents=[common, solver], help="distance on a coordinate section")
    scan.add_argument('--group', required=True, help="config file (.json) or preset")
    scan.add_argument('--base', required=True, help="base point coordinates")
    scan.add_argument('--axes', required=True, help="two coordinate indices, e.g. 2,3")
    scan.add_argument('--u-range', required=True, help="start,stop,count along the first axis")
    scan.add_argument('--v-range', required=True, help="start,stop,count along the second axis")
    scan.add_argument('--out', required=True, help="output CSV")

    probe = sub.add_parser('probe', parents=[common, solver], help="semiconcavity probe")
    probe.add_argument('kind', nargs='?', choices=ALL_PROBE_KINDS, help="probe kind")
    probe.add_argument('--probe', dest='probe_kind', choices=ALL_PROBE_KINDS, help="probe kind (alternative)")
    probe.add_argument('--group', default=None, help="config file (.json) or preset")
    probe.add_argument('--params', default=None, help="comma separated ladder (betas, lambdas, scales, z or y values)")
    probe.add_argument('--base', default=None, help="base point coordinates")
    probe.add_argument('--h', default=None, help="second-difference direction")
    probe.add_argument('--w', default=None, help="horizontal unit vector of a cusp probe")
    probe.add_argument('--sigma', default=None, help="vertical covector or bivector coefficients")
    probe.add_argument('--x2', type=float, default=1.0, help="Engel base point (0, x2, 0, 0)")
    probe.add_argument('--y', action='append', default=None,
                       help="horizontal displacement for the horizontal probe (repeatable)")
    probe.add_argument('--delta', type=float, default=DEFAULT_HORIZONTAL_DELTA, help="bound on |y|")
    probe.add_argument('--check-uniformity', action='store_true',
                       help="require the horizontal quotients to agree across directions")
    probe.add_argument('--out', default=None, help="output CSV")
    return parser


def solver_options(args: argparse.Namespace) -> SolverOptions:
    return SolverOptions(
        n_steps=args.n_steps, n_starts=args.n_starts, rng_seed=args.seed,
        feas_tol=args.feas_tol, n_workers=args.workers,
    )


def _floats(text: Optional[str], name: str, default: Sequence[float] = ()) -> List[float]:
    if text is None:
        return list(default)
    return parse_float_list(text, name)


def _point(G: CarnotStructure, text: str, name: str):
    return G.element(parse_float_list(text, name))


def _range(text: str, name: str):
    values = parse_float_list(text, name)
    if len(values) != 3 or not float(values[2]).is_integer():
        raise ValidationError(f"{name} must be start,stop,count with an integer count")
    return values[0], values[1], int(values[2])


# ============================================================================
# Commands
# ============================================================================

def describe_group(G: CarnotStructure) -> Dict[str, object]:
    """Structure summary used by cmd_info."""
    report: Dict[str, object] = {
        'name': G.name,
        'm': G.m,
        'ell': G.ell,
        'weights': G.weights.tolist(),
        'hormander': 'holds',
    }
    if isinstance(G, ModelSystem):
        report['metivier'] = 'not applicable'
        report['abnormal_minimizers'] = G.abnormal_description()
        return report

    metivier = check_metivier(G)
    report['metivier'] = metivier.verdict
    report['metivier_method'] = metivier.method
    if metivier.witness_sigma is not None and metivier.is_metivier is False:
        report['witness_sigma'] = metivier.witness_sigma.tolist()
    if metivier.is_metivier:
        report['abnormal_minimizers'] = "none"
    elif G.is_free:
        report['abnormal_minimizers'] = f"union of W x wedge^2 W over subspaces W with dim W = {G.m - 2}"
    elif metivier.is_metivier is False:
        report['abnormal_minimizers'] = "exist (the Métivier condition fails)"
    else:
        report['abnormal_minimizers'] = "undecided"
    return report


def cmd_info(args: argparse.Namespace) -> int:
    report = describe_group(resolve_group(args.group))
    if args.json:
        print(dumps_json(report))
        return EXIT_OK
    for key, value in report.items():
        print(f"{key:<20} {value}")
    return EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
    library = get_preset_library()
    entries = [
        {'name': p.name, 'category': p.category, 'description': p.description, 'parameter': p.parameter}
        for p in library.list_presets()
    ]
    if args.json:
        print(dumps_json({'presets': entries}))
        return EXIT_OK
    for category in library.list_categories():
        print(category)
        for p in library.list_presets(category):
            label = f"{p.name}({p.parameter})" if p.parameter else p.name
            print(f"  {label:<16} {p.description}")
    return EXIT_OK


def cmd_distance(args: argparse.Namespace) -> int:
    G = resolve_group(args.group)
    target = _point(G, args.target, "target")
    opts = solver_options(args)
    try:
        result = distance(G, target, opts)
    except NotConvergedError as e:
        logger.error("No method reached the feasibility tolerance (best residual %.2e)", e.result.residual)
        return EXIT_NOT_CONVERGED

    control_path = write_control_csv(result.control, args.out)
    if args.report:
        write_solver_report(result, args.report, extra={'control_csv_path': str(control_path)})
    if args.json:
        data = result.to_dict()
        data['control_csv_path'] = str(control_path)
        print(dumps_json(data))
    else:
        print(f"distance  {result.value:.10f}")
        print(f"residual  {result.residual:.3e}")
        print(f"method    {result.method}")
        print(f"starts    {result.n_starts} (seed {result.seed})")
        print(f"control   {control_path}")
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    G = resolve_group(args.group)
    base = _point(G, args.base, "base")
    axes = parse_float_list(args.axes, "axes")
    if len(axes) != 2 or not all(float(a).is_integer() for a in axes):
        raise ValidationError("axes must be two integer coordinate indices")
    rows = distance_section(G, base, [int(a) for a in axes],
                            _range(args.u_range, "u-range"), _range(args.v_range, "v-range"),
                            solver_options(args))
    path = write_scan_csv(rows, args.out)
    if args.json:
        print(dumps_json({'rows': rows, 'out': str(path)}))
    else:
        print(f"{len(rows)} points written to {path}")
    return EXIT_OK


def _require_step_two(args: argparse.Namespace, kind: str) -> StepTwoGroup:
    if args.group is None:
        raise ValidationError(f"probe {kind} needs --group")
    G = resolve_group(args.group)
    if not isinstance(G, StepTwoGroup):
        raise ValidationError(f"probe {kind} needs a step-two group, not {G.name}")
    return G


def _free_cusp_defaults(G: StepTwoGroup):
    """Base (e1, 0) and sigma = e_{m-1} ^ e_m."""
    x = np.zeros(G.m)
    x[0] = 1.0
    sigma = np.zeros(G.ell)
    if G.m >= 3:
        sigma[bivector_index(G.m - 2, G.m - 1, G.m)] = 1.0
    return G.element(np.concatenate([x, np.zeros(G.ell)])), sigma


def run_probe(kind: str, args: argparse.Namespace, opts: SolverOptions) -> ProbeReport:
    """Dispatch a probe kind to the probes module."""
    if kind == PROBE_SECOND_DIFFERENCE:
        if args.group is None or args.base is None or args.h is None:
            raise ValidationError("probe second-difference needs --group, --base and --h")
        G = resolve_group(args.group)
        return second_difference(G, _point(G, args.base, "base"), parse_float_list(args.h, "h"),
                                 _floats(args.params, "scales", DEFAULT_SECOND_DIFFERENCE_SCALES), opts)
    if kind == PROBE_CUSP:
        G = _require_step_two(args, kind)
        if args.w is None and args.sigma is None:
            w, sigma = admissible_cusp_pair(G)
        elif args.w is not None and args.sigma is not None:
            w, sigma = parse_float_list(args.w, "w"), parse_float_list(args.sigma, "sigma")
        else:
            raise ValidationError("give both --w and --sigma, or neither")
        return vertical_cusp_probe(G, w, sigma, _floats(args.params, "betas", DEFAULT_CUSP_BETAS), opts)
    if kind == PROBE_FREE_CUSP:
        G = _require_step_two(args, kind)
        g, sigma = _free_cusp_defaults(G)
        if args.base is not None:
            g = _point(G, args.base, "base")
        if args.sigma is not None:
            sigma = parse_float_list(args.sigma, "sigma")
        return free_vertical_cusp_probe(G, g, sigma, _floats(args.params, "betas", DEFAULT_CUSP_BETAS), opts)
    if kind == PROBE_ENGEL_VERTICAL:
        return engel_vertical_probe(args.x2, _floats(args.params, "lambdas", DEFAULT_ENGEL_VERTICAL_LAMBDAS), opts)
    if kind == PROBE_ENGEL_HORIZONTAL:
        return engel_horizontal_probe(args.x2, _floats(args.params, "lambdas", DEFAULT_HORIZONTAL_LAMBDAS), opts)
    if kind == PROBE_HORIZONTAL:
        G = _require_step_two(args, kind)
        g, _ = _free_cusp_defaults(G)
        if args.base is not None:
            g = _point(G, args.base, "base")
        if args.y:
            ys = [parse_float_list(y, "y") for y in args.y]
        else:
            ys = [0.1 * row for row in np.eye(G.m)[1:]]
        return horizontal_semiconcavity_probe(G, g, ys, args.delta, opts, args.check_uniformity)
    if kind == PROBE_MARTINET_VERTICAL:
        return martinet_vertical_probe(_floats(args.params, "z values", DEFAULT_ENGEL_VERTICAL_LAMBDAS), opts)
    if kind == PROBE_MARTINET_HORIZONTAL:
        return martinet_horizontal_probe(_floats(args.params, "y values", DEFAULT_HORIZONTAL_LAMBDAS), opts)
    raise ProbeError(f"unknown probe kind '{kind}'")


def cmd_probe(args: argparse.Namespace) -> int:
    kind = args.probe_kind or args.kind
    if kind is None:
        raise ValidationError("a probe kind is required")
    report = run_probe(kind, args, solver_options(args))
    if args.out:
        write_probe_csv(report.rows(), args.out)
    if args.json:
        print(dumps_json(report.to_dict()))
    else:
        print(f"probe {report.probe_kind}: {report.verdict}")
        print(f"{'parameter':>10} {'distance':>12} {'quotient':>12} {'lower bound':>12} converged")
        for p in report.points:
            bound = "" if p.lower_bound is None else f"{p.lower_bound:.6f}"
            print(f"{p.parameter:>10g} {p.distance:>12.6f} {p.quotient:>12.6f} {bound:>12} {p.converged}")
        for note in report.notes:
            print(f"note: {note}")
    return VERDICT_EXIT_CODES.get(report.verdict, EXIT_OK)


COMMANDS = {
    'info': cmd_info,
    'presets': cmd_presets,
    'distance': cmd_distance,
    'scan': cmd_scan,
    'probe': cmd_probe,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help and --version exit 0; argument errors map to the usage code
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    configure_logging(args.verbose, args.debug)

    try:
        return COMMANDS[args.command](args)
    except NotConvergedError as e:
        logger.error("Solver did not converge: %s", e)
        return EXIT_NOT_CONVERGED
    except (ValidationError, GroupError, json.JSONDecodeError) as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
