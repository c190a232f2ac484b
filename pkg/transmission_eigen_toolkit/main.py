"""
Command-line front end of the transmission eigenvalue toolkit.

    forward    D(k) on a real k-grid
    eigs       transmission eigenvalues and Hadamard data
    inverse    potential reconstruction from an inverse input file
    roundtrip  forward D -> reconstruction -> error report
    example    a published reference fixture
"""

import argparse
import copy
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import yaml
from dotenv import load_dotenv
from pydantic import ValidationError

from .benchmarks.catalog import run_benchmark
from .forward.key_quantity import make_key_quantity
from .inverse.datum import DSource, load_inverse_input
from .inverse.pipeline import reconstruct
from .models.exceptions import AccuracyError, PotentialValidationError, ToolkitError
from .models.run_config import COMMANDS, RunConfig
from .potential.io import load_potential
from .spectra.eigenvalues import transmission_eigenvalues
from .spectra.hadamard import hadamard_extract
from .utils import parallel
from .utils.data_collector import ResultCollector, convert_np
from .utils.reporting import ToolkitReporter
from .utils.visualization import ResultVisualizer

DEFAULT_CONFIG = Path(__file__).parent / 'config' / 'toolkit_config.yaml'


def setup_logging(config: dict) -> None:
    """
    Set up logging configuration.

    Args:
        config: Dictionary containing logging configuration
    """
    logging.basicConfig(
        level=config['logging']['level'],
        format=config['logging']['format'],
        filename=config['logging']['file'],
        force=True
    )


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(config_path: Optional[str] = None) -> dict:
    """
    Load the toolkit configuration.

    Args:
        config_path: YAML file merged over the packaged defaults

    Returns:
        Dictionary containing the toolkit configuration
    """
    with open(DEFAULT_CONFIG, 'r') as f:
        config = yaml.safe_load(f)
    if config_path is None:
        return config
    path = Path(config_path)
    if not path.exists():
        raise PotentialValidationError(f"config file not found: {path}", stage='config')
    try:
        with open(path, 'r') as f:
            user = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise PotentialValidationError(f"config file is not valid YAML: {e}", stage='config')
    if not isinstance(user, dict):
        raise PotentialValidationError("config file must hold a mapping", stage='config')
    return _merge(config, user)


class _Parser(argparse.ArgumentParser):
    """Argument errors become validation errors so they reach the JSON error path."""

    def error(self, message):
        raise PotentialValidationError(message, stage='arguments')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(description="Transmission eigenvalue toolkit for the half-line Schrödinger equation")
    parser.add_argument("command", choices=COMMANDS, help="What to run")
    parser.add_argument("example_id", nargs="?", help="Fixture id for the example command")
    parser.add_argument("--potential", type=str, help="Potential JSON file")
    parser.add_argument("--input", type=str, help="Inverse input JSON file")
    bc = parser.add_mutually_exclusive_group()
    bc.add_argument("--cot-theta", type=float, help="Boundary parameter cot(theta)")
    bc.add_argument("--dirichlet", action="store_true", help="Dirichlet boundary condition")
    parser.add_argument("--k-max", type=float, help="Real reach of grids and searches")
    parser.add_argument("--beta-max", type=float, help="Imaginary reach of searches")
    parser.add_argument("--rect", type=str, help="Complex search rectangle re0,re1,im0,im1")
    parser.add_argument("--grid", type=int, help="Forward grid size and Nyström node count")
    parser.add_argument("--tol", type=float, help="Eigenvalue residual tolerance")
    parser.add_argument("--x-max", type=float, help="Reconstruction grid end")
    parser.add_argument("--dx", type=float, help="Reconstruction grid spacing")
    parser.add_argument("--out", type=str, help="Output file")
    parser.add_argument("--format", choices=('csv', 'json'), help="Tabular output format")
    parser.add_argument("--config", type=str, help="YAML file merged over the packaged config")
    parser.add_argument("--plot", action="store_true", help="Also write a PNG next to --out")
    return parser


def _default_out(command: str, fmt: str) -> str:
    ext = 'json' if command in ('inverse', 'roundtrip') else fmt
    return str(Path('output') / f"{command}.{ext}")


def run_config_from_args(args: argparse.Namespace, config: dict) -> RunConfig:
    """Validated RunConfig from parsed arguments."""
    fmt = args.format or config['output']['format']
    try:
        return RunConfig(
            command=args.command,
            out=args.out or _default_out(args.command, fmt),
            potential_path=args.potential,
            input_path=args.input,
            cot_theta=args.cot_theta,
            dirichlet=args.dirichlet,
            format=fmt,
            k_max=args.k_max,
            beta_max=args.beta_max,
            rect=args.rect,
            grid=args.grid,
            tol=args.tol,
            x_max=args.x_max,
            dx=args.dx,
            example_id=args.example_id,
            plot=args.plot or bool(config['output'].get('plot')),
            config_path=args.config
        )
    except ValidationError as e:
        raise PotentialValidationError(
            f"invalid arguments: {e.errors()[0]['msg']}", stage='arguments',
            details={'errors': json.loads(e.json())}
        )


def _inverse_config(rc: RunConfig, config: dict, support_b: float) -> dict:
    config = copy.deepcopy(config)
    inverse = config.setdefault('inverse', {})
    if rc.dx is not None:
        inverse['dx'] = rc.dx
    if rc.x_max is not None:
        inverse['x_max_factor'] = rc.x_max / support_b
    if rc.grid is not None:
        inverse['nystrom_nodes'] = rc.grid
    return config


def run_forward(rc: RunConfig, config: dict, collector: ResultCollector) -> int:
    p = load_potential(rc.potential_path)
    fwd = config['forward']
    k_max = rc.k_max or fwd['k_max']
    n = rc.grid or fwd['grid_points']
    ks = np.linspace(0.0, k_max, n).astype(complex)
    Ds = make_key_quantity(p, rc.boundary_condition, fwd.get('method', 'auto'))(ks)
    collector.save_key_quantity(ks, Ds)
    if rc.plot:
        ResultVisualizer().plot_key_quantity(ks, Ds, collector.out_path.with_suffix('.png'))
    return 0


def run_eigs(rc: RunConfig, config: dict, collector: ResultCollector) -> int:
    p = load_potential(rc.potential_path)
    bc = rc.boundary_condition
    D = make_key_quantity(p, bc, config['forward'].get('method', 'auto'))
    records = transmission_eigenvalues(p, bc, rc.search_params(config['spectra']), Dfun=D)
    try:
        hadamard = hadamard_extract(D, records, support_b=p.support_b)
    except ToolkitError as e:
        raise e.with_stage('hadamard_extract')
    collector.save_eigenvalues(records, hadamard, p.support_b)
    if rc.plot:
        ResultVisualizer().plot_eigenvalues(records, collector.out_path.with_suffix('.png'))
    return 0


def run_inverse(rc: RunConfig, config: dict, collector: ResultCollector) -> int:
    d, cot_theta = load_inverse_input(rc.input_path)
    result = reconstruct(d, cot_theta, _inverse_config(rc, config, d.support_b))
    collector.save_reconstruction(result)
    if rc.plot:
        ResultVisualizer().plot_reconstruction(result, collector.out_path.with_suffix('.png'))
    return 0


def run_roundtrip(rc: RunConfig, config: dict, collector: ResultCollector) -> int:
    p = load_potential(rc.potential_path)
    bc = rc.boundary_condition
    result = reconstruct(DSource.from_forward(p, bc), bc.cot_theta, _inverse_config(rc, config, p.support_b))
    ToolkitReporter(collector, config['output']).roundtrip_report(p, bc, result)
    if rc.plot:
        ResultVisualizer().plot_reconstruction(result, collector.out_path.with_suffix('.png'), exact=p)
    return 0


def run_example(rc: RunConfig, config: dict, collector: ResultCollector) -> int:
    report = run_benchmark(rc.example_id)
    print(ToolkitReporter(collector, config['output']).benchmark_report(report))
    if not report.passed:
        failed = report.table.loc[~report.table['passed'], 'quantity'].tolist()
        raise AccuracyError(f"example {rc.example_id} deviates from its reference values",
                            stage='example', details={'failed': failed})
    return 0


COMMAND_HANDLERS: Dict[str, Callable[[RunConfig, dict, ResultCollector], int]] = {
    'forward': run_forward,
    'eigs': run_eigs,
    'inverse': run_inverse,
    'roundtrip': run_roundtrip,
    'example': run_example,
}


def run(rc: RunConfig, config: dict) -> int:
    """
    Run one command.

    Args:
        rc: Validated run configuration
        config: Toolkit configuration

    Returns:
        Process exit status
    """
    parallel.configure(config.get('parallel', {}).get('max_workers'))
    workers = parallel.worker_count()
    collector = ResultCollector(rc.out, rc.format)
    logging.info(f"Running '{rc.command}' with output {rc.out} on {workers} thread(s)")
    try:
        status = COMMAND_HANDLERS[rc.command](rc, config, collector)
    except ToolkitError as e:
        raise e.with_stage(rc.command)
    for path in collector.written:
        logging.info(f"Wrote {path}")
    return status


def _emit_error(payload: Dict[str, Any]) -> None:
    sys.stderr.write(json.dumps(convert_np(payload)) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the exit code."""
    load_dotenv()
    try:
        args = build_parser().parse_args(argv)
        config = load_config(args.config)
        setup_logging(config)
        rc = run_config_from_args(args, config)
        status = run(rc, config)
        logging.info("Run completed successfully")
        return status
    except ToolkitError as e:
        logging.error(f"{type(e).__name__} in stage {e.stage}: {e.message}")
        _emit_error(e.to_dict())
        return e.exit_code
    except Exception as e:
        logging.exception(f"Run failed: {str(e)}")
        _emit_error({'error': type(e).__name__, 'stage': None, 'message': str(e),
                     'exit_code': 1, 'details': {}})
        return 1


if __name__ == "__main__":
    sys.exit(main())
