"""
Command-line entry point: ``jcm-sim --config scenario.ini``.

Exit statuses: 0 success, 2 configuration error, 3 truncation failure,
4 numerical failure.
"""

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from dotenv import load_dotenv
from numpy.linalg import LinAlgError
from pydantic import ValidationError

from ..config.settings import config
from ..exceptions import (
    InvalidOperatorError,
    InvalidStateError,
    NumericalError,
    ScenarioConfigError,
    SimulationError,
    TruncationError,
)
from ..utils.logger import SimLogger, get_logger
from .config_file import apply_override, apply_overrides, build_scenario, load_raw, parse_value, scenario_to_raw
from .pipeline import MANIFEST_NAME, ScenarioPipeline
from .schemas import Scenario
from .writers import write_json, write_rows

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TRUNCATION = 3
EXIT_NUMERICAL = 4


def exit_status(error: BaseException) -> int:
    if isinstance(error, (ScenarioConfigError, ValidationError)):
        return EXIT_CONFIG
    if isinstance(error, TruncationError):
        return EXIT_TRUNCATION
    if isinstance(error, (NumericalError, InvalidOperatorError, InvalidStateError, LinAlgError, SimulationError)):
        return EXIT_NUMERICAL
    raise error


def _out_dir(out_dir: Optional[str]) -> Path:
    return Path(out_dir or config.output_dir)


def point_dirname(parameter: str, value: float) -> str:
    return f"{parameter}={value:g}"


def parse_sweep(text: str) -> tuple[str, List[float]]:
    """``PARAM=v1,v2,...`` -> (PARAM, values)"""
    if "=" not in text:
        raise ScenarioConfigError(f"sweep {text!r} must look like PARAM=v1,v2,...")
    parameter, values = text.split("=", 1)
    try:
        parsed = [float(value) for value in parse_value("values", values)]
    except ValueError as exc:
        raise ScenarioConfigError(f"sweep values {values!r} are not numbers") from exc
    if not parsed:
        raise ScenarioConfigError(f"sweep {text!r} has no values")
    return parameter.strip(), parsed


def run(
    config_path: str,
    out_dir: Optional[str] = None,
    overrides: Sequence[str] = (),
    sim_logger: Optional[SimLogger] = None,
    threads: Optional[int] = None,
) -> int:
    """Run one scenario file (or manifest); a [sweep] section turns it into a sweep"""
    sim_logger = sim_logger or get_logger(log_level=config.log_level)
    try:
        raw = apply_overrides(load_raw(config_path), overrides)
        scenario = build_scenario(raw)
        if scenario.sweep is not None:
            return sweep(config_path, scenario.sweep.parameter, scenario.sweep.values, out_dir, overrides, threads, sim_logger)
        ScenarioPipeline(scenario, _out_dir(out_dir), sim_logger).run()
        return EXIT_OK
    except Exception as exc:
        status = exit_status(exc)
        sim_logger.log_error(exc, {"config": str(config_path), "exit_status": status})
        return status


def sweep(
    config_path: str,
    parameter: str,
    values: Sequence[float],
    out_dir: Optional[str] = None,
    overrides: Sequence[str] = (),
    threads: Optional[int] = None,
    sim_logger: Optional[SimLogger] = None,
) -> int:
    """One output set per value plus a combined long-format CSV"""
    sim_logger = sim_logger or get_logger(log_level=config.log_level)
    threads = threads or config.threads
    try:
        base = apply_overrides(load_raw(config_path), overrides)
        base["sweep"] = {"parameter": parameter, "values": list(values)}
        sweep_scenario = build_scenario(base)

        points: List[tuple[str, Scenario]] = []
        for value in sweep_scenario.sweep.values:
            point_raw = apply_override(base, parameter, value)
            point_raw.pop("sweep", None)
            point_raw["name"] = f"{sweep_scenario.name}_{point_dirname(parameter, value)}"
            points.append((point_dirname(parameter, value), build_scenario(point_raw)))

        root = _out_dir(out_dir)
        sim_logger.log_run_event("sweep_started", {"parameter": parameter, "values": list(values), "threads": threads})

        def run_point(point: tuple[str, Scenario]) -> Dict[str, Any]:
            dirname, scenario = point
            return ScenarioPipeline(scenario, root / dirname, sim_logger).run()

        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(run_point, points))

        _write_combined(root, sweep_scenario, results)
        write_json(
            root / MANIFEST_NAME,
            {
                "scenario": scenario_to_raw(sweep_scenario),
                "points": [dirname for dirname, _ in points],
                "resolved": {dirname: result["resolved"] for (dirname, _), result in zip(points, results)},
            },
        )
        sim_logger.log_run_event("sweep_finished", {"parameter": parameter, "points": len(points)})
        return EXIT_OK
    except Exception as exc:
        status = exit_status(exc)
        sim_logger.log_error(exc, {"config": str(config_path), "sweep": parameter, "exit_status": status})
        return status


def _write_combined(root: Path, scenario: Scenario, results: List[Dict[str, Any]]) -> None:
    names = scenario.outputs.channel_names()
    if not names:
        return

    def rows():
        for value, result in zip(scenario.sweep.values, results):
            for label, series in result["series"].items():
                for row in series.rows():
                    yield [value, label, *row]

    write_rows(root / f"sweep_{scenario.sweep.parameter}.csv", ["value", "series", "lambda_t", *names], rows())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jcm-sim",
        description="Two-atom Jaynes-Cummings entanglement simulator",
    )
    parser.add_argument("--config", required=True, help="Scenario file (.ini) or run manifest (.json)")
    parser.add_argument("--out", default=None, help="Output directory (default: JCM_OUTPUT_DIR or ./runs)")
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a scenario value, e.g. field.nbar_th=1 or model.jz=0.5 (repeatable)",
    )
    parser.add_argument("--sweep", default=None, metavar="PARAM=V1,V2,...", help="Sweep one scalar parameter")
    parser.add_argument("--threads", type=int, default=None, help="Parallel sweep points")
    parser.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    sim_logger = get_logger(log_file=config.log_file, log_level=args.log_level or config.log_level)

    if args.sweep:
        try:
            parameter, values = parse_sweep(args.sweep)
        except ScenarioConfigError as exc:
            sim_logger.log_error(exc, {"sweep": args.sweep})
            return EXIT_CONFIG
        return sweep(args.config, parameter, values, args.out, args.override, args.threads, sim_logger)
    return run(args.config, args.out, args.override, sim_logger, args.threads)


if __name__ == "__main__":
    sys.exit(main())
