#!/usr/bin/env python3
"""
Spectrum Ledger - Main Application

Command-line entry point. Replays scenario files against the spectrum
securitization ledger and writes event logs and state documents, or
generates and runs seeded fuzz scenarios with invariant checking.

    python main.py run data/scenarios/table2.scn --events-out out/table2.events
    python main.py fuzz --steps 10000 --accounts 8 --seed 404 --check-invariants

Exit codes: 0 success, 1 assertion or command failure, 2 parse error.
"""

import os
import sys
import time
import argparse
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from src.errors import ParseError, ScenarioError
from src.fuzz_generator import FuzzGenerator
from src.scenario_runner import RunReport, execute, parse_scenario, render_events
from src.ledger import render_document
from src.utils.file_utils import FileUtils
from src.utils.logger import (
    setup_logger,
    log_startup_info,
    log_shutdown_info,
    log_run_summary,
    log_performance,
    log_info,
    log_debug,
    log_warning,
    log_error,
    log_exception,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE_ERROR = 2

DEFAULT_CONFIG_PATH = 'config/config.yaml'

DEFAULT_CONFIG: Dict[str, Any] = {
    'app': {'name': 'Spectrum Ledger', 'version': '1.0.0', 'debug': False},
    'paths': {
        'scenarios_dir': 'data/scenarios',
        'fixtures_dir': 'data/fixtures',
        'output_dir': 'data/output',
        'logs_dir': 'logs',
    },
    'logging': {'level': 'INFO', 'file_logging': False, 'console_logging': True, 'log_file': 'logs/spectrum_ledger.log'},
    'run': {'check_invariants': False},
    'fuzz': {
        'steps': 10000,
        'accounts': 8,
        'seed': 404,
        'base_scenario': 'data/scenarios/fuzz_transfers.scn',
        'max_transfer_ft': 3,
        'max_advance_seconds': 86400,
    },
}


def _merge(defaults: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(defaults)
    for key, value in (overrides or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """Load configuration from the YAML config file, layered over defaults."""
    config_file = Path(config_path or os.getenv('SPECTRUM_LEDGER_CONFIG') or DEFAULT_CONFIG_PATH)
    try:
        if config_file.exists():
            with open(config_file, 'r', encoding='utf-8') as f:
                config = _merge(DEFAULT_CONFIG, yaml.safe_load(f) or {})
            log_debug(f"Configuration loaded from {config_file}")
        else:
            log_warning(f"Config file {config_file} not found, using default configuration")
            config = _merge(DEFAULT_CONFIG, {})
    except (OSError, yaml.YAMLError) as e:
        log_error(f"Failed to load configuration: {e}")
        config = _merge(DEFAULT_CONFIG, {})

    env_level = os.getenv('SPECTRUM_LEDGER_LOG_LEVEL')
    if env_level:
        config['logging']['level'] = env_level
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Spectrum Ledger - spectrum securitization scenario runner')
    parser.add_argument('--config', type=str, help='Path to config YAML (default: config/config.yaml)')
    parser.add_argument('--debug', action='store_true', help='Enable debug logging')
    parser.add_argument('--log-file', type=str, help='Also write logs to this file')

    subparsers = parser.add_subparsers(dest='command', required=True)

    run_parser = subparsers.add_parser('run', help='Execute a scenario file')
    run_parser.add_argument('scenario', type=str, help='Scenario file (.scn)')
    _add_output_options(run_parser)
    run_parser.add_argument('--seed', type=int, help='Accepted for symmetry with fuzz; unused by run')

    fuzz_parser = subparsers.add_parser('fuzz', help='Generate and run a seeded random scenario')
    fuzz_parser.add_argument('--steps', type=int, help='Number of random commands')
    fuzz_parser.add_argument('--accounts', type=int, help='Number of accounts to draw from')
    fuzz_parser.add_argument('--seed', type=int, help='Random seed (unsigned 64-bit)')
    fuzz_parser.add_argument('--base', type=str, help='Seed scenario to start from')
    fuzz_parser.add_argument('--out', type=str, help='Write the generated scenario here')
    _add_output_options(fuzz_parser)

    return parser


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--events-out', type=str, help='Write one event record per line')
    parser.add_argument('--state-out', type=str, help='Write the final state document')
    parser.add_argument('--report-out', type=str, help='Write the full run report')
    parser.add_argument('--check-invariants', action='store_true',
                        help='Assert every invariant after every command')


def write_outputs(report: RunReport, args: argparse.Namespace) -> None:
    if args.events_out:
        FileUtils.write_text_file(args.events_out, render_events(report.events))
        log_info(f"Events written to {args.events_out}")
    if args.state_out:
        FileUtils.write_text_file(args.state_out, render_document(report.final_snapshot))
        log_info(f"State written to {args.state_out}")
    if args.report_out:
        FileUtils.write_text_file(args.report_out, report.render())
        log_info(f"Report written to {args.report_out}")


def run_text(name: str, text: str, args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """Parse and execute scenario text; returns the process exit code."""
    check = args.check_invariants or bool(config.get('run', {}).get('check_invariants', False))
    started = time.perf_counter()

    try:
        commands = parse_scenario(text)
    except ParseError as e:
        log_error(f"{name}: parse error at {e}")
        print(f"❌ {name}: parse error at line {e.line_no}: {e.reason}")
        return EXIT_PARSE_ERROR

    log_info(f"Executing {len(commands)} command(s) from {name} (invariant checks: {'on' if check else 'off'})")
    report = execute(commands, check_invariants=check)
    log_performance(f"run {name}", time.perf_counter() - started)

    write_outputs(report, args)
    print_summary(name, report)
    return EXIT_OK if report.ok else EXIT_FAILED


def print_summary(name: str, report: RunReport) -> None:
    passed = len(report.assertions) - len(report.failed_assertions)
    log_run_summary(name, report.commands_executed, passed, len(report.failed_assertions), len(report.events))

    if report.ok:
        print(f"✅ {name}: {report.commands_executed} command(s), {passed} assertion(s) passed, "
              f"{len(report.events)} event(s)")
        return

    failure = report.first_failure
    print(f"❌ {name}: failed at line {failure['line_no']} ({failure['code']}): {failure['reason']}")
    for result in report.failed_assertions:
        print(f"   • line {result.line_no}: assert {result.kind} expected {result.expected}, got {result.actual}")


def cmd_run(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    if args.seed is not None:
        log_debug("--seed has no effect on run")
    scenario = Path(args.scenario).expanduser()
    text = FileUtils.read_text_file(scenario)
    return run_text(scenario.name, text, args, config)


def cmd_fuzz(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    fuzz = config.get('fuzz', {})
    steps = args.steps if args.steps is not None else fuzz.get('steps', 10000)
    accounts = args.accounts if args.accounts is not None else fuzz.get('accounts', 8)
    seed = args.seed if args.seed is not None else fuzz.get('seed', 0)
    base = Path(args.base or fuzz.get('base_scenario', 'data/scenarios/fuzz_transfers.scn'))

    if not 0 <= seed < 2 ** 64:
        log_error(f"Seed must be an unsigned 64-bit integer, got {seed}")
        return EXIT_PARSE_ERROR

    generator = FuzzGenerator(
        FileUtils.read_text_file(base),
        steps=steps,
        accounts=accounts,
        seed=seed,
        max_transfer_ft=fuzz.get('max_transfer_ft', 3),
        max_advance_seconds=fuzz.get('max_advance_seconds', 86400),
    )
    try:
        text = generator.generate()
    except (ScenarioError, ValueError) as e:
        log_error(f"Fuzz generation failed: {e}")
        return EXIT_PARSE_ERROR
    log_info(f"Generated {steps} step(s) over {accounts} account(s) with seed {seed}")

    if args.out:
        FileUtils.write_text_file(args.out, text)
        log_info(f"Generated scenario written to {args.out}")

    return run_text(f"fuzz(seed={seed})", text, args, config)


def main(argv: Optional[list] = None) -> int:
    """Main application entry point."""
    load_dotenv()
    args = build_parser().parse_args(argv)

    config = load_config(args.config)

    log_level = "DEBUG" if args.debug else config.get('logging', {}).get('level', 'INFO')
    logging_config = config.get('logging', {})
    log_file = args.log_file or (logging_config.get('log_file') if logging_config.get('file_logging') else None)
    setup_logger(
        level=log_level,
        log_file=log_file,
        console_output=logging_config.get('console_logging', True),
        config=config,
    )

    log_startup_info(config)

    try:
        if args.command == 'run':
            code = cmd_run(args, config)
        else:
            code = cmd_fuzz(args, config)
        log_shutdown_info()
        return code

    except KeyboardInterrupt:
        log_info("Application interrupted by user")
        return EXIT_FAILED
    except FileNotFoundError as e:
        log_error(str(e))
        print(f"❌ {e}")
        return EXIT_FAILED
    except Exception as e:
        log_exception("Application error", e)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
