# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
import argparse
from typing import Any, Callable, Dict, List, Optional, Tuple
from pydantic import BaseModel
from src.configuration import configuration as cfg
from src.utility.bronze import json_utility
from src.control.benchmark_controller import BenchmarkController
from src.control.chain_controller import ChainController
from src.model.analysis_control.exceptions import DomainException
from src.model.analysis_control.hijack import hijack_table, fairness_table, compute_bwait, bwait_series
from src.model.blindsig_control.exceptions import UnsupportedKeySizeException
from src.model.ledger_control.exceptions import SnapshotException
from src.model.netsim_control.data_model import SimulationConfig
from src.model.netsim_control.exceptions import ConfigurationException
from src.model.urs_control.exceptions import InvalidRingException


EXIT_SUCCESS = 0
EXIT_INVARIANT_VIOLATION = 2
EXIT_USAGE = 64


class UsageException(Exception):
    """
    UsageException class.
    """

    def __init__(self, reason: str, message: str = "invalid command line") -> None:
        """
        Initiation method for usage exception.
        :param reason: Parser complaint.
        :param message: Message to include in exception.
        """
        self.reason = reason
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : {self.reason}"


class CommandParser(argparse.ArgumentParser):
    """
    Argument parser, raising instead of exiting on malformed command lines.
    """

    def error(self, message: str) -> None:
        raise UsageException(message)


class RunManifest(BaseModel):
    """
    Reproduction record, embedded in every report.
    """
    command: str
    config_path: Optional[str] = None
    seed: Optional[int] = None
    output_paths: List[str] = []
    version: str = cfg.VERSION


"""
Commands
"""


def cmd_bench_urs(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    """
    Function for timing ring signatures.
    :param args: Parsed arguments.
    :return: Report and exit code.
    """
    table = BenchmarkController(args.seed or 0).bench_urs(args.ring_sizes, args.batch_sizes, args.repetitions)
    return {"urs": table.to_dict(orient="records")}, EXIT_SUCCESS


def cmd_bench_blindsig(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    """
    Function for timing blind signature exchanges.
    :param args: Parsed arguments.
    :return: Report and exit code.
    """
    table = BenchmarkController(args.seed or 0).bench_blindsig(args.key_sizes, args.repetitions)
    return {"blindsig": table.to_dict(orient="records")}, EXIT_SUCCESS


def cmd_sim(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    """
    Function for running a simulation from a JSON configuration.
    :param args: Parsed arguments.
    :return: Report and exit code, signaling safety violations.
    """
    config = SimulationConfig.from_file(args.config)
    if args.seed is not None:
        config = config.copy(update={"seed": args.seed})
    args.seed = config.seed
    for warning in config.threat_model_warnings():
        cfg.LOGGER.warning(warning)
    controller = ChainController()
    report = controller.run(config)
    result = report.to_dict()
    if args.snapshot:
        result["snapshot"] = controller.export_snapshot(args.snapshot)
    if report.safety_violations:
        cfg.LOGGER.error(f"{report.safety_violations} safety violations during the run")
        return result, EXIT_INVARIANT_VIOLATION
    return result, EXIT_SUCCESS


def cmd_analyze_hijack(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    """
    Function for tabulating hijacking costs against the open baseline.
    :param args: Parsed arguments.
    :return: Report and exit code.
    """
    table = hijack_table(polls=args.polls, users=args.users, epsilon=args.epsilon, apathy=args.apathy)
    return {"hijack": table.to_dict(orient="records")}, EXIT_SUCCESS


def cmd_analyze_fairness(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    """
    Function for tabulating representation errors and the seed waiting period.
    :param args: Parsed arguments.
    :return: Report and exit code.
    """
    table = fairness_table(args.ring_sizes, args.fractions, args.epsilon)
    b_wait = compute_bwait(args.honest, args.epsilon)
    return {"fairness": table.to_dict(orient="records"),
            "b_wait": {"honest": args.honest, "epsilon": args.epsilon, "blocks": b_wait,
                       "bound": bwait_series(args.honest, b_wait)}}, EXIT_SUCCESS


def cmd_inspect(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    """
    Function for reading a key from a state snapshot.
    :param args: Parsed arguments.
    :return: Report and exit code.
    """
    return {"inspection": ChainController().inspect(args.snapshot, args.key)}, EXIT_SUCCESS


"""
Parser
"""


def build_parser() -> CommandParser:
    """
    Function for building the command line grammar.
    :return: Parser.
    """
    parser = CommandParser(prog="trustrate", description="TrustRate desk-scale simulations, benchmarks and analysis.")
    parser.add_argument("--seed", type=int, default=None, help="seed for keys, workloads and randomizers")
    parser.add_argument("--output", type=str, default=None, help="report path, printed to stdout if omitted")
    commands = parser.add_subparsers(dest="command", required=True)

    bench = commands.add_parser("bench", help="time cryptographic building blocks").add_subparsers(
        dest="target", required=True)
    urs_parser = bench.add_parser("urs", help="ring signature sign, verify and batch verify")
    urs_parser.add_argument("--ring-sizes", type=int, nargs="+", default=[8, 16, 32])
    urs_parser.add_argument("--batch-sizes", type=int, nargs="+", default=[1, 8, 32])
    urs_parser.add_argument("--repetitions", type=int, default=3)
    urs_parser.set_defaults(handler=cmd_bench_urs)
    blind_parser = bench.add_parser("blindsig", help="blind RSA registration exchange")
    blind_parser.add_argument("--key-sizes", type=int, nargs="+", default=list(cfg.RSA_KEY_SIZES))
    blind_parser.add_argument("--repetitions", type=int, default=5)
    blind_parser.set_defaults(handler=cmd_bench_blindsig)

    sim = commands.add_parser("sim", help="simulate a chain").add_subparsers(dest="target", required=True)
    run_parser = sim.add_parser("run", help="run a JSON configuration")
    run_parser.add_argument("--config", type=str, default=cfg.PATHS.HONEST_CONFIG_PATH)
    run_parser.add_argument("--snapshot", type=str, default=None, help="export the final state to this path")
    run_parser.set_defaults(handler=cmd_sim)

    analyze = commands.add_parser("analyze", help="closed form analysis").add_subparsers(dest="target", required=True)
    hijack_parser = analyze.add_parser("hijack", help="hijacking cost against the open baseline")
    hijack_parser.add_argument("--polls", type=int, default=10 ** 6)
    hijack_parser.add_argument("--users", type=int, default=10 ** 6)
    hijack_parser.add_argument("--epsilon", type=float, default=2.0 ** -30)
    hijack_parser.add_argument("--apathy", type=float, default=0.0)
    hijack_parser.set_defaults(handler=cmd_analyze_hijack)
    fairness_parser = analyze.add_parser("fairness", help="representation error and seed waiting period")
    fairness_parser.add_argument("--ring-sizes", type=int, nargs="+", default=[50, 100, 1000])
    fairness_parser.add_argument("--fractions", type=float, nargs="+", default=[0.1, 0.25, 0.5])
    fairness_parser.add_argument("--epsilon", type=float, default=2.0 ** -30)
    fairness_parser.add_argument("--honest", type=float, default=0.75)
    fairness_parser.set_defaults(handler=cmd_analyze_fairness)

    state = commands.add_parser("state", help="global state snapshots").add_subparsers(dest="target", required=True)
    inspect_parser = state.add_parser("inspect", help="read a key and check its proof")
    inspect_parser.add_argument("--snapshot", type=str, required=True)
    inspect_parser.add_argument("--key", type=str, required=True,
                                help="hex key, poll:<pid hex> or tag:<pid hex>:<tag hex>")
    inspect_parser.set_defaults(handler=cmd_inspect)
    return parser


def main(argv: List[str] = None) -> int:
    """
    Main function for running a command.
    :param argv: Command line arguments.
        Defaults to None in which case sys.argv is used.
    :return: Exit code.
    """
    try:
        args = build_parser().parse_args(argv)
        handler: Callable = args.handler
        report, code = handler(args)
    except (UsageException, ConfigurationException, SnapshotException, DomainException, UnsupportedKeySizeException,
            InvalidRingException, ValueError) as ex:
        cfg.LOGGER.error(str(ex))
        return EXIT_USAGE

    manifest = RunManifest(command=f"{args.command} {args.target}", config_path=getattr(args, "config", None),
                           seed=args.seed, output_paths=[path for path in (args.output, report.get("snapshot"))
                                                         if path])
    report["manifest"] = manifest.dict()
    if args.output:
        json_utility.save(report, args.output)
        cfg.LOGGER.info(f"Wrote report to '{args.output}'")
    else:
        print(json_utility.dumps(report))
    return code
