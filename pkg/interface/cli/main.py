import argparse
import asyncio
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

import torch

from application.use_cases.generate_report import GenerateReportUseCase
from application.use_cases.run_ablation import RunAblationUseCase
from application.use_cases.run_pipeline import PIPELINE_STAGES, RunPipelineUseCase
from domain.exceptions.base_exceptions import SplitDitError
from domain.exceptions.pipeline_exceptions import ConfigurationError, StageFailedError
from infrastructure.config.pipeline_config import PipelineConfig
from infrastructure.config.settings import Settings, get_settings
from interface.dependencies.container import Container
from shared.constants import EXIT_OK, EXIT_STAGE_FAILURE, EXIT_USAGE

logger = logging.getLogger(__name__)

PROG = "split-dit"

SUBCOMMAND_STAGES = {
    "parse": ("parse",),
    "split": ("split",),
    "encode": ("encode",),
    "schedule": ("schedule",),
    "train": ("train",),
    "run": PIPELINE_STAGES,
}

NEEDS_CAPTION = ("parse", "run", "ablate")


def configure_logging(settings: Settings, level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=getattr(logging, level or settings.log_level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    external_libs_level = getattr(logging, settings.external_libs_log_level)
    logging.getLogger("openai._base_client").setLevel(external_libs_level)
    logging.getLogger("httpcore.connection").setLevel(external_libs_level)
    logging.getLogger("httpcore.http11").setLevel(external_libs_level)
    logging.getLogger("httpx").setLevel(external_libs_level)


def _pipeline_options() -> argparse.ArgumentParser:
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument("--config", help="JSON config file; flags override it")
    options.add_argument("--out", dest="output_dir", help="Run directory")
    options.add_argument("--seed", type=int)
    options.add_argument("--threads", type=int, help="torch intra-op threads")
    options.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    source = options.add_argument_group("caption")
    source.add_argument("--caption")
    source.add_argument("--caption-file")
    source.add_argument("--parser", choices=["rules", "llm"])
    source.add_argument("--cache-dir", help="LLM response cache (default $SPLITDIT_CACHE)")
    source.add_argument("--allow-network", action="store_true", default=None)
    source.add_argument("--max-repairs", type=int)

    sched = options.add_argument_group("schedule")
    sched.add_argument("--w", type=int, help="Moving-average window")
    sched.add_argument("--tau", type=float, help="Convergence threshold")
    sched.add_argument("--theta", type=float, help="Attention-change normaliser")
    sched.add_argument("--mode", choices=["index", "literal"], help="Curvature axis")
    sched.add_argument("--order", help="Injection order, e.g. O-R-A")
    sched.add_argument(
        "--fixed-steps", type=int, nargs=2, metavar=("S_REL", "S_ATTR"),
        help="Skip detection and inject at these steps",
    )
    sched.add_argument("--strict", action="store_true", help="Fail instead of falling back")

    sim = options.add_argument_group("simulation")
    sim.add_argument("--steps", type=int, help="Inference steps S")
    sim.add_argument("--noise", choices=["uniform", "sampled"])
    sim.add_argument("--samples", type=int)
    sim.add_argument("--no-injection", action="store_true", help="Run without primitive injection")
    sim.add_argument("--anchor", choices=["step", "window_start"])

    train = options.add_argument_group("training")
    train.add_argument("--train", action="store_true", help="Train the toy model before simulating")
    train.add_argument("--train-steps", type=int)
    train.add_argument("--lr", type=float)
    train.add_argument("--lam", type=float, help="Weight of the attention-alignment loss")
    return options


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG, description="Split-text conditioning toolkit for toy diffusion transformers"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    options = _pipeline_options()

    helps = {
        "parse": "Parse the caption into a graph (graph.json)",
        "split": "Build the split-text caption (split.json, split.txt)",
        "encode": "Encode the input token sequence (input.tseq)",
        "simulate": "Run seeded denoising and record traces",
        "schedule": "Detect the injection schedule from probe traces",
        "train": "Train the toy model (loss_curve.csv, checkpoint.bin)",
        "run": "Full pipeline",
        "ablate": "Injection, order and window-size ablations with a report",
    }
    for name, text in helps.items():
        sub = subparsers.add_parser(name, parents=[options], help=text)
        if name == "simulate":
            sub.add_argument("--probe", action="store_true", help="Injection-free probe runs")
        if name == "schedule":
            sub.add_argument(
                "--traces",
                dest="traces_dir",
                help="Probe trace directory (default <out>/traces/probe)",
            )

    report = subparsers.add_parser("report", help="Report over one or more run directories")
    report.add_argument("runs", nargs="+", help="Run directories")
    report.add_argument("--out", dest="output_dir", help="Where to write report.txt/report.json")
    report.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "caption": args.caption,
        "caption_file": args.caption_file,
        "parser": args.parser,
        "cache_dir": args.cache_dir,
        "output_dir": args.output_dir,
        "traces_dir": getattr(args, "traces_dir", None),
        "seed": args.seed,
        "llm": {"allow_network": args.allow_network, "max_repairs": args.max_repairs},
        "schedule": {
            "w": args.w,
            "tau": args.tau,
            "theta": args.theta,
            "mode": args.mode,
            "order": args.order,
            "fixed_steps": args.fixed_steps,
            "fallback": False if args.strict else None,
        },
        "noise": {"steps": args.steps, "kind": args.noise},
        "simulation": {
            "samples": args.samples,
            "injection": False if args.no_injection else None,
            "anchor": args.anchor,
        },
        "training": {
            "enabled": True if args.train or args.command == "train" else None,
            "steps": args.train_steps,
            "lr": args.lr,
            "lambda": args.lam,
        },
    }


def _fail(message: str, code: int) -> int:
    print(f"{PROG}: {message}", file=sys.stderr)
    return code


def _report(args: argparse.Namespace) -> int:
    try:
        report = GenerateReportUseCase().execute(args.runs, output_dir=args.output_dir)
    except SplitDitError as e:
        return _fail(f"stage 'report' failed: {e}", EXIT_STAGE_FAILURE)
    print(report.text)
    return EXIT_OK


def _pipeline(args: argparse.Namespace, settings: Settings) -> int:
    try:
        config = PipelineConfig.load(args.config, config_overrides(args))
        if args.command in NEEDS_CAPTION and config.caption is None and config.caption_file is None:
            raise ConfigurationError("a caption is required (--caption or --caption-file)")
    except ConfigurationError as e:
        return _fail(str(e), EXIT_USAGE)

    container = Container(settings)
    try:
        if args.command == "ablate":
            report = asyncio.run(RunAblationUseCase(container.get_pipeline_stages).execute(config))
            print(report.text)
            return EXIT_OK

        stages = SUBCOMMAND_STAGES.get(args.command)
        if args.command == "simulate":
            stages = ("probe",) if args.probe else ("simulate",)
        summary = asyncio.run(
            RunPipelineUseCase(container.get_pipeline_stages(config)).execute(stages)
        )
    except StageFailedError as e:
        return _fail(f"stage '{e.stage}' failed: {e.cause}", EXIT_STAGE_FAILURE)
    except ConfigurationError as e:
        return _fail(str(e), EXIT_USAGE)

    print(f"{args.command}: wrote {len(summary.manifest)} artifacts to {summary.output_dir}")
    if summary.schedule is not None and args.command in ("schedule", "run"):
        s = summary.schedule
        print(f"schedule: s_obj={s.s_obj} s_rel={s.s_rel} s_attr={s.s_attr}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        settings = get_settings()
    except Exception as e:
        return _fail(f"invalid environment: {e}", EXIT_USAGE)
    configure_logging(settings, args.log_level)

    threads = getattr(args, "threads", None) or settings.threads
    torch.set_num_threads(threads)

    if args.command == "report":
        return _report(args)
    return _pipeline(args, settings)


if __name__ == "__main__":
    sys.exit(main())
