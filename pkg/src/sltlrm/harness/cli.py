"""Command-line entry point: ``sltlrm run | export-rm | plot``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from ..reward_machine import RewardMachineError, make_alphabet, new_memory_rm, to_dot, to_json
from ..sltl import FormulaSyntaxError, parse
from .config import MODES, SCALES, ConfigError, ExperimentConfig
from .plots import PlotError, emit_plots
from .runners import run_experiment

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

# one-flag presets: "<domain>-<mode>"
PRESET_CONFIGS = {
    f"{domain}-{short}": {"domain": domain, "mode": mode}
    for domain in ("office", "minecraft")
    for short, mode in (("compose", "compose-eval"), ("repr", "repr-eval"), ("lifelong", "lifelong"))
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sltlrm", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="FILE", help="JSON experiment configuration")
    src.add_argument("--preset", choices=sorted(PRESET_CONFIGS), help="built-in experiment")
    run.add_argument("--mode", choices=MODES)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int, help="defaults to $SLTLRM_SEED, then the config value")
    run.add_argument("--scale", choices=SCALES)
    run.add_argument("--workers", type=int)
    run.add_argument("--out", metavar="DIR", help="output directory")

    exp = sub.add_parser("export-rm", help="build a reward machine for one formula")
    exp.add_argument("--formula", required=True)
    exp.add_argument("--props", required=True, help="comma-separated proposition names")
    fmt = exp.add_mutually_exclusive_group()
    fmt.add_argument("--dot", dest="fmt", action="store_const", const="dot")
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    exp.set_defaults(fmt="dot")

    plot = sub.add_parser("plot", help="write a plotting script into a run directory")
    plot.add_argument("dir")
    return parser


def _seed(arg):
    if arg is not None:
        return arg
    env = os.environ.get("SLTLRM_SEED")
    if env is None or env == "":
        return None
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"SLTLRM_SEED must be an integer, got {env!r}") from None


def cmd_run(args) -> int:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
    else:
        cfg = ExperimentConfig.from_dict(PRESET_CONFIGS[args.preset])
    cfg = cfg.override(mode=args.mode, trials=args.trials, seed=_seed(args.seed),
                       scale=args.scale, workers=args.workers, output_dir=args.out)
    if not cfg.output_dir:
        cfg = cfg.override(output_dir=f"runs/{cfg.domain}-{cfg.mode}-{cfg.scale}-seed{cfg.seed}")
    cfg.validate()
    result = run_experiment(cfg)
    print(result.output_dir)
    return EXIT_OK


def cmd_export(args) -> int:
    props = [p.strip() for p in args.props.split(",") if p.strip()]
    formula = parse(args.formula)
    alphabet = make_alphabet([()] + [(p,) for p in props])
    rm = new_memory_rm(alphabet)
    rm.extend(formula)
    sys.stdout.write(to_dot(rm, initial=formula) if args.fmt == "dot" else to_json(rm))
    return EXIT_OK


def cmd_plot(args) -> int:
    print(emit_plots(args.dir))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": cmd_run, "export-rm": cmd_export, "plot": cmd_plot}[args.command]
    try:
        return handler(args)
    except (FormulaSyntaxError, ConfigError) as exc:
        print(f"sltlrm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RewardMachineError, PlotError, OSError, ValueError) as exc:
        print(f"sltlrm: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
