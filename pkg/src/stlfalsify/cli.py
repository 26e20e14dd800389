"""Command line interface.

Five subcommands under one `stlf` entry point:

    monitor    evaluate a specification file against a recorded trace
    falsify    run one falsification trial against a configured task
    campaign   run the full trial grid and write JSON + CSV reports
    evaluate   measure success rate / danger / completion metrics with
               actuation noise off and on
    bridge     attach an external environment over stdio or TCP

Configuration comes from a TOML or JSON file named by --config; any flag
repeated here overrides the file. Every emitted JSON document embeds the
fully resolved configuration, so a run can be reproduced from its own
output. Reports are written atomically (temp file, then rename).

Exit codes: monitor exits 0 SAT / 1 UNSAT / 2 INCONCLUSIVE and 3 on any
error; falsify exits 0 when a violation was found, 1 when the budget ran
out, 2 on configuration problems (all reported at once), 3 on runtime
failures; campaign and evaluate exit 0 on completion, 2 / 3 as above.

The STLF_LOG environment variable (DEBUG, INFO, WARNING, ERROR) controls
diagnostic logging on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
import tempfile

from .config import EngineConfig, build_config, load_config
from .errors import ConfigError
from .falsify import falsify
from .metrics import evaluate
from .stl import parse, robustness
from .trace import trace_from_csv

logger = logging.getLogger("stlfalsify.cli")


def _init_logging():
    name = os.environ.get("STLF_LOG", "").strip().upper()
    level = getattr(logging, name, None) if name else logging.WARNING
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def _dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _write_atomic(path: str, text: str):
    """Write text so readers never observe a partial file."""
    target = os.path.abspath(path)
    fd, temp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".stlf-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(temp, target)
    except BaseException:
        try:
            os.unlink(temp)
        except OSError:
            pass
        raise


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


# ---- configuration plumbing ---------------------------------------------

def _overrides(args, keys) -> dict:
    found = {}
    for attr, key in keys.items():
        value = getattr(args, attr, None)
        if value is not None:
            found[key] = value
    return found


def _resolve_config(args, keys) -> EngineConfig:
    data = load_config(args.config) if args.config else {}
    return build_config(data, _overrides(args, keys))


def _single_task(config: EngineConfig, command: str) -> str | None:
    """The one task this run targets, or None for a bridged run."""
    if config.bridge is not None:
        if config.tasks:
            raise ConfigError([f"task: {command} accepts a task or a bridge endpoint, not both"])
        return None
    if len(config.tasks) != 1:
        raise ConfigError(
            [f"task: {command} needs exactly one task id, got {list(config.tasks) or 'none'}"]
        )
    return config.tasks[0]


def _setup_environment(config: EngineConfig, task: str | None):
    """Build the configured environment, surrogate or bridged."""
    if task is None:
        from .bridge import attach

        return attach(config.bridge, stl_stride=config.stl_stride or 10)
    return config.make_environment(task)


def _as_config_error(exc) -> ConfigError:
    if isinstance(exc, ConfigError):
        return exc
    return ConfigError([str(exc)])


# ---- subcommands -----------------------------------------------------------

def cmd_monitor(args) -> int:
    formula = parse(_read(args.spec))
    trace = trace_from_csv(_read(args.trace))
    rho = robustness(formula, trace, args.t0)
    if rho > 0:
        verdict, code = "SAT", 0
    elif rho < 0:
        verdict, code = "UNSAT", 1
    else:
        verdict, code = "INCONCLUSIVE", 2
    print(f"{rho:g} {verdict}")
    return code


_FALSIFY_KEYS = {
    "task": "task", "optimizer": "optimizer", "budget": "budget", "seed": "seed",
    "output": "output", "spec_path": "spec_path", "spec_kind": "spec_kind",
    "stride": "stl_stride", "defect": "defect", "noise": "noise", "bridge": "bridge",
}


def cmd_falsify(args) -> int:
    config = _resolve_config(args, _FALSIFY_KEYS)
    try:
        task = _single_task(config, "falsify")
        formula = config.resolve_formula(task)
    except ValueError as exc:
        raise _as_config_error(exc) from exc
    env = _setup_environment(config, task)
    logger.info("falsifying %s with %s, budget %d, seed %d",
                env.task_id, config.optimizer, config.budget, config.seed)
    result = falsify(
        env, formula, seed=config.seed, budget=config.budget,
        optimizer=config.optimizer, anneal_params=config.anneal_params(),
    )
    out = config.output or "falsification.json"
    _write_atomic(out, _dumps({"config": config.to_dict(), "result": result.to_dict()}))
    status = "FALSIFIED" if result.success else "not falsified"
    print(f"{result.task_id} / {result.optimizer}: {status}, "
          f"min robustness {result.min_robustness:g} "
          f"after {result.simulations} simulations -> {out}")
    return 0 if result.success else 1


_CAMPAIGN_KEYS = {
    "task": "task", "optimizer": "optimizers", "trials": "trials", "budget": "budget",
    "seed": "seed", "jobs": "jobs", "output": "output", "output_csv": "output_csv",
    "spec_kind": "spec_kind", "defect": "defect", "noise": "noise",
}


def cmd_campaign(args) -> int:
    from .campaign import run_campaign

    config = _resolve_config(args, _CAMPAIGN_KEYS)
    try:
        if config.bridge is not None:
            envs = [_setup_environment(config, None)]
            specs = [config.resolve_formula(None)]
        else:
            envs = [config.make_environment(t) for t in config.tasks]
            specs = [config.resolve_formula(t) for t in config.tasks]
    except ValueError as exc:
        raise _as_config_error(exc) from exc
    optimizers = list(config.optimizers or (config.optimizer,))
    trials = config.trials if config.trials is not None else 30
    jobs = config.jobs or os.cpu_count() or 1
    logger.info("campaign: %d environments x %d optimizers x %d trials, %d jobs",
                len(envs), len(optimizers), trials, jobs)
    report = run_campaign(
        envs, specs, optimizers, trials=trials, budget=config.budget,
        master_seed=config.seed, jobs=jobs, anneal_params=config.anneal_params(),
    )
    out_json = config.output or "campaign.json"
    out_csv = config.output_csv or os.path.splitext(out_json)[0] + ".csv"
    _write_atomic(out_json, _dumps({"config": config.to_dict(), "report": report.to_dict()}))
    _write_atomic(out_csv, report.to_csv())
    print(_campaign_summary(report))
    print(f"reports: {out_json}, {out_csv}")
    return 0


def _campaign_summary(report) -> str:
    header = ("task", "optimizer", "falsified", "avg time [s]", "avg simulations")
    rows = [header]
    for cell in report.cells:
        rows.append((
            cell["task_id"],
            cell["optimizer"],
            f"{cell['successful_falsifications']}/{cell['trials']}",
            "-" if cell["avg_time"] is None else f"{cell['avg_time']:.2f}",
            "-" if cell["avg_simulations"] is None else f"{cell['avg_simulations']:.1f}",
        ))
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    return "\n".join(
        "  ".join(value.ljust(width) for value, width in zip(row, widths)).rstrip()
        for row in rows
    )


_EVALUATE_KEYS = {
    "task": "task", "trials": "trials", "seed": "seed", "output": "output",
    "defect": "defect", "noise_variance": "noise_variance",
}


def cmd_evaluate(args) -> int:
    from .envs import task_spec

    config = _resolve_config(args, _EVALUATE_KEYS)
    try:
        if config.bridge is not None:
            raise ConfigError(["bridge: evaluate needs a built-in task for its "
                               "success and danger specifications"])
        task = _single_task(config, "evaluate")
    except ValueError as exc:
        raise _as_config_error(exc) from exc
    spec = task_spec(task)
    trials = config.trials if config.trials is not None else 100
    summaries = {}
    for label, noisy in (("noise_off", False), ("noise_on", True)):
        env = dataclasses.replace(config, noise=noisy).make_environment(task)
        metrics = evaluate(env, spec.success_spec, spec.danger_spec,
                           trials=trials, seed=config.seed)
        summaries[label] = dataclasses.asdict(metrics)
        tct = "-" if metrics.tct is None else f"{metrics.tct:.1f}"
        print(f"{task} {label.replace('_', ' ')}: sr={metrics.sr:.1f}% "
              f"dbr={metrics.dbr:.2f}% tct={tct} ({trials} trials)")
    out = config.output or "metrics.json"
    _write_atomic(out, _dumps({"config": config.to_dict(), **summaries}))
    print(f"metrics: {out}")
    return 0


def cmd_bridge(args) -> int:
    from .bridge import attach

    env = attach(args.endpoint, stl_stride=args.stride, timeout=args.timeout)
    try:
        hs = env.handshake
        bounds = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in hs.bounds)
        signals = ", ".join(f"{name}({dim})" for name, dim in hs.signals)
        print(f"attached {hs.name} (protocol {hs.protocol_version})")
        print(f"  input: {hs.input_dim} dimensions, bounds {bounds}")
        print(f"  signals: {signals}; episode_steps: {hs.episode_steps}")
        if args.spec is None and args.spec_path is None:
            return 0
        source = args.spec if args.spec is not None else _read(args.spec_path)
        result = falsify(env, parse(source), seed=args.seed, budget=args.budget,
                         optimizer=args.optimizer)
        payload = {"endpoint": args.endpoint, "result": result.to_dict()}
        if args.output:
            _write_atomic(args.output, _dumps(payload))
        status = "FALSIFIED" if result.success else "not falsified"
        suffix = f" -> {args.output}" if args.output else ""
        print(f"{hs.name} / {result.optimizer}: {status}, "
              f"min robustness {result.min_robustness:g} "
              f"after {result.simulations} simulations{suffix}")
        return 0 if result.success else 1
    finally:
        env.close()


# ---- parser ---------------------------------------------------------------

def _flag(sub, *names, **kwargs):
    kwargs.setdefault("default", None)
    sub.add_argument(*names, **kwargs)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stlf",
        description="Falsification engine for AI-controlled simulated systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    mon = sub.add_parser("monitor", help="evaluate a specification against a trace")
    mon.add_argument("--spec", required=True, metavar="FILE",
                     help="specification file in concrete syntax")
    mon.add_argument("--trace", required=True, metavar="FILE", help="trace CSV file")
    mon.add_argument("--t0", type=int, default=0, help="evaluation sample index")
    mon.set_defaults(func=cmd_monitor)

    fal = sub.add_parser("falsify", help="run one falsification trial")
    _flag(fal, "--config", metavar="FILE", help="TOML or JSON configuration file")
    _flag(fal, "--task", metavar="ID", help="task id")
    _flag(fal, "--optimizer", metavar="NAME")
    _flag(fal, "--budget", type=int, metavar="N")
    _flag(fal, "--seed", type=int, metavar="N")
    _flag(fal, "--output", metavar="FILE")
    _flag(fal, "--spec-path", dest="spec_path", metavar="FILE")
    _flag(fal, "--spec-kind", dest="spec_kind", choices=("success", "danger"))
    _flag(fal, "--stride", type=int, metavar="N", help="monitoring stride (bridged runs)")
    _flag(fal, "--defect", action=argparse.BooleanOptionalAction)
    _flag(fal, "--noise", action=argparse.BooleanOptionalAction)
    _flag(fal, "--bridge", metavar="ENDPOINT")
    fal.set_defaults(func=cmd_falsify)

    cam = sub.add_parser("campaign", help="run the trial grid and write reports")
    _flag(cam, "--config", metavar="FILE", help="TOML or JSON configuration file")
    _flag(cam, "--task", action="append", metavar="ID",
          help="task id (repeat for several)")
    _flag(cam, "--optimizer", action="append", metavar="NAME",
          help="optimizer name (repeat for several)")
    _flag(cam, "--trials", type=int, metavar="N")
    _flag(cam, "--budget", type=int, metavar="N")
    _flag(cam, "--seed", type=int, metavar="N")
    _flag(cam, "--jobs", type=int, metavar="N", help="parallel workers, 0 = all cores")
    _flag(cam, "--output", metavar="FILE")
    _flag(cam, "--output-csv", dest="output_csv", metavar="FILE")
    _flag(cam, "--spec-kind", dest="spec_kind", choices=("success", "danger"))
    _flag(cam, "--defect", action=argparse.BooleanOptionalAction)
    _flag(cam, "--noise", action=argparse.BooleanOptionalAction)
    cam.set_defaults(func=cmd_campaign)

    ev = sub.add_parser("evaluate", help="measure task metrics with noise off and on")
    _flag(ev, "--config", metavar="FILE", help="TOML or JSON configuration file")
    _flag(ev, "--task", metavar="ID")
    _flag(ev, "--trials", type=int, metavar="N")
    _flag(ev, "--seed", type=int, metavar="N")
    _flag(ev, "--output", metavar="FILE")
    _flag(ev, "--defect", action=argparse.BooleanOptionalAction)
    _flag(ev, "--noise-variance", dest="noise_variance", type=float, metavar="V")
    ev.set_defaults(func=cmd_evaluate)

    br = sub.add_parser("bridge", help="attach an external environment")
    br.add_argument("--endpoint", required=True, metavar="ADDR",
                    help="'stdio:CMD ARGS...' or 'tcp:HOST:PORT'")
    br.add_argument("--stride", type=int, default=10, help="monitoring stride")
    br.add_argument("--timeout", type=float, default=30.0, help="reply timeout in seconds")
    br.add_argument("--spec", metavar="FORMULA", help="falsify this formula once attached")
    br.add_argument("--spec-path", dest="spec_path", metavar="FILE")
    br.add_argument("--budget", type=int, default=300)
    br.add_argument("--seed", type=int, default=0)
    br.add_argument("--optimizer", default="dual_annealing")
    br.add_argument("--output", metavar="FILE")
    br.set_defaults(func=cmd_bridge)

    return parser


def main(argv=None) -> int:
    _init_logging()
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return 2
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
