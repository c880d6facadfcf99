#!/usr/bin/env python3
"""CLI entry point for SFQ pulse-train search: search, sweep, score, oracle."""

import argparse
import dataclasses
import logging
import math
import os
import signal
import sys
import threading

import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)
from rich.table import Table

from config import OUT_DIR, ConfigError, load_sweep_config, parse_length_range
from fitness import TargetGate, leakage, score_sequence, score_subsequence, score_unitary
from ga import GaConfig, evolve
from model import DriveConfig, ParameterError, TransmonModel
from oracle import exhaustive_search, max_deviation, resonant_comb, two_level_propagate
from plots import emit_plot
from propagate import (
    Alphabet,
    MalformedSequenceError,
    PulseSequence,
    propagate,
    pulse_count,
    to_rotating_frame,
)
from results import write_records, write_sequence_files
from sweep import EXIT_IO, EXIT_OK, EXIT_UNSATISFIED, record_from_result, run_sweep, select_record

console = Console()
log = logging.getLogger("main")


def _fmt(x):
    return f"{x:.3g}" if x == 0 else f"{x:.2e}"


def setup_logging(out_dir, verbose=False):
    os.makedirs(out_dir, exist_ok=True)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        force=True,
        handlers=[
            RichHandler(console=console, show_path=False, markup=False),
            logging.FileHandler(os.path.join(out_dir, "search.log")),
        ],
    )


def install_stop_handler():
    """Route Ctrl+C to a stop event; returns (event, previous handler)."""
    stop_event = threading.Event()

    # Ctrl+C sets the event; searches stop at the next generation boundary
    def handle_sigint(_sig, _frame):
        console.print("\n[yellow]Ctrl+C: stopping at the next generation...[/yellow]")
        stop_event.set()

    previous = signal.signal(signal.SIGINT, handle_sigint)
    return stop_event, previous


def model_from_args(args, f0=None):
    return TransmonModel.from_ghz(
        f0 if f0 is not None else args.f0, args.alpha, args.delta_theta, args.dim
    )


def records_table(records, mode):
    table = Table(title="Pulse trains for the target gate")
    table.add_column("N", justify="right")
    table.add_column("f0, GHz")
    if mode == "subsequence":
        table.add_column("sub", justify="right")
        table.add_column("reps", justify="right")
    table.add_column("length", justify="right")
    table.add_column("duration, ns")
    table.add_column("angle error, rad")
    table.add_column("1 - F")
    table.add_column("time, s")
    table.add_column("ok")
    for r in records:
        row = [str(r.index), f"{r.f0:g}"]
        if mode == "subsequence":
            row += [str(r.subsequence_length), str(r.repetitions)]
        row += [str(r.sequence_length), f"{r.operation_duration:.2f}",
                _fmt(r.angle_precision), _fmt(r.infidelity), f"{r.wall_time:.2f}",
                "[green]yes[/green]" if r.satisfied else "[red]no[/red]"]
        table.add_row(*row)
    return table


def emit_outputs(records, mode, out_dir, tick):
    write_sequence_files(records, out_dir)
    emit_plot(records, out_dir, tick)
    console.print(records_table(records, mode))


# -- Verbs --------------------------------------------------------------------


def cmd_search(args, stop_event):
    model = model_from_args(args)
    drive = DriveConfig.from_ghz(args.fg)
    gate = TargetGate(args.theta)
    lo, hi = parse_length_range(args.length_range) if args.length_range else (args.length,) * 2
    seeds = [args.seed + k for k in range(args.seeds)]

    candidates = []
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
    ) as progress:
        for length in range(lo, hi + 1):
            for seed in seeds:
                if stop_event.is_set():
                    break
                config = GaConfig(
                    sequence_length=length, mode=args.mode, max_rep=args.max_rep,
                    max_iterations=args.iterations, rng_seed=seed,
                    alphabet=Alphabet(args.alphabet), max_duration=args.max_duration,
                )
                task = progress.add_task(f"[cyan]L={length} seed={seed}",
                                         total=config.max_iterations + 1)

                def cb(generation, _best, task=task):
                    progress.update(task, completed=generation + 1)

                result = evolve(config, model, drive, gate, workers=args.workers,
                                progress_callback=cb, stop_event=stop_event)
                progress.update(task, completed=config.max_iterations + 1)
                candidates.append(record_from_result(result, config, model, drive, f0=args.f0))

    chosen = select_record(candidates, args.mode)
    records = [] if chosen is None else [dataclasses.replace(chosen, index=1)]
    write_records(os.path.join(args.out, "results.csv"), records, args.mode)
    emit_outputs(records, args.mode, args.out, drive.tick)
    return EXIT_OK if records and records[0].satisfied else EXIT_UNSATISFIED


def sweep_config_from_args(args):
    config = load_sweep_config(args.config)
    overrides = {
        "frequencies_ghz": args.frequencies,
        "generator_ghz": args.fg,
        "delta_theta": args.delta_theta,
        "anharmonicity_ghz": args.alpha,
        "dim": args.dim,
        "theta_target": args.theta,
        "mode": args.mode,
        "alphabet": args.alphabet,
        "length_range": parse_length_range(args.length_range) if args.length_range else None,
        "max_rep": args.max_rep,
        "max_duration_ns": args.max_duration,
        "seeds_per_point": args.seeds,
        "base_seed": args.seed,
        "workers": args.workers,
        "max_iterations": args.iterations,
    }
    if args.length is not None and args.length_range is None:
        overrides["length_range"] = (args.length, args.length)
    return dataclasses.replace(config, **{k: v for k, v in overrides.items() if v is not None})


def cmd_sweep(args, stop_event):
    config = sweep_config_from_args(args)
    drive = DriveConfig.from_ghz(config.generator_ghz)
    n_jobs = len(config.frequencies_ghz) * len(config.lengths) * config.seeds_per_point
    console.print(
        f"[bold]Starting sweep: {len(config.frequencies_ghz)} frequencies × "
        f"{len(config.lengths)} lengths × {config.seeds_per_point} seeds "
        f"({config.mode} mode, {config.workers} workers)[/bold]\n"
    )
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
    ) as progress:
        task = progress.add_task("[cyan]searches", total=n_jobs)

        def cb(done, total):
            progress.update(task, completed=done, total=total)

        records, exit_code = run_sweep(config, args.out, stop_event=stop_event,
                                       progress_callback=cb, resume=args.resume)
    emit_outputs(records, config.mode, args.out, drive.tick)
    return exit_code


def read_genome(path, alphabet):
    with open(path) as f:
        text = f.read().strip()
    if "," in text:
        return PulseSequence.from_csv(text, alphabet)
    return PulseSequence.from_text(text, alphabet)


def cmd_score(args, _stop_event):
    model = model_from_args(args)
    drive = DriveConfig.from_ghz(args.fg)
    gate = TargetGate(args.theta)
    seq = read_genome(args.genome_file, Alphabet(args.alphabet))

    reps = 1
    if args.max_rep and args.max_rep > 1:
        reps, score = score_subsequence(seq, args.max_rep, model, drive, gate)
    else:
        score = score_sequence(seq, model, drive, gate)
    u = to_rotating_frame(propagate(seq.repeat(reps), model, drive), model)

    table = Table(title=f"Score of {args.genome_file}")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    table.add_row("length", str(len(seq)))
    table.add_row("repetitions", str(reps))
    table.add_row("pulses", str(pulse_count(seq) * reps))
    table.add_row("duration, ns", f"{len(seq) * reps * drive.tick:.2f}")
    table.add_row("angle error, rad", _fmt(score.angle_error))
    table.add_row("1 - F", _fmt(score.infidelity))
    table.add_row("leakage", _fmt(leakage(u)))
    console.print(table)
    return EXIT_OK if score.satisfies(args.angle_tol, args.infid_tol) else EXIT_UNSATISFIED


def cmd_oracle(args, _stop_event):
    drive = DriveConfig.from_ghz(args.fg)
    gate = TargetGate(args.theta)
    if args.check == "exhaustive":
        model = model_from_args(args)
        report = exhaustive_search(args.length, model, drive, gate,
                                   Alphabet(args.alphabet), workers=args.workers)
        console.print(f"Evaluated {report.evaluated} genomes")
        console.print(f"Best genome: {report.best_genome.to_text()}")
        console.print(f"Angle error {_fmt(report.best_score.angle_error)} rad, "
                      f"1 - F {_fmt(report.best_score.infidelity)}")
        return EXIT_OK

    model = TransmonModel.from_ghz(args.f0, args.alpha, args.delta_theta, 2)
    rng = np.random.default_rng(args.seed)
    trains = [PulseSequence(rng.integers(-1, 2, size=args.length)) for _ in range(args.trials)]
    gap = max_deviation(trains, model, drive)
    console.print(f"Two-level oracle vs propagate over {args.trials} trains: max gap {gap:.2e}")

    kicks = max(1, round(gate.theta_target / model.delta_theta))
    comb = resonant_comb(model, drive, kicks)
    got = score_unitary(to_rotating_frame(two_level_propagate(comb, model, drive), model), gate)
    console.print(f"Resonant comb of {kicks} kicks: angle error {_fmt(got.angle_error)} rad "
                  f"(expected {_fmt(abs(kicks * model.delta_theta - gate.theta_target))})")
    return EXIT_OK if gap < 1e-12 else EXIT_UNSATISFIED


# -- Argument parsing ---------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--f0", type=float, default=4.54643, help="Qubit frequency, GHz")
    common.add_argument("--fg", type=float, default=None, help="Generator frequency, GHz")
    common.add_argument("--delta-theta", type=float, default=None, help="Kick angle, rad")
    common.add_argument("--alpha", type=float, default=None, help="Anharmonicity, GHz")
    common.add_argument("--dim", type=int, default=None, help="Truncation dimension")
    common.add_argument("--theta", type=float, default=None, help="Target y-rotation, rad")
    common.add_argument("--alphabet", choices=["bipolar", "unipolar"], default=None)
    common.add_argument("--seed", type=int, default=None, help="Base RNG seed")
    common.add_argument("--workers", type=int, default=None, help="Worker processes")
    common.add_argument("--out", default=OUT_DIR, help="Output directory")
    common.add_argument("--verbose", action="store_true")

    search_opts = argparse.ArgumentParser(add_help=False)
    search_opts.add_argument("--mode", choices=["sequence", "subsequence"], default=None)
    search_opts.add_argument("--length", type=int, default=None, help="Sequence length")
    search_opts.add_argument("--length-range", default=None, help="Lengths A..B")
    search_opts.add_argument("--max-rep", type=int, default=None)
    search_opts.add_argument("--max-duration", type=float, default=None,
                             help="Gate duration bound, ns (subsequence mode)")
    search_opts.add_argument("--seeds", type=int, default=None, help="Seeds per point")
    search_opts.add_argument("--iterations", type=int, default=None, help="Max generations")

    parser = argparse.ArgumentParser(
        description="Search bipolar SFQ pulse trains for single-qubit gates on a transmon"
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    sub.add_parser("search", parents=[common, search_opts], help="Search at one frequency")

    p = sub.add_parser("sweep", parents=[common, search_opts], help="Search a frequency grid")
    p.add_argument("--config", default="sweep_config.json", help="Sweep config JSON")
    p.add_argument("--frequencies", type=float, nargs="*", default=None)
    p.add_argument("--resume", action="store_true",
                   help="Keep satisfying records already in results.csv")

    p = sub.add_parser("score", parents=[common], help="Score a genome file")
    p.add_argument("genome_file")
    p.add_argument("--max-rep", type=int, default=None)
    p.add_argument("--angle-tol", type=float, default=1e-5)
    p.add_argument("--infid-tol", type=float, default=1e-4)

    p = sub.add_parser("oracle", parents=[common], help="Exhaustive / two-level checks")
    p.add_argument("check", choices=["exhaustive", "two-level"])
    p.add_argument("--length", type=int, default=8)
    p.add_argument("--trials", type=int, default=100)
    return parser


def apply_defaults(args):
    """Fill flags left unset; sweep takes its defaults from the config file instead."""
    if args.verb == "sweep":
        return args
    defaults = {
        "fg": 25.0, "delta_theta": 0.032, "alpha": 0.25, "dim": 5, "theta": math.pi / 2,
        "alphabet": "bipolar", "seed": 0, "workers": 1, "mode": "sequence", "length": 114,
        "max_rep": 35, "seeds": 1, "iterations": 500,
    }
    if args.verb == "score":
        # no --max-rep means plain sequence scoring
        defaults.pop("max_rep")
    for key, value in defaults.items():
        if getattr(args, key, value) is None:
            setattr(args, key, value)
    return args


COMMANDS = {"search": cmd_search, "sweep": cmd_sweep, "score": cmd_score, "oracle": cmd_oracle}


def main(argv=None):
    args = apply_defaults(build_parser().parse_args(argv))
    setup_logging(args.out, args.verbose)
    stop_event, previous = install_stop_handler()
    try:
        return COMMANDS[args.verb](args, stop_event)
    except (ParameterError, MalformedSequenceError, ConfigError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO
    finally:
        signal.signal(signal.SIGINT, previous)


if __name__ == "__main__":
    sys.exit(main())
