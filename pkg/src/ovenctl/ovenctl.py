#!/usr/bin/env python3
"""OvenCtl - model, analyze and regulate a three-state oven/food thermal plant from the command line."""
import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich import box

from ovenctl.core.linalg import NumericalError
from ovenctl.handlers.report_tables import (
    format_complex,
    gains_table,
    guidelines_table,
    htc_table,
    matrix_table,
    metrics_table,
    plant_report_table,
    repro_table,
    stability_table,
)
from ovenctl.handlers.trajectory_writer import TrajectoryWriter
from ovenctl.services.design import (
    DesignError,
    InvalidPoleSet,
    PoleSet,
    Uncontrollable,
    Unobservable,
    analyze,
    augment,
    closed_loop_spectrum,
    default_horizon,
    default_poles,
    design,
    parse_pole_override,
)
from ovenctl.services.heat_transfer import HeatTransferError, derive_htc
from ovenctl.services.plant import (
    INPUT_LABEL,
    OUTPUT_LABEL,
    PRESET_NAMES,
    FoodConfigError,
    FoodPreset,
    OvenSpec,
    PlantError,
    UnknownPreset,
    build_plant,
    default_oven,
    load_food_config,
    preset,
    reference_guidelines,
    validate_plant,
    with_derived_htc,
)
from ovenctl.services.reproduce import PUBLISHED_POLES, reproduce
from ovenctl.services.settings import Settings, SettingsError, SettingsFactory
from ovenctl.services.simulation import (
    DEFAULT_T_FINAL,
    METHODS,
    SimulationError,
    closed_loop_config,
    lsim,
    lsim_many_async,
    open_loop_config,
    step_metrics,
)
from ovenctl.utils.pole_parser import PoleParser

console = Console()
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

USAGE_ERRORS = (UnknownPreset, FoodConfigError, SettingsError, InvalidPoleSet, SimulationError)
INFEASIBLE_ERRORS = (Uncontrollable, Unobservable)
FAILURE_ERRORS = (NumericalError, DesignError, HeatTransferError, PlantError)
LIST_VALUED_OPTIONS = ("--controller-poles", "--observer-poles", "--x0-hat")


class UsageError(Exception):
    """Raised when arguments are individually valid but do not fit together."""
    pass


def _arg_type(parse: Callable[[str], object]) -> Callable[[str], object]:
    def convert(text: str):
        try:
            return parse(text)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e)) from None
    convert.__name__ = parse.__name__
    return convert


def configure_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=verbose, rich_tracebacks=verbose)],
        force=True,
    )


class OvenCtl:
    """Main CLI application for the oven controller toolkit."""

    def __init__(self, out: Optional[Console] = None, a_perturbation: Optional[np.ndarray] = None):
        """
        Args:
            out: Console for user-facing output (defaults to the module console).
            a_perturbation: Added to every built A matrix by ``reproduce``; a
                fault-injection hook for checking that drift is detected.
        """
        self.console = out or console
        self.a_perturbation = a_perturbation
        self.settings: Optional[Settings] = None
        self.verbose = False

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="ovenctl",
            description="Thermal oven model, observer-based pole placement and closed-loop simulation.",
        )
        parser.add_argument("-v", "--verbose", action="store_true", help="debug logging and tracebacks")
        parser.add_argument("--profile", help="settings profile (overrides OVENCTL_PROFILE)")
        parser.add_argument("--settings", help="profile file (default: OVENCTL_CONFIG or config/ovenctl.yaml)")
        sub = parser.add_subparsers(dest="command", metavar="COMMAND")
        sub.required = True

        food = argparse.ArgumentParser(add_help=False)
        group = food.add_mutually_exclusive_group()
        group.add_argument("--food", help=f"preset food: {', '.join(PRESET_NAMES)}")
        group.add_argument("--config", help="custom food JSON file")

        plant = argparse.ArgumentParser(add_help=False)
        plant.add_argument("--preheat", type=float, help="oven preheat temperature (F)")
        plant.add_argument("--ambient", type=float, help="ambient/initial temperature (F)")
        plant.add_argument("--derive-htc", action="store_true",
                           help="replace tabulated h values with natural-convection estimates")
        plant.add_argument("--delta-t", type=float, help="buoyancy temperature difference for --derive-htc (F)")

        poles = argparse.ArgumentParser(add_help=False)
        poles.add_argument("--controller-poles", type=_arg_type(PoleParser.parse_poles),
                           help="three comma-separated negative reals")
        poles.add_argument("--observer-poles", type=_arg_type(PoleParser.parse_poles),
                           help="three comma-separated negative reals")
        poles.add_argument("--no-feedforward", action="store_true", help="apply the raw reference (N = 1)")

        sub.add_parser("presets", help="list modelled foods and temperature guidelines")
        sub.add_parser("htc", parents=[food, plant], help="natural-convection h estimate (exploratory)")
        sub.add_parser("model", parents=[food, plant], help="print A, B, C and structural checks")
        sub.add_parser("analyze", parents=[food, plant], help="open-loop poles, stability and ranks")
        sub.add_parser("design", parents=[food, plant, poles], help="controller, observer and feedforward gains")

        simulate = sub.add_parser("simulate", parents=[food, plant, poles], help="simulate open or closed loop")
        simulate.add_argument("--mode", choices=("open", "closed"), default="closed")
        simulate.add_argument("--pole-scale", type=_arg_type(PoleParser.parse_scale), action="append",
                              help="scale both pole sets; repeat to sweep factors concurrently")
        simulate.add_argument("--x0-hat", type=_arg_type(PoleParser.parse_observer_init),
                              help="observer start: plant, ambient or three temperatures")
        simulate.add_argument("--dt", type=float, help="time step")
        simulate.add_argument("--t-final", type=float, help="horizon (default: per-food)")
        simulate.add_argument("--method", choices=METHODS, default="exact")
        simulate.add_argument("--band", type=float, help="settling band (F)")
        simulate.add_argument("--out", help="trajectory output file")
        simulate.add_argument("--format", choices=("csv", "json"))
        simulate.add_argument("--emit-plot-script", action="store_true", help="write <out>.gp next to a CSV")

        repro = sub.add_parser("reproduce", help="check published matrices, poles and responses")
        repro.add_argument("--dt", type=float, help="time step")
        repro.add_argument("--out", help="directory for figure CSVs")
        repro.add_argument("--no-figures", action="store_true", help="skip writing figure CSVs")
        return parser

    def _resolve_settings(self, args: argparse.Namespace) -> Settings:
        settings = SettingsFactory.load(args.settings, args.profile)
        x0_hat = getattr(args, "x0_hat", None)
        return settings.with_overrides(
            preheat_f=getattr(args, "preheat", None),
            ambient_f=getattr(args, "ambient", None),
            dt=getattr(args, "dt", None),
            t_final=getattr(args, "t_final", None),
            settling_band_f=getattr(args, "band", None),
            format=getattr(args, "format", None),
            delta_t_f=getattr(args, "delta_t", None),
            feedforward=False if getattr(args, "no_feedforward", False) else None,
            observer_init=x0_hat if isinstance(x0_hat, str) else None,
        )

    def _load_food(self, args: argparse.Namespace) -> tuple[Optional[str], OvenSpec, FoodPreset]:
        """Preset key (None for custom foods), oven and food."""
        settings = self.settings
        oven = default_oven(ambient=settings.ambient_f, preheat=settings.preheat_f)
        if args.config:
            key, food = None, load_food_config(args.config, oven, settings.delta_t,
                                               derive_h=getattr(args, "derive_htc", False))
        elif args.food:
            _, food = preset(args.food)
            key = args.food.strip().lower()
        else:
            raise UsageError("one of --food or --config is required")
        if getattr(args, "derive_htc", False):
            oven, food = with_derived_htc(oven, food, settings.delta_t)
        return key, oven, food

    def _pole_set(self, args: argparse.Namespace, key: Optional[str]) -> PoleSet:
        if key is None:
            if not (args.controller_poles and args.observer_poles):
                raise UsageError("custom foods need --controller-poles and --observer-poles")
            return PoleSet(args.controller_poles, args.observer_poles)
        base = default_poles(key)
        return PoleSet(parse_pole_override(args.controller_poles, base.controller),
                       parse_pole_override(args.observer_poles, base.observer))

    def cmd_presets(self, args: argparse.Namespace) -> int:
        self.console.print(guidelines_table(reference_guidelines()))
        oven = default_oven()
        for name in PRESET_NAMES:
            _, food = preset(name)
            body = food.body
            self.console.print(
                f"[bold]{name}[/bold]: m={body.mass:g} lb, cp={body.cp:g}, D={body.char_length:g} ft, "
                f"A={body.area:g} ft^2, h={body.h_air:g}, target {food.target_temp:g} F"
            )
        self.console.print(f"[dim]oven wall: m={oven.wall.mass:g} lb, A={oven.wall.area:g} ft^2, "
                           f"h={oven.wall.h_air:g}; air mass {oven.air_mass:g} lb[/dim]")
        return EXIT_OK

    def cmd_htc(self, args: argparse.Namespace) -> int:
        delta_t = self.settings.delta_t
        oven = default_oven(ambient=self.settings.ambient_f, preheat=self.settings.preheat_f)
        if args.food or args.config:
            _, oven, food = self._load_food(args)
            bodies = [oven.wall, food.body]
        else:
            bodies = [oven.wall] + [preset(name)[1].body for name in PRESET_NAMES]
        rows = []
        for body in bodies:
            groups, h = derive_htc(oven.air, body.char_length, delta_t)
            rows.append((body.name, body.char_length, delta_t, groups, h, body.h_air))
        self.console.print(htc_table(rows))
        self.console.print("[dim]Derived values are exploratory; the tabulated h values are used by default.[/dim]")
        return EXIT_OK

    def cmd_model(self, args: argparse.Namespace) -> int:
        _, oven, food = self._load_food(args)
        ss = build_plant(oven, food)
        labels = ss.state_labels
        self.console.print(matrix_table(f"A ({food.body.name})", ss.a, labels, labels))
        self.console.print(matrix_table("B", ss.b, labels, [INPUT_LABEL]))
        self.console.print(matrix_table("C", ss.c, [OUTPUT_LABEL], labels))
        self.console.print(plant_report_table(validate_plant(ss)))
        return EXIT_OK

    def cmd_analyze(self, args: argparse.Namespace) -> int:
        key, oven, food = self._load_food(args)
        report = analyze(build_plant(oven, food))
        published = PUBLISHED_POLES.get(key) if key and not args.derive_htc else None
        title = f"Open-loop poles ({food.body.name})"
        self.console.print(stability_table(report, title=title, published=published))
        poles = ", ".join(format_complex(p, 3) for p in report.spectrum.sorted())
        self.console.print(f"Poles: {poles}")
        verdict = "asymptotically stable" if report.asymptotically_stable else "not asymptotically stable"
        style = "bright_green" if report.asymptotically_stable else "bright_red"
        self.console.print(f"[bold {style}]{verdict}[/bold {style}]")
        self.console.print(f"controllability rank {report.controllability_rank}/{report.order}, "
                           f"observability rank {report.observability_rank}/{report.order}")
        return EXIT_OK

    def cmd_design(self, args: argparse.Namespace) -> int:
        key, oven, food = self._load_food(args)
        ss = build_plant(oven, food)
        gains = design(ss, self._pole_set(args, key), use_feedforward=self.settings.feedforward)
        loop = augment(ss, gains)
        self.console.print(gains_table(gains, ss.state_labels))
        spectrum = ", ".join(format_complex(p, 4) for p in closed_loop_spectrum(loop).sorted())
        self.console.print(Panel(spectrum, title="Closed-loop spectrum", border_style="bright_blue",
                                 box=box.ROUNDED))
        return EXIT_OK

    def _output_path(self, out: str, scale: Optional[float], many: bool) -> Path:
        path = Path(out)
        if not many:
            return path
        return path.with_name(f"{path.stem}_x{scale:g}{path.suffix}")

    def cmd_simulate(self, args: argparse.Namespace) -> int:
        settings = self.settings
        key, oven, food = self._load_food(args)
        ss = build_plant(oven, food)
        if settings.t_final is not None:
            t_final = settings.t_final
        else:
            t_final = default_horizon(key) if key else DEFAULT_T_FINAL
        writer = TrajectoryWriter(settings.out_dir)
        meta = {
            "food": food.body.name,
            "mode": args.mode,
            "dt": settings.dt,
            "t_final": t_final,
            "preheat_f": settings.preheat_f,
            "ambient_f": settings.ambient_f,
            "method": args.method,
        }

        if args.mode == "open":
            cfg = open_loop_config(settings.preheat_f, settings.ambient_f, settings.dt, t_final, args.method)
            traj = lsim(ss, cfg)
            runs = [("open loop", traj, None, None)]
        else:
            observer_init = args.x0_hat if isinstance(args.x0_hat, tuple) else settings.observer_init
            base = self._pole_set(args, key)
            scales = args.pole_scale or [1.0]
            loops, configs = [], []
            for scale in scales:
                loop = augment(ss, design(ss, base.scaled(scale), use_feedforward=settings.feedforward))
                loops.append(loop)
                configs.append(closed_loop_config(loop, food.target_temp, settings.preheat_f, settings.ambient_f,
                                                  observer_init, settings.dt, t_final, args.method))
            if len(scales) > 1:
                trajectories = asyncio.run(lsim_many_async(list(zip(loops, configs))))
            else:
                trajectories = [lsim(loops[0], configs[0])]
            runs = [(f"poles x{s:g}", t, l, s) for s, t, l in zip(scales, trajectories, loops)]

        target = food.target_temp if args.mode == "closed" else settings.preheat_f
        rows = [(label, step_metrics(traj, target, settings.settling_band_f)) for label, traj, _, _ in runs]
        self.console.print(metrics_table(rows))

        if args.out:
            for label, traj, loop, scale in runs:
                path = self._output_path(args.out, scale, len(runs) > 1)
                written = writer.write(path, traj, loop, settings.format, {**meta, "pole_scale": scale})
                self.console.print(f"[green]Wrote {written}[/green]")
                if args.emit_plot_script and settings.format == "csv":
                    labels, _ = writer.tabulate(traj, loop)
                    script = writer.write_plot_script(written, labels, f"{food.body.name} {label}")
                    self.console.print(f"[green]Wrote {script}[/green]")
        return EXIT_OK

    def cmd_reproduce(self, args: argparse.Namespace) -> int:
        writer = None if args.no_figures else TrajectoryWriter(args.out or self.settings.out_dir)
        report = reproduce(self.settings, perturbation=self.a_perturbation, writer=writer)
        self.console.print(repro_table(report.checks))
        for path in report.figures.values():
            self.console.print(f"[dim]figure data: {path}[/dim]")
        if report.passed:
            self.console.print(f"[bold bright_green]All {len(report.checks)} checks passed[/bold bright_green]")
            return EXIT_OK
        self.console.print(f"[bold bright_red]{len(report.failures)} of {len(report.checks)} checks failed"
                           f"[/bold bright_red]")
        return EXIT_FAILURE

    @staticmethod
    def attach_list_values(argv: Sequence[str]) -> list[str]:
        """
        Join list-valued options with their value (``--opt X`` -> ``--opt=X``).

        Pole lists start with ``-`` and would otherwise be read as option flags.
        """
        joined: list[str] = []
        tokens = iter(argv)
        for token in tokens:
            if token in LIST_VALUED_OPTIONS:
                value = next(tokens, None)
                joined.append(token if value is None else f"{token}={value}")
            else:
                joined.append(token)
        return joined

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """Parse ``argv``, dispatch the subcommand and map failures to exit codes."""
        parser = self.build_parser()
        try:
            args = parser.parse_args(self.attach_list_values(sys.argv[1:] if argv is None else argv))
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else EXIT_USAGE

        self.verbose = args.verbose
        configure_logging(args.verbose)
        handler = getattr(self, f"cmd_{args.command}")
        try:
            self.settings = self._resolve_settings(args)
            logger.debug("Running %s with %s", args.command, self.settings)
            return handler(args)
        except (UsageError, *USAGE_ERRORS) as e:
            return self._fail(e, EXIT_USAGE)
        except INFEASIBLE_ERRORS as e:
            return self._fail(e, EXIT_INFEASIBLE)
        except FAILURE_ERRORS as e:
            return self._fail(e, EXIT_FAILURE)

    def _fail(self, error: Exception, code: int) -> int:
        self.console.print(f"[bold bright_red]❌ {type(error).__name__}: {error}[/bold bright_red]")
        if self.verbose:
            self.console.print_exception()
        return code
