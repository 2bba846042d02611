#!/usr/bin/env python3
"""
Command-line front end: figure presets, sweeps, comparisons and
discrimination runs, with coloured terminal summaries and CSV/JSON output.
"""

import argparse
import logging
import sys
from typing import List, Optional

import numpy as np

from ..config.presets import PRESETS, get_preset
from ..config.run_config import RunConfig, SweepSpec, load_run_config
from ..config.settings import (DEFAULT_ALPHA, DEFAULT_BATCH_SIZE,
                               DEFAULT_MAX_PARTICLES, DEFAULT_SWEEP_WORKERS)
from ..domain.aav import aav_prediction, higher_order_terms_check, is_valid
from ..domain.errors import OrthogonalSelection, WeakValueError
from ..domain.gaussian import Representation
from ..domain.sgevolve import (classify_regime, derived_kick, overlap_I,
                               reduced_density_matrix, run_stages)
from ..domain.spin import weak_value
from ..infrastructure.records import (RunMetadata, aav_to_dict,
                                      comparison_to_dict)
from ..infrastructure.repository import FORMATS, ResultRepository
from ..services.discriminate import (MeasurementSetup, Source, SourceKind,
                                     Strategy, Verdict, run_strategy)
from ..services.pipeline import RunResult, run, sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDECIDED = 2


class Colors:
    """ANSI color codes for terminal output"""
    RESET = '\033[0m'
    BOLD = '\033[1m'
    DIM = '\033[2m'

    RED = '\033[31m'
    GREEN = '\033[32m'
    YELLOW = '\033[33m'
    CYAN = '\033[36m'

    BRIGHT_CYAN = '\033[96m'


class ProgressBar:
    """Simple progress bar for terminal"""

    @staticmethod
    def create(value: float, max_value: float, width: int = 20,
               filled_char: str = '█', empty_char: str = '░') -> str:
        if max_value == 0:
            percentage = 0
        else:
            percentage = min(100, max(0, (value / max_value) * 100))

        filled_length = int(width * percentage / 100)
        bar = filled_char * filled_length + empty_char * (width - filled_length)
        return f"{bar} {percentage:5.1f}%"


class TableFormatter:
    """Simple table formatter for better data presentation"""

    @staticmethod
    def format_table(headers: List[str], rows: List[List[str]],
                     title: Optional[str] = None) -> str:
        if not rows:
            return "No data to display"

        col_widths = [len(header) for header in headers]
        for row in rows:
            for i, cell in enumerate(row):
                if i < len(col_widths):
                    col_widths[i] = max(col_widths[i], len(str(cell)))

        separator = '+' + '+'.join('-' * (width + 2) for width in col_widths) + '+'

        result = []
        if title:
            result.append(f"\n{Colors.BOLD}{title}{Colors.RESET}")
        result.append(separator)

        header_row = '|'
        for i, header in enumerate(headers):
            header_row += f" {Colors.BOLD}{header:<{col_widths[i]}}{Colors.RESET} |"
        result.append(header_row)
        result.append(separator)

        for row in rows:
            data_row = '|'
            for i, cell in enumerate(row):
                if i < len(col_widths):
                    data_row += f" {str(cell):<{col_widths[i]}} |"
            result.append(data_row)

        result.append(separator)
        return '\n'.join(result)


def _fmt(value, digits: int = 6) -> str:
    if value is None:
        return "-"
    if isinstance(value, complex):
        if value.imag == 0:
            return f"{value.real:.{digits}g}"
        return f"{value.real:.{digits}g}{value.imag:+.{digits}g}i"
    return f"{value:.{digits}g}"


class WeakValueCLI:
    """Front end for the exact Stern-Gerlach weak-measurement toolkit"""

    def _print_header(self, title: str, subtitle: str = None):
        print(f"\n{Colors.CYAN}{'=' * 80}{Colors.RESET}")
        print(f"{Colors.BOLD}{Colors.BRIGHT_CYAN}{title.center(80)}{Colors.RESET}")
        if subtitle:
            print(f"{Colors.DIM}{subtitle.center(80)}{Colors.RESET}")
        print(f"{Colors.CYAN}{'=' * 80}{Colors.RESET}")

    def _print_section(self, title: str):
        print(f"\n{Colors.YELLOW}▶ {Colors.BOLD}{title}{Colors.RESET}")
        print(f"{Colors.YELLOW}{'─' * (len(title) + 2)}{Colors.RESET}")

    def _resolve_config(self, args, parser, default: str = "fig2a") -> RunConfig:
        if getattr(args, 'config', None):
            config = load_run_config(args.config)
        else:
            name = getattr(args, 'preset', None) or default
            if name not in PRESETS:
                parser.error(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
            config = get_preset(name)
        return config.with_overrides(seed=args.seed, grid_points=args.grid_points,
                                     out_dir=args.out_dir)

    def _repository(self, config: RunConfig, args) -> ResultRepository:
        return ResultRepository(args.out_dir or config.out_dir or f"results/{config.name}")

    # distribution / reproduce

    def distribution(self, config: RunConfig, args) -> int:
        result = run(config)
        repo = self._repository(config, args)
        fmt = args.format
        paths = [repo.save_distribution(result.exact, "exact_momentum", fmt),
                 repo.save_distribution(result.exact_position, "exact_position", fmt),
                 repo.save_peaks(result.peaks, "peaks", result.p_prime, fmt)]
        if result.aav is not None:
            paths.append(repo.save_distribution(result.aav.distribution, "aav_momentum", fmt))
            paths.append(repo.save_distribution(result.aav_position, "aav_position", fmt))
            paths.append(repo.save_record(aav_to_dict(result.aav), "aav"))
        paths.append(repo.save_record(
            comparison_to_dict(result.comparison, result.overlap, result.eta,
                               result.weak_value, result.p_prime), "comparison"))
        paths.append(repo.save_metadata(RunMetadata("distribution", config,
                                                    self._derived(result))))
        logger.info("wrote %d file(s) to %s", len(paths), repo.out_dir)
        self._print_run(result)
        print(f"\n{Colors.GREEN}✅ Results written to {repo.out_dir}{Colors.RESET}")
        return EXIT_OK

    def _derived(self, result: RunResult) -> dict:
        w = result.weak_value
        return {
            'p_prime': result.p_prime,
            'center_shift': result.center_shift,
            'I': result.overlap,
            'regime': result.regime.value,
            'postselect_prob': result.postselect_prob,
            'weak_value': None if w is None else {'re': w.real, 'im': w.imag},
            'eta': result.eta,
            'mean_momentum': result.mean,
            'peaks_rescaled': result.rescaled_peaks().locations,
        }

    def _print_run(self, result: RunResult):
        config = result.config
        self._print_header(f"EXACT POINTER DISTRIBUTION: {config.name}", config.provenance[:78])
        self._print_section("Parameters")
        rows = [["delta", f"{config.delta_cm:.6g} cm"]]
        for i, stage in enumerate(config.stages):
            rows.append([f"stage {i} ({stage.axis})",
                         f"b={stage.gradient_gauss_per_cm:.6g} G/cm, tau={stage.transit_time:.6g} s"])
        rows.append(["p'", _fmt(result.p_prime)])
        print(TableFormatter.format_table(["Quantity", "Value"], rows))

        self._print_section("Measurement regime")
        color = {"Strong": Colors.RED, "Semiweak": Colors.YELLOW, "Weak": Colors.GREEN}
        print(f"  Overlap I:   {ProgressBar.create(result.overlap, 1.0)}")
        print(f"  Regime:      {color[result.regime.value]}{result.regime.value}{Colors.RESET}")
        print(f"  P(post):     {_fmt(result.postselect_prob)}")
        if result.aav is not None:
            validity = f"{Colors.GREEN}valid{Colors.RESET}" if result.aav.valid \
                else f"{Colors.YELLOW}outside validity{Colors.RESET}"
            print(f"  Weak value:  {_fmt(result.weak_value)}  (eta={_fmt(result.eta, 3)}, {validity})")
        else:
            print(f"  Weak value:  {Colors.YELLOW}undefined (orthogonal selection){Colors.RESET}")

        rescaled = result.rescaled_peaks()
        rows = [[f"{p.location:.4f}", f"{p.height:.4g}", f"{p.prominence:.3g}"]
                for p in rescaled.peaks]
        print(TableFormatter.format_table(["p/p'", "Height", "Relative"], rows,
                                          title="Exact peaks"))
        if result.comparison is not None:
            c = result.comparison
            print(TableFormatter.format_table(
                ["L1", "Linf", "KS", "AAV peaks"],
                [[_fmt(c.l1, 4), _fmt(c.linf, 4), _fmt(c.ks, 4), str(len(c.peaks_approx))]],
                title="Exact vs AAV"))

    # sweep

    def sweep(self, config: RunConfig, args) -> int:
        spec = SweepSpec(variable=args.variable, start=args.start, stop=args.stop,
                         count=args.count, log=args.log)
        rows = sweep(config, spec, workers=args.workers)
        repo = self._repository(config, args)
        repo.save_sweep(rows, "sweep", args.format)
        repo.save_metadata(RunMetadata("sweep", config, {
            'variable': spec.variable, 'start': spec.start, 'stop': spec.stop,
            'count': spec.count, 'log': spec.log}))

        table = [[_fmt(r.value, 4), _fmt(r.overlap, 4), r.regime.value,
                  ", ".join(f"{p:.3f}" for p in r.peaks), _fmt(r.weak_value, 4)]
                 for r in rows]
        print(TableFormatter.format_table([spec.variable, "I", "Regime", "Peaks (p/p')", "w"],
                                          table, title=f"Sweep over {spec.variable}"))
        print(f"\n{Colors.GREEN}✅ {len(rows)} row(s) written to {repo.out_dir}{Colors.RESET}")
        return EXIT_OK

    # overlap / aav

    def overlap(self, config: RunConfig, args) -> int:
        particle = config.build_particle()
        stages = config.build_stages()
        kick = derived_kick(stages[0], particle)
        I = overlap_I(stages[0], particle, config.delta)
        state = run_stages(config.chi_in(), config.delta, stages[:1], particle)
        rho = reduced_density_matrix(state)
        record = {
            'record_type': 'overlap',
            'I': I,
            'regime': classify_regime(I).value,
            'p_prime': kick.momentum_kick,
            'center_shift': kick.center_shift,
            'const_phase': kick.const_phase,
            'kappa': kick.momentum_kick * config.delta / particle.hbar,
            'rho': kick.center_shift / config.delta,
            'reduced_density_matrix': [[{'re': v.real, 'im': v.imag} for v in row]
                                       for row in rho.tolist()],
        }
        self._repository(config, args).save_record(record, "overlap")
        rows = [[k, _fmt(record[k])] for k in
                ('I', 'p_prime', 'center_shift', 'const_phase', 'kappa', 'rho')]
        rows.append(['regime', record['regime']])
        print(TableFormatter.format_table(["Quantity", "Value"], rows,
                                          title=f"Overlap for {config.name}"))
        print(f"\n  rho_s = {np.array2string(rho, precision=4)}")
        return EXIT_OK

    def aav(self, config: RunConfig, args) -> int:
        particle = config.build_particle()
        stage = config.build_stages()[0]
        kick = derived_kick(stage, particle)
        try:
            prediction = aav_prediction(config.chi_in(), config.chi_f(), kick.momentum_kick,
                                        config.delta, A=stage.axis.operator,
                                        hbar=particle.hbar)
        except OrthogonalSelection as e:
            print(f"{Colors.YELLOW}⚠️ {e}{Colors.RESET}")
            return EXIT_ERROR
        repo = self._repository(config, args)
        repo.save_distribution(prediction.distribution, "aav_momentum", args.format)
        repo.save_record(aav_to_dict(prediction), "aav")

        terms = higher_order_terms_check(0.0, kick.momentum_kick, config.delta, args.n_max,
                                         config.chi_f(), stage.axis.operator, particle.hbar,
                                         chi_in=config.chi_in())
        rows = [["weak value", _fmt(prediction.weak_value)],
                ["pointer shift", _fmt(prediction.pointer_shift)],
                ["position shift", _fmt(prediction.position_shift)],
                ["P(post)", _fmt(prediction.postselect_prob)],
                ["eta", _fmt(prediction.eta)],
                ["valid", str(is_valid(prediction.eta))]]
        print(TableFormatter.format_table(["Quantity", "Value"], rows,
                                          title=f"AAV prediction for {config.name}"))
        print(TableFormatter.format_table(
            ["n", "vs overlap", "vs first order"],
            [[str(t.order), _fmt(t.to_overlap, 3), _fmt(t.to_first_order, 3)] for t in terms],
            title="Higher-order terms"))
        return EXIT_OK

    # discriminate

    def discriminate(self, config: RunConfig, args) -> int:
        strategy = Strategy(args.strategy)
        source = Source(SourceKind.XI if args.source == "xi" else SourceKind.ZETA)
        representation = Representation(args.representation) if args.representation else None
        setup = MeasurementSetup.from_run_config(config,
                                                 postselect=strategy is not Strategy.STRONG,
                                                 representation=representation)
        decision = run_strategy(strategy, source, setup, args.max_particles, args.alpha,
                                config.seed, 0, args.batch_size)

        repo = self._repository(config, args)
        repo.save_decision(decision)
        repo.save_trials(decision.trials)

        color = Colors.YELLOW if decision.verdict is Verdict.UNDECIDED else \
            Colors.GREEN if decision.correct else Colors.RED
        self._print_header("DISCRIMINATION RUN", f"strategy {strategy.value}, source {source.kind.value}")
        print(f"  Verdict:         {color}{decision.verdict.value}{Colors.RESET}")
        print(f"  Particles used:  {decision.particles_used} "
              f"{ProgressBar.create(decision.particles_used, args.max_particles)}")
        print(f"  Statistic:       {_fmt(decision.statistic, 4)} (alpha={decision.alpha})")
        if decision.degenerate:
            print(f"  {Colors.YELLOW}⚠️ alpha >= 1: the decision carries no information{Colors.RESET}")
        return EXIT_UNDECIDED if decision.verdict is Verdict.UNDECIDED else EXIT_OK

    def list_presets(self) -> int:
        rows = []
        for name, preset in PRESETS.items():
            notes = preset.provenance if len(preset.provenance) <= 60 \
                else preset.provenance[:57] + "..."
            rows.append([name, f"{preset.delta_cm:.3g} cm", str(len(preset.stages)), notes])
        print(TableFormatter.format_table(["Preset", "delta", "Stages", "Notes"], rows, title="Presets"))
        return EXIT_OK

    # argument parsing

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            description='Exact Stern-Gerlach weak and semiweak measurement toolkit',
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog=f"""
{Colors.CYAN}Distributions:{Colors.RESET}
  python main.py reproduce fig3                       # Figure preset
  python main.py distribution --config run.json      # Custom run file
  python main.py overlap --preset fig2b              # Overlap I and rho_s
  python main.py aav --preset fig2b                  # AAV prediction and validity

{Colors.GREEN}Sweeps:{Colors.RESET}
  python main.py sweep --preset fig3 --variable b --start 1e-3 --stop 1e3 --count 25 --log

{Colors.YELLOW}Discrimination:{Colors.RESET}
  python main.py discriminate --strategy exact-weak --source xi --seed 7
            """
        )

        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--config', help='JSON run configuration')
        common.add_argument('--preset', help='Named figure preset')
        common.add_argument('--out-dir', dest='out_dir', help='Output directory')
        common.add_argument('--seed', type=int, help='Root random seed')
        common.add_argument('--grid-points', dest='grid_points', type=int,
                            help='Grid size for sampled densities')
        common.add_argument('--format', choices=FORMATS, default='csv',
                            help='Output format for tables and densities')
        common.add_argument('--log-level', dest='log_level', default='WARNING',
                            choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

        subparsers = parser.add_subparsers(dest='command', help='Available commands')

        subparsers.add_parser('distribution', parents=[common],
                              help='Exact and AAV pointer distributions')

        reproduce = subparsers.add_parser('reproduce', parents=[common],
                                          help='Run a figure preset')
        reproduce.add_argument('preset_name', choices=list(PRESETS), metavar='preset')

        sweep_parser = subparsers.add_parser('sweep', parents=[common],
                                             help='Sweep one parameter')
        sweep_parser.add_argument('--variable', required=True, choices=['b', 'tau', 'delta', 'theta'])
        sweep_parser.add_argument('--start', type=float, required=True)
        sweep_parser.add_argument('--stop', type=float, required=True)
        sweep_parser.add_argument('--count', type=int, required=True)
        sweep_parser.add_argument('--log', action='store_true', help='Geometric spacing')
        sweep_parser.add_argument('--workers', type=int, default=DEFAULT_SWEEP_WORKERS)

        disc = subparsers.add_parser('discriminate', parents=[common],
                                     help='Tell xi from zeta sequences')
        disc.add_argument('--strategy', required=True, choices=[s.value for s in Strategy])
        disc.add_argument('--source', required=True, choices=['xi', 'zeta'])
        disc.add_argument('--alpha', type=float, default=DEFAULT_ALPHA)
        disc.add_argument('--max-particles', dest='max_particles', type=int,
                          default=DEFAULT_MAX_PARTICLES)
        disc.add_argument('--batch-size', dest='batch_size', type=int,
                          default=DEFAULT_BATCH_SIZE)
        disc.add_argument('--representation', choices=[r.value for r in Representation])

        subparsers.add_parser('overlap', parents=[common], help='Overlap I and reduced density matrix')

        aav_parser = subparsers.add_parser('aav', parents=[common], help='AAV prediction')
        aav_parser.add_argument('--n-max', dest='n_max', type=int, default=4)

        subparsers.add_parser('presets', help='List figure presets')
        return parser

    def parse(self, args: List[str]) -> argparse.Namespace:
        self._parser = self.build_parser()
        return self._parser.parse_args(args)

    def execute(self, parsed_args: argparse.Namespace) -> int:
        parser = getattr(self, '_parser', None) or self.build_parser()
        command = parsed_args.command
        if command is None:
            parser.print_help()
            return EXIT_UNDECIDED
        if command == 'presets':
            return self.list_presets()
        if command == 'reproduce':
            parsed_args.preset = parsed_args.preset_name

        try:
            default = "fig2a"
            if command == 'discriminate':
                default = "fig7-strong" if parsed_args.strategy == Strategy.STRONG.value else "fig7"
            config = self._resolve_config(parsed_args, parser, default)
            handlers = {
                'distribution': self.distribution,
                'reproduce': self.distribution,
                'sweep': self.sweep,
                'overlap': self.overlap,
                'aav': self.aav,
                'discriminate': self.discriminate,
            }
            return handlers[command](config, parsed_args)
        except WeakValueError as e:
            print(f"{Colors.RED}❌ Error: {e}{Colors.RESET}", file=sys.stderr)
            return EXIT_ERROR

    def run(self, args: List[str]) -> int:
        return self.execute(self.parse(args))
