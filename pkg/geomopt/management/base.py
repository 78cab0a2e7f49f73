"""
Shared plumbing for the experiment management commands.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from geomopt.exceptions import ConfigValidationError, GeometryOptimizationError
from geomopt.services.presets import (
    apply_overrides,
    list_presets,
    load_config_file,
    load_preset,
    validate_config,
)
from geomopt.services.runner import run_experiment

from .errors import EXIT_CODES, command_error_for

logger = logging.getLogger(__name__)


class ExperimentCommand(BaseCommand):
    """
    Base for commands that run one experiment from a preset or config file.

    Subclasses set ``experiment`` and ``title`` and may extend
    ``add_arguments`` and ``overrides``.
    """
    experiment = None
    title = None
    default_preset = None

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument('--preset', help=f'Built-in preset ({", ".join(list_presets())})')
        source.add_argument('--config', help='Path to a JSON experiment config')
        parser.add_argument('--out', help='Output directory (default: runs/<experiment>-<system>)')
        parser.add_argument('--seed', type=int, help='PRNG seed')
        parser.add_argument('--threads', type=int, help='Worker threads for per-geometry work')
        parser.add_argument('--steps', type=int, help='Number of imaginary-time steps')
        parser.add_argument('--dtau', type=float, help='Constant imaginary-time step')
        parser.add_argument('--dtau-min', type=float, dest='dtau_min', help='Schedule start step')
        parser.add_argument('--dtau-max', type=float, dest='dtau_max', help='Schedule saturation step')
        parser.add_argument('--dtau-kappa', type=float, dest='dtau_kappa', help='Schedule decay constant')

    def overrides(self, options):
        keys = ('seed', 'threads', 'out', 'steps', 'dtau', 'dtau_min', 'dtau_max', 'dtau_kappa')
        return {key: options.get(key) for key in keys}

    def load_raw_config(self, options):
        name = options.get('preset')
        path = options.get('config')
        if path:
            return load_config_file(path)
        if name or self.default_preset:
            return load_preset(name or self.default_preset)
        raise ConfigValidationError(['preset: Pass --preset or --config.'])

    def build_config(self, options):
        raw = self.load_raw_config(options)
        return validate_config(apply_overrides(raw, self.experiment, self.overrides(options)))

    def handle(self, *args, **options):
        try:
            config = self.build_config(options)
            self.write_banner(config)
            result = run_experiment(config, threads=options.get('threads'))
        except GeometryOptimizationError as e:
            logger.error(f"{self.experiment} failed: {e}")
            raise command_error_for(e)
        except OSError as e:
            raise CommandError(f"Cannot write outputs: {e}", returncode=EXIT_CODES['validation'])

        self.write_summary(result)

    def write_banner(self, config):
        self.stdout.write(self.style.SUCCESS('=' * 60))
        self.stdout.write(self.style.SUCCESS(f'  {self.title} - {config["system"]}'))
        self.stdout.write(self.style.SUCCESS('=' * 60))
        if config.get('description'):
            self.stdout.write(config['description'])
        self.stdout.write(f'Seed: {config["seed"]}')
        self.stdout.write('')

    def write_summary(self, result):
        for level, message in result.summary:
            if level == 'TABLE':
                self.stdout.write('  ' + '  '.join(f'{str(cell):>22}' for cell in message))
            elif level == 'SUCCESS':
                self.stdout.write(self.style.SUCCESS(message))
            elif level == 'WARNING':
                self.stdout.write(self.style.WARNING(message))
            else:
                self.stdout.write(message)
        self.stdout.write('')
        self.stdout.write(f'Outputs in {result.out_dir}:')
        for name in result.outputs:
            self.stdout.write(f'  - {name}')
