from django.core.management.base import BaseCommand, CommandError

from geomopt.exceptions import ConfigValidationError
from geomopt.management.errors import EXIT_CODES
from geomopt.serializers import EXPERIMENTS, ExperimentConfigSerializer, describe_schema
from geomopt.services.artifacts import canonical_json
from geomopt.services.presets import apply_overrides, load_config_file, load_preset, validate_config


class Command(BaseCommand):
    help = 'Validate an experiment config without running it; lists every violation.'

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument('--preset', help='Built-in preset name')
        source.add_argument('--config', help='Path to a JSON experiment config')
        parser.add_argument('--experiment', choices=EXPERIMENTS,
                            help='Experiment to validate for (default: the config\'s own)')
        parser.add_argument('--show-schema', action='store_true', help='Print the config schema as JSON')

    def handle(self, *args, **options):
        if options['show_schema']:
            self.stdout.write(canonical_json(describe_schema(ExperimentConfigSerializer())))
            if not (options.get('preset') or options.get('config')):
                return

        try:
            if options.get('config'):
                raw = load_config_file(options['config'])
            elif options.get('preset'):
                raw = load_preset(options['preset'])
            else:
                raise ConfigValidationError(['preset: Pass --preset or --config.'])
            experiment = options.get('experiment') or raw.get('experiment')
            if experiment:
                raw = apply_overrides(raw, experiment, {})
            config = validate_config(raw)
        except ConfigValidationError as e:
            for violation in e.violations:
                self.stdout.write(self.style.ERROR(f'  {violation}'))
            raise CommandError(
                f"{len(e.violations)} violation(s) found.", returncode=EXIT_CODES['validation']
            )

        self.stdout.write(self.style.SUCCESS(
            f"Config is valid for '{config['experiment']}' ({config['system']})."
        ))
