"""
Built-in experiment presets and config loading.
"""
import copy
import json
import logging
from pathlib import Path

from django.conf import settings

from geomopt.exceptions import ConfigValidationError
from geomopt.serializers import ExperimentConfigSerializer, flatten_errors

logger = logging.getLogger(__name__)


def presets_dir() -> Path:
    return Path(settings.GEOMOPT['PRESETS_DIR'])


def list_presets():
    return sorted(p.stem for p in presets_dir().glob('*.json'))


def load_preset(name: str) -> dict:
    """
    Load a preset by name.

    Raises:
        ConfigValidationError: If no preset with that name exists
    """
    path = presets_dir() / f'{name}.json'
    if not path.exists():
        raise ConfigValidationError([
            f"preset: Unknown preset '{name}'. Available: {', '.join(list_presets())}."
        ])
    return load_config_file(path)


def load_config_file(path) -> dict:
    try:
        with open(path, encoding='utf-8') as handle:
            return json.load(handle)
    except OSError as e:
        raise ConfigValidationError([f"config: Cannot read {path}: {e}"])
    except json.JSONDecodeError as e:
        raise ConfigValidationError([f"config: {path} is not valid JSON: {e}"])


def apply_overrides(config: dict, experiment: str, overrides: dict) -> dict:
    """
    Merge command-line overrides into a raw config.

    Recognized keys: seed, threads, out, steps, dtau, dtau_min, dtau_max,
    dtau_kappa, reference. None values are ignored.
    """
    config = copy.deepcopy(config)
    config['experiment'] = experiment
    overrides = {k: v for k, v in overrides.items() if v is not None}

    if 'seed' in overrides:
        config['seed'] = overrides['seed']
    if 'threads' in overrides:
        config['threads'] = overrides['threads']
    if 'out' in overrides:
        config['output_dir'] = str(overrides['out'])
    if 'reference' in overrides:
        config.setdefault('reference', {})['kind'] = overrides['reference']

    if 'steps' in overrides:
        section, key = {
            'pite': ('pite', 'n_steps'),
            'classical-pite': ('classical', 'n_steps'),
            'vite': ('vite', 'steps'),
        }.get(experiment, (None, None))
        if section:
            config.setdefault(section, {})[key] = overrides['steps']

    if 'dtau' in overrides:
        if experiment == 'vite':
            config.setdefault('vite', {})['dtau'] = overrides['dtau']
        else:
            schedule = config.setdefault('schedule', {})
            schedule['dtau_min'] = schedule['dtau_max'] = overrides['dtau']
    for flag, key in (('dtau_min', 'dtau_min'), ('dtau_max', 'dtau_max'), ('dtau_kappa', 'kappa')):
        if flag in overrides:
            config.setdefault('schedule', {})[key] = overrides[flag]
    return config


def validate_config(config: dict) -> dict:
    """
    Validate a raw config against the schema.

    Returns:
        The validated data

    Raises:
        ConfigValidationError: With every violation as a 'field.path: message' line
    """
    serializer = ExperimentConfigSerializer(data=config)
    if not serializer.is_valid():
        raise ConfigValidationError(flatten_errors(serializer.errors))
    logger.debug(f"Config for '{config.get('experiment')}' validated")
    return serializer.validated_data
