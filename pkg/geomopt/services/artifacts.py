"""
Run artifacts: JSON reports, CSV tables and the run manifest.

Floats are written with repr() and JSON keys are sorted, so identical
results give byte-identical files.
"""
import csv
import hashlib
import json
import logging
import os
import platform
import tempfile
from pathlib import Path

import django
import numpy as np
import scipy

import geomopt

logger = logging.getLogger(__name__)


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_plain) + '\n'


def config_hash(config: dict) -> str:
    """SHA-256 of the config in canonical JSON form, excluding output_dir and threads."""
    hashed = {k: v for k, v in config.items() if k not in ('output_dir', 'threads')}
    return hashlib.sha256(json.dumps(hashed, sort_keys=True, default=_plain).encode()).hexdigest()


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    if value is None:
        return ''
    return str(value)


def versions() -> dict:
    return {
        'geomopt': geomopt.__version__,
        'numpy': np.__version__,
        'scipy': scipy.__version__,
        'django': django.get_version(),
        'python': platform.python_version(),
    }


class ArtifactWriter:
    """Writes run outputs into one directory and remembers what it wrote."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.outputs = []

    def _track(self, name):
        if name not in self.outputs:
            self.outputs.append(name)
        return self.out_dir / name

    def write_json(self, name, payload):
        path = self._track(name)
        path.write_text(canonical_json(payload), encoding='utf-8')
        logger.info(f"Wrote {path}")
        return path

    def write_csv(self, name, header, rows):
        path = self._track(name)
        with open(path, 'w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        logger.info(f"Wrote {path} ({len(rows)} rows)")
        return path

    def write_text(self, name, text):
        path = self._track(name)
        path.write_text(text, encoding='utf-8')
        return path

    def write_manifest(self, config, seed, started_at, wall_time):
        """Write manifest.json atomically (temp file + rename) as the last artifact."""
        manifest = {
            'config_hash': config_hash(config),
            'seed': seed,
            'versions': versions(),
            'started_at': started_at,
            'wall_time_seconds': wall_time,
            'outputs': list(self.outputs),
        }
        fd, tmp = tempfile.mkstemp(dir=self.out_dir, prefix='.manifest-', suffix='.json')
        try:
            with os.fdopen(fd, 'w', encoding='utf-8') as handle:
                handle.write(canonical_json(manifest))
            os.replace(tmp, self.out_dir / 'manifest.json')
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        logger.info(f"Wrote manifest for {len(self.outputs)} outputs")
        return manifest
