from geomopt.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Exact per-geometry spectra: energy curves, parities, densities and the dissociation limit.'
    experiment = 'diagonalize'
    title = 'EXACT DIAGONALIZATION'
    default_preset = 'lih-1d'
