from geomopt.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Variational imaginary-time evolution of a hardware-efficient ansatz on the joint register.'
    experiment = 'vite'
    title = 'VARIATIONAL IMAGINARY-TIME EVOLUTION'
    default_preset = 'h2plus-1d'
