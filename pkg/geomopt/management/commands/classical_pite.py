from geomopt.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Closed-form imaginary-time weights over classical candidate geometries (ILJ or pair surfaces).'
    experiment = 'classical-pite'
    title = 'CLASSICAL-NUCLEI GEOMETRY OPTIMIZATION'
    default_preset = 'benzene-argon'
