from geomopt.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Geometry optimization by probabilistic imaginary-time evolution on the joint register.'
    experiment = 'pite'
    title = 'PITE GEOMETRY OPTIMIZATION'
    default_preset = 'lih-1d'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--reference',
            choices=['gaussian_symmetric', 'gaussian_antisymmetric'],
            help='Electronic reference state prepared in every geometry block',
        )

    def overrides(self, options):
        overrides = super().overrides(options)
        overrides['reference'] = options.get('reference')
        return overrides
