from geomopt.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Gate counts and circuit depth per Trotter step for the pairwise interaction schedules.'
    experiment = 'resources'
    title = 'CIRCUIT RESOURCES'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--ne', type=int, dest='n_electrons', help='Number of electrons')
        parser.add_argument('--nnucl', type=int, dest='n_nuclei', help='Number of nuclei')
        parser.add_argument('--nqe', type=int, dest='n_qe', help='Qubits per electron')
        parser.add_argument('--nqn', type=int, dest='n_qn', help='Qubits per nucleus')
        parser.add_argument('--redundant', action='store_true', default=None,
                            help='Use the redundant electronic register for V_ee')
        parser.add_argument('--netlist', action='store_true', default=None,
                            help='Also write each schedule as a line-per-layer netlist')

    def load_raw_config(self, options):
        if options.get('preset') or options.get('config'):
            raw = super().load_raw_config(options)
        else:
            raw = {'system': 'custom'}
        section = raw.setdefault('resources', {})
        for key in ('n_electrons', 'n_nuclei', 'n_qe', 'n_qn', 'redundant', 'netlist'):
            if options.get(key) is not None:
                section[key] = options[key]
        return raw
