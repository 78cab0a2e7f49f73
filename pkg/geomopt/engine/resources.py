"""
Circuit accounting for the interaction phase gates.

Schedules are lists of layers; a layer holds gates that touch pairwise
disjoint registers (electrons ``e*``, nuclei ``n*``, redundant copies ``r*``
and distance registers ``d_ee*``, ``d_en*``, ``d_nn*``). Reversible
arithmetic inside each gate is abstracted into CostModel polynomials.
"""

import math
from dataclasses import asdict, dataclass, field
from itertools import combinations

from geomopt.exceptions import InvalidParameterError, UnsupportedRelationError


@dataclass(frozen=True)
class Gate:
    kind: str
    operands: tuple

    @property
    def registers(self):
        return set(self.operands)

    def label(self):
        return f"{self.kind}({','.join(self.operands)})"


@dataclass(frozen=True)
class GateSchedule:
    layers: tuple

    @property
    def depth(self):
        return len(self.layers)

    @property
    def gate_count(self):
        return sum(len(layer) for layer in self.layers)

    def gates(self, kind=None):
        return [g for layer in self.layers for g in layer if kind is None or g.kind == kind]

    def layers_with(self, kind):
        return sum(1 for layer in self.layers if any(g.kind == kind for g in layer))

    def is_register_disjoint(self):
        for layer in self.layers:
            used = set()
            for gate in layer:
                if used & gate.registers:
                    return False
                used |= gate.registers
        return True

    def to_netlist(self):
        """One line per layer."""
        return '\n'.join(
            f"layer {i}: " + ' '.join(g.label() for g in layer)
            for i, layer in enumerate(self.layers)
        ) + '\n'


def _pairwise_schedule(count, prefix, kind, registers_available):
    """Greedy first-fit layering of all pairs (b, a), a < b, sharing a pool of distance registers."""
    if registers_available < 1:
        raise InvalidParameterError('registers_available', registers_available, '>= 1')
    remaining = [(b, a) for a, b in combinations(range(count), 2)]
    layers = []
    while remaining:
        layer, used, leftover = [], set(), []
        for first, second in remaining:
            if len(layer) < registers_available and first not in used and second not in used:
                slot = len(layer)
                layer.append(Gate(kind, (f'{prefix}{first}', f'{prefix}{second}', f'd_{kind}{slot}')))
                used.update((first, second))
            else:
                leftover.append((first, second))
        layers.append(tuple(layer))
        remaining = leftover
    return GateSchedule(tuple(layers))


def schedule_ee(n_electrons, registers_available=1):
    if n_electrons < 2:
        raise InvalidParameterError('n_electrons', n_electrons, '>= 2')
    return _pairwise_schedule(n_electrons, 'e', 'ee', registers_available)


def schedule_nn(n_nuclei, registers_available=1):
    if n_nuclei < 2:
        raise InvalidParameterError('n_nuclei', n_nuclei, '>= 2')
    return _pairwise_schedule(n_nuclei, 'n', 'nn', registers_available)


def _round_robin(n_major, n_minor, major_prefix, minor_prefix):
    # layer d pairs major (nu + d) mod n_major with minor nu
    layers = []
    for d in range(n_major):
        layers.append(tuple(
            Gate('en', (f'{major_prefix}{(nu + d) % n_major}', f'{minor_prefix}{nu}', f'd_en{nu}'))
            for nu in range(n_minor)
        ))
    return GateSchedule(tuple(layers))


def schedule_en(n_electrons, n_nuclei):
    """
    Round-robin e-n schedule: layer d holds (l = nu + d mod n_e, nu) for every nucleus.

    Raises:
        UnsupportedRelationError: If n_nuclei > n_electrons
    """
    if n_nuclei < 1 or n_electrons < 1:
        raise InvalidParameterError('n_nuclei', n_nuclei, '>= 1 with n_electrons >= 1')
    if n_nuclei > n_electrons:
        raise UnsupportedRelationError(n_electrons, n_nuclei)
    return _round_robin(n_electrons, n_nuclei, 'e', 'n')


def schedule_ee_redundant(n_electrons):
    """
    Copy the electronic register, run n_e - 1 phase layers, then uncopy.

    Phase layer d holds (l' + d, l') with l' + d on the electronic register
    and l' on the redundant register.
    """
    if n_electrons < 2:
        raise InvalidParameterError('n_electrons', n_electrons, '>= 2')
    copy = tuple(Gate('copy', (f'e{l}', f'r{l}')) for l in range(n_electrons))
    layers = [copy]
    for d in range(1, n_electrons):
        layers.append(tuple(
            Gate('ee', (f'e{lp + d}', f'r{lp}', f'd_ee{lp}')) for lp in range(n_electrons - d)
        ))
    layers.append(tuple(Gate('uncopy', g.operands) for g in copy))
    return GateSchedule(tuple(layers))


def distance_register_sizes(n_qe, n_qn, multiplier=1):
    """Widths (n_d_ee, n_d_en, n_d_nn) of the distance registers."""
    if n_qe < 1 or n_qn < 1 or multiplier < 1:
        raise InvalidParameterError('register widths', (n_qe, n_qn, multiplier), 'positive')
    return (multiplier * n_qe, multiplier * max(n_qe, n_qn), multiplier * n_qn)


@dataclass(frozen=True)
class CostModel:
    """
    Depth of one pairwise phase gate as c * n_d**exponent per stage
    (distance computation, phase, uncomputation), each at least 1.
    """
    dist_coeff: float = 1.0
    phase_coeff: float = 1.0
    uncompute_coeff: float = 1.0
    exponent: float = 2.0
    kinetic_coeff: float = 1.0
    copy_depth: int = 1
    register_multiplier: int = 1
    ee_registers: int = 1
    nn_registers: int = 1

    def __post_init__(self):
        for name in ('dist_coeff', 'phase_coeff', 'uncompute_coeff', 'kinetic_coeff'):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(name, getattr(self, name), '> 0')
        if self.copy_depth < 1:
            raise InvalidParameterError('copy_depth', self.copy_depth, '>= 1')

    def stage(self, coeff, width):
        return max(1, math.ceil(coeff * width ** self.exponent))

    def dist_compute(self, width):
        return self.stage(self.dist_coeff, width)

    def phase(self, width):
        return self.stage(self.phase_coeff, width)

    def uncompute(self, width):
        return self.stage(self.uncompute_coeff, width)

    def gate_depth(self, width):
        return self.dist_compute(width) + self.phase(width) + self.uncompute(width)

    def kinetic_depth(self, n_qe):
        return max(1, math.ceil(self.kinetic_coeff * n_qe ** 2))


@dataclass(frozen=True)
class TermDepth:
    gates: int
    layers: int
    depth: int
    asymptotic: str


@dataclass
class DepthReport:
    terms: dict
    total_depth: int
    interaction_depth: int
    register_widths: tuple
    notes: list = field(default_factory=list)

    def table(self):
        """Rows (term, gates, layers, depth, asymptotic class)."""
        return [(name, t.gates, t.layers, t.depth, t.asymptotic) for name, t in self.terms.items()]

    def to_dict(self):
        return {
            'terms': {name: asdict(t) for name, t in self.terms.items()},
            'total_depth': self.total_depth,
            'interaction_depth': self.interaction_depth,
            'register_widths': dict(zip(('ee', 'en', 'nn'), self.register_widths)),
            'notes': self.notes,
        }


def depth_report(n_electrons, n_nuclei, n_qe, n_qn, cost_model=None, redundant=False):
    """
    Depth of one Trotter step: T + max(V_ee, V_nn) + V_en + V_ext.

    V_ee and V_nn act on disjoint registers and run in parallel. When there
    are more nuclei than electrons the e-n round robin runs over nuclei.
    """
    cost = cost_model or CostModel()
    w_ee, w_en, w_nn = distance_register_sizes(n_qe, n_qn, cost.register_multiplier)
    terms = {}

    terms['T'] = TermDepth(
        gates=n_electrons, layers=1, depth=cost.kinetic_depth(n_qe), asymptotic='O(n_qe^2)',
    )

    if n_electrons < 2:
        terms['V_ee'] = TermDepth(0, 0, 0, 'O(1)')
    elif redundant:
        sched = schedule_ee_redundant(n_electrons)
        phase_layers = sched.layers_with('ee')
        terms['V_ee'] = TermDepth(
            gates=len(sched.gates('ee')),
            layers=sched.depth,
            depth=phase_layers * cost.gate_depth(w_ee) + 2 * cost.copy_depth,
            asymptotic='O(n_e poly(log n_e))',
        )
    else:
        sched = schedule_ee(n_electrons, cost.ee_registers)
        terms['V_ee'] = TermDepth(
            gates=sched.gate_count, layers=sched.depth,
            depth=sched.depth * cost.gate_depth(w_ee), asymptotic='O(n_e^2 poly(n_qe))',
        )

    if n_nuclei > n_electrons:
        sched = _round_robin(n_nuclei, n_electrons, 'n', 'e')
    else:
        sched = schedule_en(n_electrons, n_nuclei)
    terms['V_en'] = TermDepth(
        gates=sched.gate_count, layers=sched.depth,
        depth=sched.depth * cost.gate_depth(w_en), asymptotic='O(n_e poly(n_qe, n_qn))',
    )

    if n_nuclei < 2:
        terms['V_nn'] = TermDepth(0, 0, 0, 'O(1)')
    else:
        sched = schedule_nn(n_nuclei, cost.nn_registers)
        terms['V_nn'] = TermDepth(
            gates=sched.gate_count, layers=sched.depth,
            depth=sched.depth * cost.gate_depth(w_nn), asymptotic='O(n_nucl^2 poly(n_qn))',
        )

    terms['V_ext'] = TermDepth(
        gates=n_electrons, layers=1, depth=cost.phase(n_qe), asymptotic='O(poly(n_qe))',
    )

    interaction = max(terms['V_ee'].depth, terms['V_nn'].depth) + terms['V_en'].depth + terms['V_ext'].depth
    notes = [
        'V_ee and V_nn run in parallel; total uses max(V_ee, V_nn).',
        'Fully parallel V_ee: O(n_e^0) depth (O(poly log) in register widths) '
        'with O(n_e^2 n_qe) extra qubits; reported as a class only.',
    ]
    if n_nuclei > n_electrons:
        notes.append('n_nucl > n_e: e-n round robin taken over nuclei.')
    return DepthReport(
        terms=terms,
        total_depth=terms['T'].depth + interaction,
        interaction_depth=interaction,
        register_widths=(w_ee, w_en, w_nn),
        notes=notes,
    )
