"""
Experiment configuration schema.

Configs are JSON documents with nested sections. Lengths and energies are
interpreted through the ``units`` section: quantum experiments run in
atomic units (au / hartree), the ILJ surface in angstrom / meV.
"""

from math import prod

from rest_framework import serializers

from geomopt.engine.vite import INIT_STRATEGIES

from .base import StrictSerializer

EXPERIMENTS = ['diagonalize', 'pite', 'vite', 'classical-pite', 'resources']
SYSTEMS = ['lih-1d', 'h2plus-1d', 'benzene-argon', 'custom']
QUANTUM_EXPERIMENTS = ('diagonalize', 'pite', 'vite')


class UnitsSerializer(StrictSerializer):
    length = serializers.ChoiceField(choices=['au', 'angstrom'], default='au')
    energy = serializers.ChoiceField(choices=['hartree', 'meV'], default='hartree')

    def validate(self, data):
        if (data['length'] == 'au') != (data['energy'] == 'hartree'):
            raise serializers.ValidationError(
                "Units must be au/hartree or angstrom/meV; mixed unit systems are not allowed."
            )
        return data


class LayoutSerializer(StrictSerializer):
    n_electrons = serializers.IntegerField(min_value=1)
    spatial_dim = serializers.ChoiceField(choices=[1, 2, 3], default=1)
    qubits_per_direction = serializers.IntegerField(min_value=1)
    cell_length = serializers.FloatField()

    def validate_cell_length(self, value):
        if value <= 0:
            raise serializers.ValidationError("Cell length must be greater than 0.")
        return value


class NucleusSerializer(StrictSerializer):
    label = serializers.CharField()
    charge = serializers.FloatField(default=1.0)
    position = serializers.ListField(child=serializers.FloatField(), min_length=1, max_length=3)


class ActiveCoordinateSerializer(StrictSerializer):
    nucleus = serializers.IntegerField(min_value=0)
    axis = serializers.IntegerField(min_value=0, max_value=2)
    qubits = serializers.IntegerField(min_value=1)
    max_displacement = serializers.FloatField()


class GeometrySerializer(StrictSerializer):
    nuclei = NucleusSerializer(many=True, allow_empty=False)
    active = ActiveCoordinateSerializer(many=True, required=False, default=list)

    def validate(self, data):
        dims = {len(n['position']) for n in data['nuclei']}
        if len(dims) > 1:
            raise serializers.ValidationError({"nuclei": "All nuclear positions need the same dimension."})
        dim = dims.pop()
        seen = set()
        for coord in data['active']:
            if coord['nucleus'] >= len(data['nuclei']):
                raise serializers.ValidationError({
                    "active": f"Nucleus index {coord['nucleus']} does not exist."
                })
            if coord['axis'] >= dim:
                raise serializers.ValidationError({
                    "active": f"Axis {coord['axis']} exceeds the {dim}D nuclear positions."
                })
            key = (coord['nucleus'], coord['axis'])
            if key in seen:
                raise serializers.ValidationError({"active": f"Coordinate {key} listed twice."})
            seen.add(key)
        return data


class PairPotentialSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=['soft_coulomb', 'bare_coulomb', 'polynomial', 'tabulated'])
    softness_sq = serializers.FloatField(required=False)
    coefficients = serializers.ListField(child=serializers.FloatField(), required=False)
    r_grid = serializers.ListField(child=serializers.FloatField(), required=False)
    values = serializers.ListField(child=serializers.FloatField(), required=False)

    def validate(self, data):
        kind = data['kind']
        if kind == 'soft_coulomb' and not data.get('softness_sq', 0) > 0:
            raise serializers.ValidationError({"softness_sq": "Soft Coulomb needs softness_sq > 0."})
        if kind == 'polynomial' and not data.get('coefficients'):
            raise serializers.ValidationError({"coefficients": "Polynomial potentials need coefficients."})
        if kind == 'tabulated':
            r_grid, values = data.get('r_grid', []), data.get('values', [])
            if len(r_grid) < 2 or len(r_grid) != len(values):
                raise serializers.ValidationError({
                    "r_grid": "Tabulated potentials need r_grid and values of equal length >= 2."
                })
            if any(b <= a for a, b in zip(r_grid, r_grid[1:])):
                raise serializers.ValidationError({"r_grid": "r_grid must be strictly increasing."})
        return data


class ExternalFieldSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=['zero', 'uniform'], default='zero')
    strength = serializers.ListField(child=serializers.FloatField(), required=False, default=list)

    def validate(self, data):
        if data['kind'] == 'uniform' and not data['strength']:
            raise serializers.ValidationError({"strength": "Uniform fields need a strength vector."})
        return data


class InteractionsSerializer(StrictSerializer):
    electron_electron = PairPotentialSerializer(required=False, allow_null=True, default=None)
    electron_nucleus = PairPotentialSerializer(many=True, required=False, default=list)
    nucleus_nucleus = PairPotentialSerializer(required=False, allow_null=True, default=None)
    external_field = ExternalFieldSerializer(required=False, default=dict)


class ReferenceSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=['gaussian_symmetric', 'gaussian_antisymmetric'],
                                   default='gaussian_symmetric')
    width = serializers.FloatField(default=3.0)

    def validate_width(self, value):
        if value <= 0:
            raise serializers.ValidationError("Width must be greater than 0.")
        return value


class InitialGuessSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=['uniform', 'weights'], default='uniform')
    weights = serializers.ListField(child=serializers.FloatField(min_value=0.0), required=False)

    def validate(self, data):
        if data['kind'] == 'weights':
            weights = data.get('weights')
            if not weights:
                raise serializers.ValidationError({"weights": "Explicit initial guesses need weights."})
            if abs(sum(weights) - 1.0) > 1e-10:
                raise serializers.ValidationError({"weights": "Weights must sum to 1."})
        return data


class ScheduleSerializer(StrictSerializer):
    dtau_min = serializers.FloatField()
    dtau_max = serializers.FloatField()
    kappa = serializers.FloatField(default=1.0)

    def validate(self, data):
        if data['dtau_min'] <= 0:
            raise serializers.ValidationError({"dtau_min": "dtau_min must be greater than 0."})
        if data['dtau_min'] > data['dtau_max']:
            raise serializers.ValidationError({
                "dtau_min": f"dtau_min ({data['dtau_min']}) must not exceed dtau_max ({data['dtau_max']})."
            })
        if data['kappa'] <= 0:
            raise serializers.ValidationError({"kappa": "kappa must be greater than 0."})
        return data


class PiteSerializer(StrictSerializer):
    n_steps = serializers.IntegerField(min_value=1, default=19)
    gamma = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.9)
    energy_shift = serializers.FloatField(required=False, allow_null=True, default=None)
    ground_state_weights = serializers.BooleanField(default=True)
    shots = serializers.IntegerField(min_value=1, default=1000)

    def validate_gamma(self, value):
        if value <= 0:
            raise serializers.ValidationError("gamma must be in (0, 1].")
        return value


class ViteSerializer(StrictSerializer):
    depth = serializers.IntegerField(min_value=0, default=12)
    dtau = serializers.FloatField(default=0.01)
    steps = serializers.IntegerField(min_value=0, default=6000)
    lambda_reg = serializers.FloatField(default=1e-6)
    axes = serializers.CharField(default='y')
    init = serializers.ChoiceField(choices=INIT_STRATEGIES, default='superposition')
    init_spread = serializers.FloatField(min_value=0.0, default=0.05)
    record_every = serializers.IntegerField(min_value=1, default=10)
    target_geometry = serializers.IntegerField(min_value=0, default=2)

    def validate_axes(self, value):
        if not value or any(a not in 'xyz' for a in value.lower()):
            raise serializers.ValidationError("Axes must be a string over x, y, z.")
        return value.lower()

    def validate_lambda_reg(self, value):
        if value <= 0:
            raise serializers.ValidationError("lambda_reg must be greater than 0.")
        return value

    def validate_dtau(self, value):
        if value <= 0:
            raise serializers.ValidationError("dtau must be greater than 0.")
        return value


class DiagonalizeSerializer(StrictSerializer):
    n_states = serializers.IntegerField(min_value=1, default=3)
    density_geometries = serializers.ListField(
        child=serializers.IntegerField(min_value=0), required=False, default=list
    )


class ScanSerializer(StrictSerializer):
    x_min = serializers.FloatField()
    x_max = serializers.FloatField()
    z_min = serializers.FloatField()
    z_max = serializers.FloatField()
    step = serializers.FloatField()
    export = serializers.BooleanField(default=False)

    def validate(self, data):
        if data['step'] <= 0:
            raise serializers.ValidationError({"step": "Scan step must be greater than 0."})
        if data['x_min'] > data['x_max'] or data['z_min'] > data['z_max']:
            raise serializers.ValidationError("Scan bounds must satisfy min <= max.")
        return data


class ClassicalSerializer(StrictSerializer):
    surface = serializers.ChoiceField(choices=['ilj', 'pair'], default='ilj')
    n_steps = serializers.IntegerField(min_value=1, default=19)
    probe = serializers.IntegerField(min_value=0, default=0)
    shots = serializers.IntegerField(min_value=1, default=1000)
    scan = ScanSerializer(required=False, allow_null=True, default=None)


class IljBondSerializer(StrictSerializer):
    D_perp = serializers.FloatField()
    D_par = serializers.FloatField()
    lambda_perp = serializers.FloatField()
    lambda_par = serializers.FloatField()

    def validate(self, data):
        for name, value in data.items():
            if value <= 0:
                raise serializers.ValidationError({name: f"{name} must be greater than 0."})
        return data


class MoleculeSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=['benzene'], default='benzene')
    cc_bond = serializers.FloatField(default=1.39)
    ch_bond = serializers.FloatField(default=1.09)


class IljSerializer(StrictSerializer):
    beta = serializers.FloatField(default=10.0)
    m = serializers.FloatField(default=6.0)
    bonds = serializers.DictField(child=IljBondSerializer())
    molecule = MoleculeSerializer(required=False, default=dict)


class CostModelSerializer(StrictSerializer):
    dist_coeff = serializers.FloatField(default=1.0)
    phase_coeff = serializers.FloatField(default=1.0)
    uncompute_coeff = serializers.FloatField(default=1.0)
    exponent = serializers.FloatField(min_value=0.0, default=2.0)
    kinetic_coeff = serializers.FloatField(default=1.0)
    copy_depth = serializers.IntegerField(min_value=1, default=1)
    register_multiplier = serializers.IntegerField(min_value=1, default=1)
    ee_registers = serializers.IntegerField(min_value=1, default=1)
    nn_registers = serializers.IntegerField(min_value=1, default=1)

    def validate(self, data):
        for name in ('dist_coeff', 'phase_coeff', 'uncompute_coeff', 'kinetic_coeff'):
            if data[name] <= 0:
                raise serializers.ValidationError({name: f"{name} must be greater than 0."})
        return data


class ResourcesSerializer(StrictSerializer):
    n_electrons = serializers.IntegerField(min_value=1)
    n_nuclei = serializers.IntegerField(min_value=1)
    n_qe = serializers.IntegerField(min_value=1, default=1)
    n_qn = serializers.IntegerField(min_value=1, default=1)
    redundant = serializers.BooleanField(default=False)
    netlist = serializers.BooleanField(default=False)
    cost = CostModelSerializer(required=False, default=dict)


class ExperimentConfigSerializer(StrictSerializer):
    """Top-level experiment config; cross-section rules live in validate()."""
    experiment = serializers.ChoiceField(choices=EXPERIMENTS)
    system = serializers.ChoiceField(choices=SYSTEMS, default='custom')
    description = serializers.CharField(required=False, allow_blank=True)
    units = UnitsSerializer(required=False, default=dict)
    seed = serializers.IntegerField(min_value=0, default=0)
    threads = serializers.IntegerField(min_value=1, required=False)
    output_dir = serializers.CharField(required=False, allow_null=True, default=None)
    dense_cap = serializers.IntegerField(min_value=1, required=False)
    layout = LayoutSerializer(required=False)
    geometry = GeometrySerializer(required=False)
    interactions = InteractionsSerializer(required=False)
    reference = ReferenceSerializer(required=False, default=dict)
    initial_guess = InitialGuessSerializer(required=False, default=dict)
    schedule = ScheduleSerializer(required=False)
    pite = PiteSerializer(required=False, default=dict)
    vite = ViteSerializer(required=False, default=dict)
    diagonalize = DiagonalizeSerializer(required=False, default=dict)
    classical = ClassicalSerializer(required=False, default=dict)
    ilj = IljSerializer(required=False)
    resources = ResourcesSerializer(required=False)

    def validate(self, data):
        errors = {}
        experiment = data['experiment']

        def require(*sections):
            for section in sections:
                if data.get(section) is None:
                    errors[section] = [f"Section '{section}' is required for '{experiment}' runs."]

        if experiment in QUANTUM_EXPERIMENTS:
            require('layout', 'geometry', 'interactions')
            if data['units']['length'] != 'au':
                errors['units'] = ["Quantum experiments run in atomic units (au/hartree)."]
        if experiment == 'pite':
            require('schedule')
        if experiment == 'classical-pite':
            require('geometry', 'schedule')
            if data['classical']['surface'] == 'ilj':
                require('ilj')
                if data['units']['length'] != 'angstrom':
                    errors['units'] = ["The ILJ surface is defined in angstrom/meV."]
            elif data.get('interactions') is None or data['interactions'].get('nucleus_nucleus') is None:
                errors['interactions'] = ["Pair surfaces need interactions.nucleus_nucleus."]
        if experiment == 'resources':
            require('resources')
        if errors:
            raise serializers.ValidationError(errors)

        self._validate_consistency(data, errors)
        if errors:
            raise serializers.ValidationError(errors)
        return data

    def _validate_consistency(self, data, errors):
        layout, geometry = data.get('layout'), data.get('geometry')
        if geometry is None:
            return
        n_nuclei = len(geometry['nuclei'])
        n_geometries = prod(2 ** c['qubits'] for c in geometry['active'])
        experiment = data['experiment']

        if experiment in QUANTUM_EXPERIMENTS and layout is not None:
            dim = len(geometry['nuclei'][0]['position'])
            if dim != layout['spatial_dim']:
                errors['geometry'] = [
                    f"Nuclear positions are {dim}D but layout.spatial_dim is {layout['spatial_dim']}."
                ]
            en = data['interactions']['electron_nucleus']
            if en and len(en) != n_nuclei:
                errors['interactions'] = [
                    f"electron_nucleus needs one potential per nucleus ({n_nuclei}), got {len(en)}."
                ]
            if (data['reference']['kind'] == 'gaussian_antisymmetric'
                    and layout['n_electrons'] != 2):
                errors['reference'] = ["Antisymmetric references need exactly two electrons."]

        guess = data['initial_guess']
        if guess['kind'] == 'weights' and len(guess['weights']) != n_geometries:
            errors['initial_guess'] = [
                f"Initial guess has {len(guess['weights'])} weights for {n_geometries} geometries."
            ]
        if experiment == 'vite' and data['vite']['target_geometry'] >= n_geometries:
            errors['vite'] = [
                f"target_geometry {data['vite']['target_geometry']} exceeds {n_geometries} geometries."
            ]
        if experiment == 'classical-pite' and data['classical']['probe'] >= n_nuclei:
            errors['classical'] = [f"Probe nucleus {data['classical']['probe']} does not exist."]
        bad = [J for J in data['diagonalize']['density_geometries'] if J >= n_geometries]
        if experiment == 'diagonalize' and bad:
            errors['diagonalize'] = [f"density_geometries {bad} exceed {n_geometries} geometries."]
