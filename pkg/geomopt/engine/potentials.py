"""
Pair potentials, external fields and the improved Lennard-Jones atom-bond model.

Quantum systems use atomic units. The ILJ surface uses Angstrom and meV.
All distances are plain open-boundary Euclidean distances.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from geomopt.exceptions import InvalidParameterError, SingularInputError

logger = logging.getLogger(__name__)

PAIR_KINDS = ('soft_coulomb', 'bare_coulomb', 'polynomial', 'tabulated')

# LiH model softness parameters (atomic units)
LIH_SOFTNESS = {
    'ee': 0.6,
    'eH': 0.7,
    'eLi': 2.25,
    'LiH': 2.35,
}


def soft_coulomb(r, softness_sq):
    """1 / sqrt(lambda^2 + r^2)."""
    return 1.0 / np.sqrt(softness_sq + np.square(r))


@dataclass(frozen=True)
class PairPotential:
    """
    Pairwise interaction v(r). Charge prefactors and signs are applied by callers.

    ``bare_coulomb`` returns inf at r = 0; ``tabulated`` is linear between
    table points and constant beyond the ends.
    """
    kind: str
    softness_sq: float = None
    coefficients: tuple = ()
    r_grid: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in PAIR_KINDS:
            raise InvalidParameterError('kind', self.kind, f"one of {', '.join(PAIR_KINDS)}")
        if self.kind == 'soft_coulomb' and not (self.softness_sq and self.softness_sq > 0):
            raise InvalidParameterError('softness_sq', self.softness_sq, '> 0')
        if self.kind == 'polynomial' and not self.coefficients:
            raise InvalidParameterError('coefficients', self.coefficients, 'non-empty')
        if self.kind == 'tabulated':
            if len(self.r_grid) < 2 or len(self.r_grid) != len(self.values):
                raise InvalidParameterError(
                    'r_grid', len(self.r_grid),
                    message="Tabulated potentials need matching r_grid and values of length >= 2."
                )
            if np.any(np.diff(self.r_grid) <= 0):
                raise InvalidParameterError('r_grid', self.r_grid, 'strictly increasing')

    @classmethod
    def soft(cls, softness_sq):
        return cls(kind='soft_coulomb', softness_sq=float(softness_sq))

    @property
    def is_singular_at_zero(self):
        return self.kind == 'bare_coulomb'

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == 'soft_coulomb':
            return soft_coulomb(r, self.softness_sq)
        if self.kind == 'bare_coulomb':
            with np.errstate(divide='ignore'):
                return 1.0 / r
        if self.kind == 'polynomial':
            return P.polyval(r, np.asarray(self.coefficients, dtype=float))
        return np.interp(r, np.asarray(self.r_grid, dtype=float), np.asarray(self.values, dtype=float))


@dataclass(frozen=True)
class ExternalField:
    """
    Scalar field v_ext(r) over position vectors (last axis = direction).

    ``uniform`` is the linear potential F . r of a homogeneous field.
    """
    kind: str = 'zero'
    strength: tuple = ()
    function: object = field(default=None, compare=False)

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def uniform(cls, strength):
        return cls(kind='uniform', strength=tuple(float(s) for s in strength))

    @classmethod
    def custom(cls, function):
        return cls(kind='custom', function=function)

    @property
    def is_zero(self):
        return self.kind == 'zero'

    def __call__(self, positions):
        positions = np.asarray(positions, dtype=float)
        if self.kind == 'zero':
            return np.zeros(positions.shape[:-1])
        if self.kind == 'uniform':
            return positions @ np.asarray(self.strength, dtype=float)
        values = np.asarray(self.function(positions), dtype=float)
        if not np.all(np.isfinite(values)):
            raise SingularInputError("External field is not finite on the grid.")
        return values


def lih_electron_nucleus_potential(x, x_h, x_li):
    """Potential felt by one electron of the 1D LiH model (Z_H = Z_Li = 1)."""
    return (
        -soft_coulomb(np.abs(np.asarray(x) - x_h), LIH_SOFTNESS['eH'])
        - soft_coulomb(np.abs(np.asarray(x) - x_li), LIH_SOFTNESS['eLi'])
    )


# ---------------------------------------------------------------------------
# Improved Lennard-Jones atom-bond model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IljBondParams:
    """Well depths (meV) and equilibrium distances (Angstrom) for one bond type."""
    D_perp: float
    D_par: float
    lambda_perp: float
    lambda_par: float

    def __post_init__(self):
        for name in ('D_perp', 'D_par', 'lambda_perp', 'lambda_par'):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(name, getattr(self, name), '> 0')


@dataclass(frozen=True)
class IljParams:
    bonds: dict
    beta: float = 10.0
    m: float = 6.0

    @classmethod
    def argon_benzene(cls):
        """Ar interacting with the CC and CH bonds of benzene."""
        return cls(bonds={
            'CC': IljBondParams(D_perp=3.895, D_par=4.910, lambda_perp=3.879, lambda_par=4.189),
            'CH': IljBondParams(D_perp=4.814, D_par=3.981, lambda_perp=3.641, lambda_par=3.851),
        })

    def for_bond(self, kind):
        try:
            return self.bonds[kind]
        except KeyError:
            raise InvalidParameterError(
                'bond kind', kind, message=f"No ILJ parameters for bond type '{kind}'."
            )


@dataclass(frozen=True)
class Bond:
    start: int
    end: int
    kind: str


@dataclass(frozen=True)
class BondSegment:
    """Resolved bond endpoints in Angstrom."""
    start: tuple
    end: tuple
    kind: str


@dataclass(frozen=True)
class MoleculeGeometry:
    labels: tuple
    positions: np.ndarray = field(compare=False)
    bonds: tuple

    def __post_init__(self):
        n_atoms = len(self.labels)
        if np.shape(self.positions) != (n_atoms, 3):
            raise InvalidParameterError(
                'positions', np.shape(self.positions),
                message=f"Molecule positions must have shape ({n_atoms}, 3)."
            )
        for bond in self.bonds:
            for atom in (bond.start, bond.end):
                if not 0 <= atom < n_atoms:
                    raise InvalidParameterError(
                        'bonds', atom, message=f"Bond endpoint {atom} does not reference an atom."
                    )

    @classmethod
    def benzene(cls, cc_bond=1.39, ch_bond=1.09):
        """
        Planar benzene centered at the origin in the xy plane.

        Carbons sit at angles 90 + 60k degrees, so two C-H bonds lie on the y axis.
        """
        angles = np.deg2rad(90.0 + 60.0 * np.arange(6))
        ring = np.stack([np.cos(angles), np.sin(angles), np.zeros(6)], axis=1)
        carbons = cc_bond * ring
        hydrogens = (cc_bond + ch_bond) * ring
        positions = np.vstack([carbons, hydrogens])
        labels = ('C',) * 6 + ('H',) * 6
        bonds = tuple(Bond(k, (k + 1) % 6, 'CC') for k in range(6))
        bonds += tuple(Bond(k, k + 6, 'CH') for k in range(6))
        return cls(labels=labels, positions=positions, bonds=bonds)

    def bond_segments(self):
        return tuple(
            BondSegment(tuple(self.positions[b.start]), tuple(self.positions[b.end]), b.kind)
            for b in self.bonds
        )


def ilj_atom_bond(atom_pos, bond, params):
    """
    ILJ energy (meV) between an atom and one bond.

    Vectorized over leading axes of ``atom_pos`` (last axis = xyz).

    Args:
        atom_pos: Atom position(s) in Angstrom
        bond: BondSegment
        params: IljParams

    Raises:
        SingularInputError: If the atom sits on the bond center
    """
    atom_pos = np.asarray(atom_pos, dtype=float)
    start = np.asarray(bond.start, dtype=float)
    end = np.asarray(bond.end, dtype=float)
    axis = end - start
    bond_length = np.linalg.norm(axis)
    if bond_length == 0:
        raise SingularInputError(f"{bond.kind} bond has zero length.")

    separation = atom_pos - 0.5 * (start + end)
    distance = np.linalg.norm(separation, axis=-1)
    if np.any(distance == 0):
        raise SingularInputError(f"Atom coincides with the center of a {bond.kind} bond (s = 0).")

    cos_sq = np.square(separation @ axis / (distance * bond_length))
    sin_sq = 1.0 - cos_sq
    bp = params.for_bond(bond.kind)
    depth = bp.D_perp * sin_sq + bp.D_par * cos_sq
    eq_distance = bp.lambda_perp * sin_sq + bp.lambda_par * cos_sq

    s = distance / eq_distance
    n = params.beta + 4.0 * np.square(s)
    m = params.m
    return depth / (n - m) * (m / s ** n - n / s ** m)


def ilj_interaction_energy(atom_pos, molecule, params):
    """Sum of ILJ atom-bond terms over every bond of the molecule (meV)."""
    if not molecule.bonds:
        raise InvalidParameterError('bonds', (), 'at least one bond')
    segments = molecule.bond_segments()
    total = ilj_atom_bond(atom_pos, segments[0], params)
    for segment in segments[1:]:
        total = total + ilj_atom_bond(atom_pos, segment, params)
    return total


def scan_ilj_surface(molecule, params, xs, zs, y=0.0):
    """
    ILJ energy of a probe atom over an x-z grid.

    Returns:
        (energies, (x_min, z_min)) where energies has shape (len(xs), len(zs))
        and the minimum is the first occurrence in row-major order.
    """
    xs = np.asarray(xs, dtype=float)
    zs = np.asarray(zs, dtype=float)
    X, Z = np.meshgrid(xs, zs, indexing='ij')
    points = np.stack([X, np.full_like(X, y), Z], axis=-1)
    energies = ilj_interaction_energy(points, molecule, params)
    ix, iz = np.unravel_index(int(np.argmin(energies)), energies.shape)
    logger.debug(f"ILJ scan over {energies.size} points, minimum {energies[ix, iz]:.6f} meV")
    return energies, (float(xs[ix]), float(zs[iz]))
