from math import sqrt

from custom_types.lattice_type import LatticeType
from custom_types.structure_type import StructureType

# Fractional coordinates of the atoms in one conventional cell.
LATTICE_BASIS = {
    LatticeType.SC: ((0.0, 0.0, 0.0),),
    LatticeType.FCC: (
        (0.0, 0.0, 0.0),
        (0.5, 0.5, 0.0),
        (0.5, 0.0, 0.5),
        (0.0, 0.5, 0.5),
    ),
    LatticeType.BCC: ((0.0, 0.0, 0.0), (0.5, 0.5, 0.5)),
    # orthorhombic cell of an ideal hcp crystal, nearest-neighbour distance = a
    LatticeType.HCP: (
        (0.0, 0.0, 0.0),
        (0.5, 0.5, 0.0),
        (0.5, 1.0 / 6.0, 0.5),
        (0.0, 2.0 / 3.0, 0.5),
    ),
}

# Cell edge lengths in units of the lattice constant.
LATTICE_ASPECT = {
    LatticeType.SC: (1.0, 1.0, 1.0),
    LatticeType.FCC: (1.0, 1.0, 1.0),
    LatticeType.BCC: (1.0, 1.0, 1.0),
    LatticeType.HCP: (1.0, sqrt(3.0), sqrt(8.0 / 3.0)),
}

# Neighbour cutoff in units of the lattice constant: midway between the first
# and second shells (12 neighbours for fcc and hcp, 6 for sc), and for bcc
# midway between the second and third shells (14 neighbours).
SHELL_CUTOFF_FACTORS = {
    LatticeType.SC: (1.0 + sqrt(2.0)) / 2.0,
    LatticeType.FCC: (1.0 / sqrt(2.0) + 1.0) / 2.0,
    LatticeType.BCC: (1.0 + sqrt(2.0)) / 2.0,
    LatticeType.HCP: (1.0 + sqrt(2.0)) / 2.0,
}

SHELL_NEIGHBOUR_COUNTS = {
    LatticeType.SC: 6,
    LatticeType.FCC: 12,
    LatticeType.BCC: 14,
    LatticeType.HCP: 12,
}

# Q_l of perfect lattices for l = 4, 5, 6.
Q_REFERENCE = {
    LatticeType.FCC: {4: 0.191, 5: 0.0, 6: 0.575},
    LatticeType.HCP: {4: 0.097, 5: 0.252, 6: 0.485},
    LatticeType.BCC: {4: 0.036, 5: 0.0, 6: 0.511},
}

# CNA signatures: triplet (n_nb, n_b, n_lcb) -> number of bonds carrying it.
CNA_SIGNATURES = {
    StructureType.FCC: {(4, 2, 1): 12},
    StructureType.HCP: {(4, 2, 1): 6, (4, 2, 2): 6},
    StructureType.BCC: {(6, 6, 6): 8, (4, 4, 4): 6},
}

# Q_5 values at or below this are reported as zero.
Q_ZERO_TOLERANCE = 1e-9
