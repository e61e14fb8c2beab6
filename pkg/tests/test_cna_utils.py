from collections import Counter

import numpy as np
import pytest

from custom_types.backend import Backend
from custom_types.errors import CapacityError
from custom_types.lattice_type import LatticeType
from custom_types.structure_type import StructureType
from utils.cna_utils import max_cluster_size


def cluster_oracle(edges):
    """Edges per connected component via union-find on the vertices."""
    parent = {}

    def find(v):
        parent.setdefault(v, v)
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for v, w in edges:
        parent[find(v)] = find(w)
    sizes = Counter(find(v) for v, _ in edges)
    return max(sizes.values(), default=0)


@pytest.mark.parametrize(
    "edges, expected",
    [
        ([], 0),
        ([(0, 1)], 1),
        ([(0, 1), (1, 2)], 2),
        ([(0, 1), (2, 3), (3, 4)], 2),
        ([(0, 1), (1, 2), (0, 2)], 3),
        ([(5, 7), (1, 2), (2, 9), (9, 1), (7, 8)], 3),
    ],
)
def test_max_cluster_size_examples(edges, expected):
    assert max_cluster_size(edges) == expected


def test_max_cluster_size_matches_union_find(rng):
    for _ in range(1000):
        nvertices = int(rng.integers(2, 10))
        candidates = [(v, w) for v in range(nvertices) for w in range(v + 1, nvertices)]
        keep = rng.random(len(candidates)) < 0.3
        edges = [e for e, k in zip(candidates, keep) if k]
        assert max_cluster_size(edges) == cluster_oracle(edges)


def run_cna(cna_utils, state, r_c, backend=Backend.CELL_LIST, dsl=False):
    env = cna_utils.cna_direct_bonds(state, r_c, backend=backend, dsl=dsl)
    env = cna_utils.cna_environment_bonds(state, env, r_c, backend=backend, dsl=dsl)
    return env, cna_utils.cna_classify(state, env, r_c, backend=backend)


def neighbour_sets(positions, extents, r_c, brute_pairs):
    neighbours = {i: set() for i in range(len(positions))}
    for i, j in brute_pairs(positions, extents, r_c, strict=True):
        neighbours[i].add(j)
    return neighbours


def test_isolated_particle_and_pair(state_utils, cna_utils):
    state = state_utils.create_state(
        3, (10.0, 10.0, 10.0), [[1.0, 1.0, 1.0], [2.0, 1.0, 1.0], [6.0, 6.0, 6.0]]
    )
    env, triplets = run_cna(cna_utils, state, 1.5, Backend.ALL_PAIRS)
    assert env.direct_bonds(0) == [(0, 1)]
    assert env.direct_bonds(1) == [(1, 0)]
    assert env.direct_bonds(2) == []
    assert env.environment_bonds(0) == []
    assert triplets.of(0) == [(0, 0, 0)]
    assert triplets.of(2) == []


def test_triangle_environment(state_utils, cna_utils):
    state = state_utils.create_state(
        3, (10.0, 10.0, 10.0), [[1.0, 1.0, 1.0], [2.0, 1.0, 1.0], [1.5, 1.8, 1.0]]
    )
    env, triplets = run_cna(cna_utils, state, 1.5, Backend.ALL_PAIRS)
    assert env.direct_bonds(0) == [(0, 1), (0, 2)]
    assert env.environment_bonds(0) == [(1, 2), (2, 1)]
    assert triplets.of(0) == [(1, 0, 0), (1, 0, 0)]


def test_random_configuration_matches_oracle(state_utils, cna_utils, rng, brute_pairs):
    extents = (6.0, 6.0, 6.0)
    positions = rng.random((30, 3)) * 6.0
    state = state_utils.create_state(30, extents, positions)
    env, triplets = run_cna(cna_utils, state, 1.6, Backend.ALL_PAIRS)
    neighbours = neighbour_sets(positions, extents, 1.6, brute_pairs)
    for i in range(30):
        assert env.direct_bonds(i) == [(i, j) for j in sorted(neighbours[i])]
        expected_environment = [
            (j, k) for j in sorted(neighbours[i]) for k in sorted(neighbours[j]) if k != i
        ]
        assert env.environment_bonds(i) == expected_environment
        expected_triplets = []
        for j in sorted(neighbours[i]):
            common = neighbours[i] & neighbours[j]
            edges = [(v, w) for v in common for w in neighbours[v] & common if v < w]
            expected_triplets.append((len(common), len(edges), cluster_oracle(edges)))
        assert triplets.of(i) == expected_triplets


@pytest.mark.parametrize(
    "lattice, structure",
    [
        (LatticeType.FCC, StructureType.FCC),
        (LatticeType.HCP, StructureType.HCP),
        (LatticeType.BCC, StructureType.BCC),
    ],
)
def test_perfect_lattices_are_classified(
    state_utils, lattice_utils, cna_utils, analysis_utils, lattice, structure
):
    positions, extents = lattice_utils.generate_lattice(lattice, 4, 1.0)
    state = state_utils.create_state(len(positions), extents, positions)
    _, triplets = run_cna(cna_utils, state, lattice_utils.shell_cutoff(lattice, 1.0))
    classification = analysis_utils.classify_structures(triplets)
    assert classification.counts[structure] == state.npart
    assert classification.fraction(structure) == 1.0
    assert classification.counts[StructureType.UNCLASSIFIED] == 0


def test_fcc_signature(state_utils, lattice_utils, cna_utils):
    positions, extents = lattice_utils.generate_lattice(LatticeType.FCC, 3, 1.0)
    state = state_utils.create_state(len(positions), extents, positions)
    _, triplets = run_cna(cna_utils, state, lattice_utils.shell_cutoff(LatticeType.FCC, 1.0))
    assert Counter(triplets.of(0)) == {(4, 2, 1): 12}


def test_dsl_kernels_match_native(state_utils, lattice_utils, cna_utils, rng):
    positions, extents = lattice_utils.generate_lattice(LatticeType.FCC, 3, 1.0)
    positions = positions + rng.uniform(-0.05, 0.05, positions.shape)
    r_c = lattice_utils.shell_cutoff(LatticeType.FCC, 1.0)
    results = []
    for dsl in (False, True):
        state = state_utils.create_state(len(positions), extents, positions)
        env, triplets = run_cna(cna_utils, state, r_c, dsl=dsl)
        results.append((env.bonds.values.copy(), env.nu_b.values.copy(), triplets.triplets.values.copy()))
    for native, dsl in zip(results[0], results[1]):
        np.testing.assert_array_equal(native, dsl)


def test_bond_capacity_overflow(state_utils, lattice_utils, cna_utils):
    positions, extents = lattice_utils.generate_lattice(LatticeType.FCC, 3, 1.0)
    state = state_utils.create_state(len(positions), extents, positions)
    with pytest.raises(CapacityError) as e:
        cna_utils.cna_direct_bonds(state, lattice_utils.shell_cutoff(LatticeType.FCC, 1.0), nu_b_max=4)
    assert e.value.capacity == 4


def test_triplet_capacity_overflow(state_utils, lattice_utils, cna_utils):
    positions, extents = lattice_utils.generate_lattice(LatticeType.FCC, 3, 1.0)
    state = state_utils.create_state(len(positions), extents, positions)
    r_c = lattice_utils.shell_cutoff(LatticeType.FCC, 1.0)
    env = cna_utils.cna_direct_bonds(state, r_c)
    env = cna_utils.cna_environment_bonds(state, env, r_c)
    with pytest.raises(CapacityError):
        cna_utils.cna_classify(state, env, r_c, nu_nb_max=8)


def test_duplicate_global_ids_rejected(state_utils, cna_utils):
    state = state_utils.create_state(2, (10.0, 10.0, 10.0), [[1.0, 1.0, 1.0], [2.0, 1.0, 1.0]])
    state.global_ids.values[:, 0] = 7
    with pytest.raises(ValueError):
        cna_utils.cna_direct_bonds(state, 1.5)


@pytest.mark.parametrize("lattice", [LatticeType.HCP, LatticeType.BCC])
def test_box_within_three_cutoffs_rejected(state_utils, lattice_utils, cna_utils, lattice):
    positions, extents = lattice_utils.generate_lattice(lattice, 3, 1.0)
    state = state_utils.create_state(len(positions), extents, positions)
    r_c = lattice_utils.shell_cutoff(lattice, 1.0)
    assert min(extents) <= 3.0 * r_c
    with pytest.raises(ValueError):
        cna_utils.cna_direct_bonds(state, r_c)


def jittered_fcc(lattice_utils, rng, cells=4):
    positions, extents = lattice_utils.generate_lattice(LatticeType.FCC, cells, 1.0)
    return positions + rng.uniform(-0.03, 0.03, positions.shape), extents


def test_triplets_invariant_under_uniform_scaling(state_utils, lattice_utils, cna_utils, rng):
    positions, extents = jittered_fcc(lattice_utils, rng)
    r_c = lattice_utils.shell_cutoff(LatticeType.FCC, 1.0)
    results = []
    for scale in (1.0, 1.7):
        state = state_utils.create_state(
            len(positions), tuple(scale * e for e in extents), scale * positions
        )
        _, triplets = run_cna(cna_utils, state, scale * r_c)
        results.append([sorted(triplets.of(i)) for i in range(state.npart)])
    assert results[0] == results[1]


def test_triplets_follow_particle_permutation(state_utils, lattice_utils, cna_utils, rng):
    positions, extents = jittered_fcc(lattice_utils, rng)
    r_c = lattice_utils.shell_cutoff(LatticeType.FCC, 1.0)
    npart = len(positions)
    reference = state_utils.create_state(npart, extents, positions)
    reference_env, reference_triplets = run_cna(cna_utils, reference, r_c)

    perm = rng.permutation(npart)
    permuted = state_utils.create_state(npart, extents, positions[perm])
    permuted.global_ids.values[:, 0] = perm
    permuted_env, permuted_triplets = run_cna(cna_utils, permuted, r_c)
    for k in range(npart):
        assert sorted(permuted_env.direct_bonds(k)) == sorted(reference_env.direct_bonds(perm[k]))
        assert sorted(permuted_triplets.of(k)) == sorted(reference_triplets.of(perm[k]))
