# Names under which the simulation and analysis drivers attach their dats.
POSITION = "r"
GLOBAL_ID = "id"
VELOCITY = "v"
FORCE = "F"
MASS = "m"
THERMOSTAT_DRAW = "andersen_draw"

BOA_MOMENTS = "boa_moments_{l}"
BOA_NEIGHBOURS = "boa_nu_nb"
BOA_Q = "boa_Q_{l}"

CNA_BONDS = "cna_bonds"
CNA_DIRECT_COUNT = "cna_nu_nb"
CNA_BOND_COUNT = "cna_nu_b"
CNA_TRIPLETS = "cna_triplets"
CNA_TRIPLET_COUNT = "cna_t"

SAME_STATE_COUNT = "same_state_count"
