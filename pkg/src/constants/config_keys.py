# (key, kind, default); a default of None marks an optional value with no default.
CONFIG_KEYS = (
    ("mode", "str", None),
    ("lattice", "str", "sc"),
    ("n_per_side", "int", None),
    ("npart", "int", None),
    ("density", "float", None),
    ("temperature", "float", "0.72"),
    ("mass", "float", "1.0"),
    ("epsilon", "float", "1.0"),
    ("sigma", "float", "1.0"),
    ("rc", "float", "2.5"),
    ("delta", "float", "0.25"),
    ("dt", "float", "0.005"),
    ("steps", "int", "1000"),
    ("reuse", "int", "20"),
    ("thermostat", "bool", "false"),
    ("thermostat_temperature", "float", "0.0"),
    ("thermostat_frequency", "float", "1.0"),
    ("backend", "str", "neighbour_list"),
    ("workers", "int", "1"),
    ("seed", "seed", "12345"),
    ("force_kernel", "path", None),
    ("output_dir", "path", "out"),
    ("output_format", "str", "xyz"),
    ("sample_interval", "int", "10"),
    ("snapshot_interval", "int", "0"),
    ("boa_interval", "int", "0"),
    ("boa_l", "int_list", "4,6"),
    ("boa_rc", "float", None),
    ("cna_rc", "float", None),
    ("nu_nb_max", "int", "32"),
    ("nu_b_max", "int", "512"),
    ("input", "path", None),
    ("box", "float_list", None),
    ("bench_sizes", "int_list", "32000,64000,128000"),
    ("bench_backends", "str_list", "cell_list,neighbour_list"),
    ("bench_workers", "int_list", "1"),
    ("bench_steps", "int", "10"),
)

# Keys that must be present in every configuration.
REQUIRED_KEYS = ("mode",)

# Modes that generate their own lattice need a size and a density.
LATTICE_KEYS = ("density",)
LATTICE_SIZE_KEYS = ("n_per_side", "npart")
