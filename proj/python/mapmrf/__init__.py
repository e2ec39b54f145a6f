"""MAP inference for discrete MRFs via a tight nonconvex relaxation."""

from ._core import (  # noqa: F401
    AdmmConfig,
    Clique,
    MapMrfError,
    MrfModel,
    PotentialTensor,
    SolverConfig,
    SolverReport,
    __version__,
    brute_force_map,
    check_stationarity,
    energy_continuous,
    energy_discrete,
    energy_gradient,
    gen_grid,
    gen_higher_order,
    init_homogeneous,
    init_random,
    init_unary,
    parse_native,
    parse_uai,
    project_simplex,
    round_bcd,
    serialize_native,
    solve,
    validate,
)
