#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mapmrf/model.hpp"
#include "mapmrf/oracle.hpp"
#include "mapmrf/solvers.hpp"

namespace mapmrf {

enum class GridConnectivity { N4, N8 };

enum class GridPotential { Potts, Random };

/// rows x cols grid MRF. Unary potentials are i.i.d. uniform[-1,1]; pairwise
/// potentials are either Potts lambda*[s != t] or i.i.d. uniform[-1,1]. N8
/// adds the two diagonal neighbors. Deterministic per seed.
MrfModel gen_grid(int rows, int cols, int labels, GridConnectivity connectivity,
                  GridPotential potential, double potts_lambda, std::uint64_t seed);

/// Random third-order model: uniform[-1,1] unaries on every node plus
/// `num_triples` distinct random node triples with dense uniform[-1,1]
/// tensors.
MrfModel gen_higher_order(int nodes, int labels, int num_triples, std::uint64_t seed);

/// One solver run under the standard protocol: BCD/PGD/FW try `inits`
/// starting points (the unary solution, then random ones seeded
/// cfg.seed+1, cfg.seed+2, ...) and keep the lowest discrete energy; ADMM
/// always runs once from the homogeneous point, CQP once from it too (the
/// relaxation is convex).
SolverReport solve_with_inits(const MrfModel& model, SolverKind kind, const SolverConfig& cfg,
                              int inits);

struct SuiteRun {
    std::string instance;
    std::string solver;
    double value = 0.0;           // best discrete energy
    bool has_oracle = false;
    double oracle_gap = 0.0;
    int iterations = 0;
    double wall_time_s = 0.0;
    bool failed = false;
    std::string error;
    std::string record_path;
};

struct SuiteSummary {
    std::vector<SuiteRun> runs;
    std::string summary_json_path;
    std::string summary_text_path;
};

/// Runs every (instance, solver) pair of a JSON suite spec, writing one
/// RunRecord per run plus machine-readable and aligned-text summaries under
/// out_dir. Failures are recorded and do not stop the suite. Protocol
/// defaults: BCD/PGD/FW take 5 initializations (unary plus 4 random), ADMM
/// a single homogeneous one.
SuiteSummary run_suite(const std::string& spec_path, const std::string& out_dir);

SuiteSummary run_suite_json(const std::string& spec_json, const std::string& out_dir);

}  // namespace mapmrf
