#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mapmrf/model.hpp"

namespace mapmrf {

struct AdmmConfig {
    double rho0 = 1e-3;
    double rho_max = 100.0;
    double beta = 1.2;        // penalty growth factor, > 1
    int stabilization = 500;  // I1: iterations before residual tracking starts
    int patience = 500;       // I2: no-improvement window triggering a bump
    double residual_tol = 1e-6;
};

struct SolverConfig {
    int max_iters = 10000;
    double energy_tol = 1e-9;        // relative energy-change stop
    double stationarity_tol = 1e-9;  // Frank-Wolfe gap stop
    AdmmConfig admm;
    double linesearch_delta = 1e-4;  // scan increment for degree > 3
    std::uint64_t seed = 0;

    void check() const;  // throws on invalid combinations
};

enum class Termination { Converged, MaxIters, Stalled };

std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct SolverReport {
    DiscreteLabeling final_labeling;
    double discrete_energy = 0.0;    // energy_discrete on the unnormalized model
    double continuous_energy = 0.0;  // E at the final continuous iterate, unnormalized scale
    std::vector<double> energy_trace;    // one entry per iteration, unnormalized scale
    std::vector<double> residual_trace;  // ADMM only
    int iterations = 0;
    double wall_time_s = 0.0;
    Termination termination = Termination::Converged;
};

/// Decomposed ADMM state: D assignment copies, D-1 multipliers (ys[j] couples
/// copies j and j+1), current penalty and residual.
struct AdmmState {
    std::vector<ContinuousAssignment> xs;
    std::vector<BlockVector> ys;
    std::vector<ContinuousAssignment> xs_prev;
    double rho = 0.0;
    double residual = 0.0;
    int iter = 0;
};

/// Consensus-plus-movement residual of the cyclic decomposition:
/// sum_d ||xs[d-1] - xs[d]||^2 + sum_d ||xs[d] - xs_prev[d]||^2.
double admm_residual(const std::vector<ContinuousAssignment>& xs,
                     const std::vector<ContinuousAssignment>& xs_prev);

double admm_residual(const AdmmState& state);

/// Extended results carrying the final continuous iterate (and, for ADMM,
/// the full decomposed state) alongside the report.
struct SolveResult {
    SolverReport report;
    ContinuousAssignment x_final;
};

struct AdmmResult {
    SolverReport report;
    AdmmState state;
};

/// Block coordinate descent: sweeps nodes in order, assigning each block the
/// lowest-index vertex minimizing its linear coefficient; an incumbent
/// one-hot block that is already optimal is kept. Stops when a sweep changes
/// nothing. The output is discrete.
SolveResult bcd_solve_full(const MrfModel& model, const ContinuousAssignment& x0,
                           const SolverConfig& cfg);
SolverReport bcd_solve(const MrfModel& model, const ContinuousAssignment& x0,
                       const SolverConfig& cfg);

/// Rounds a feasible continuous point by running BCD from it; never
/// increases the energy.
DiscreteLabeling round_bcd(const MrfModel& model, const ContinuousAssignment& x);

/// Projected gradient descent with unit gradient step and exact line search.
SolveResult pgd_solve_full(const MrfModel& model, const ContinuousAssignment& x0,
                           const SolverConfig& cfg);
SolverReport pgd_solve(const MrfModel& model, const ContinuousAssignment& x0,
                       const SolverConfig& cfg);

/// Frank-Wolfe with exact line search; stops on the gap test.
SolveResult fw_solve_full(const MrfModel& model, const ContinuousAssignment& x0,
                          const SolverConfig& cfg);
SolverReport fw_solve(const MrfModel& model, const ContinuousAssignment& x0,
                      const SolverConfig& cfg);

/// Cyclic-decomposition ADMM with adaptive penalty. Starts from the
/// homogeneous assignment for every copy and zero multipliers; rounds the
/// first copy (the simplex-constrained one).
AdmmResult admm_solve_full(const MrfModel& model, const SolverConfig& cfg);
SolverReport admm_solve(const MrfModel& model, const SolverConfig& cfg);

/// Convex QP relaxation for pairwise models, minimized by Frank-Wolfe with
/// the closed-form quadratic line search; rounding uses the original energy.
SolveResult cqp_solve_full(const MrfModel& model, const ContinuousAssignment& x0,
                           const SolverConfig& cfg);
SolverReport cqp_solve(const MrfModel& model, const ContinuousAssignment& x0,
                       const SolverConfig& cfg);

/// Diagonal correction weights d_i of the convex QP relaxation.
BlockVector cqp_correction(const MrfModel& model);

/// E_cqp(x) = E(x) + sum_i sum_s d_i(s) x_i(s) (x_i(s) - 1); equals E exactly
/// at every discrete point.
double cqp_energy(const MrfModel& model, const BlockVector& correction,
                  const ContinuousAssignment& x);

/// Frank-Wolfe gap max_{u in X} grad(x)^T (x - u); zero iff x is stationary.
double check_stationarity(const MrfModel& model, const ContinuousAssignment& x);

struct KktReport {
    bool consensus_ok = false;
    double consensus_error = 0.0;  // max_d ||x^d - x^1||_inf
    bool blocks_ok = false;
    double block_violation = 0.0;  // worst per-copy optimality violation
    double stationarity_gap = 0.0; // gap of the first copy
    bool stationarity_ok = false;
    bool passed = false;
};

/// Verifies the decomposed KKT conditions at `state`: consensus across
/// copies, per-copy linearized optimality over its constraint set, and
/// stationarity of the first copy at 10x the tolerance.
KktReport check_kkt(const MrfModel& model, const AdmmState& state, double tol);

}  // namespace mapmrf
