#include "mapmrf/solvers.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include "mapmrf/errors.hpp"
#include "mapmrf/linesearch.hpp"
#include "mapmrf/projection.hpp"
#include "mapmrf/tensor.hpp"
#include "mapmrf/threads.hpp"
#include "solver_util.hpp"

namespace mapmrf {

using detail::Clock;

void SolverConfig::check() const {
    if (max_iters < 0) throw Error("max_iters must be nonnegative");
    if (energy_tol <= 0.0) throw Error("energy_tol must be positive");
    if (stationarity_tol <= 0.0) throw Error("stationarity_tol must be positive");
    if (linesearch_delta <= 0.0) throw Error("linesearch_delta must be positive");
    if (admm.rho0 <= 0.0) throw Error("rho0 must be positive");
    if (admm.beta <= 1.0) throw Error("beta must exceed 1");
    if (admm.rho_max < admm.rho0) throw Error("rho_max must be at least rho0");
    if (admm.residual_tol <= 0.0) throw Error("residual_tol must be positive");
    if (admm.stabilization < 0 || admm.patience < 0) {
        throw Error("stabilization and patience must be nonnegative");
    }
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::MaxIters: return "max_iters";
        case Termination::Stalled: return "stalled";
    }
    return "unknown";
}

Termination termination_from_string(const std::string& s) {
    if (s == "converged") return Termination::Converged;
    if (s == "max_iters") return Termination::MaxIters;
    if (s == "stalled") return Termination::Stalled;
    throw Error("unknown termination value: " + s);
}

namespace {

struct BcdOutcome {
    ContinuousAssignment x;
    std::vector<double> trace;  // energy after each sweep, model scale
    bool converged = false;
};

/// Sweeps nodes in index order until a full sweep changes nothing. Each
/// update puts the block at the lowest-index minimizer of its coefficient;
/// an incumbent one-hot block that already attains the minimum is kept.
BcdOutcome bcd_core(const MrfModel& model, const PositionIndex& index,
                    const ContinuousAssignment& x0, int max_sweeps) {
    BcdOutcome out;
    out.x = x0;
    NodeCoefficientCache cache(model, index);
    const std::size_t n = out.x.num_blocks();
    int sweeps = 0;
    while (sweeps < std::max(max_sweeps, 1)) {
        bool any_change = false;
        for (std::size_t i = 0; i < n; ++i) {
            auto coeff = cache.get(out.x, static_cast<int>(i));
            auto block = out.x.block(i);
            const std::size_t target = argmin_index(coeff);
            const int hot = detail::one_hot_label(block);
            if (hot >= 0 && coeff[static_cast<std::size_t>(hot)] == coeff[target]) {
                continue;  // incumbent vertex is still optimal
            }
            std::fill(block.begin(), block.end(), 0.0);
            block[target] = 1.0;
            if (hot != static_cast<int>(target)) {
                any_change = true;
                cache.invalidate_neighbors_of(static_cast<int>(i));
            }
        }
        ++sweeps;
        out.trace.push_back(energy_continuous(model, out.x));
        if (!any_change) {
            out.converged = true;
            break;
        }
    }
    return out;
}

void require_feasible(const ContinuousAssignment& x0, const MrfModel& model) {
    if (x0.num_blocks() != static_cast<std::size_t>(model.num_nodes)) {
        throw DimensionMismatch("initial point block count differs from num_nodes");
    }
    if (!is_feasible(x0)) throw Error("initial point is not feasible");
}

enum class GradientStep { ProjectedGradient, FrankWolfe };

SolveResult gradient_solve(const MrfModel& model, const ContinuousAssignment& x0,
                           const SolverConfig& cfg, GradientStep kind) {
    cfg.check();
    require_feasible(x0, model);
    const auto start = Clock::now();
    const NormalizedModel norm = normalize_potentials(model);
    const MrfModel& nm = norm.model;
    const PositionIndex index = build_position_index(nm);

    SolveResult result;
    ContinuousAssignment x = x0;
    double energy = energy_continuous(nm, x);
    Termination termination = Termination::MaxIters;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const GradientVector grad = energy_gradient(nm, index, x);
        const double gap = detail::fw_gap(grad, x);
        if (gap <= cfg.stationarity_tol) {
            termination = Termination::Converged;
            break;
        }

        BlockVector target(nm);
        if (kind == GradientStep::ProjectedGradient) {
            parallel_for(x.num_blocks(), [&](std::size_t i) {
                auto xi = x.block(i);
                auto gi = grad.block(i);
                std::vector<double> shifted(xi.size());
                for (std::size_t s = 0; s < xi.size(); ++s) shifted[s] = xi[s] - gi[s];
                project_simplex(shifted, target.block(i));
            });
        } else {
            parallel_for(x.num_blocks(), [&](std::size_t i) {
                auto block = target.block(i);
                std::fill(block.begin(), block.end(), 0.0);
                block[argmin_index(grad.block(i))] = 1.0;
            });
        }

        const BlockVector direction = detail::difference(target, x);
        const double alpha = line_search(nm, x, direction, cfg.linesearch_delta);
        detail::axpy(x, alpha, direction);

        const double new_energy = energy_continuous(nm, x);
        result.report.energy_trace.push_back(new_energy * norm.scale);
        const bool stalled =
            std::fabs(energy - new_energy) <= cfg.energy_tol * (1.0 + std::fabs(energy));
        energy = new_energy;
        if (stalled) {
            termination = Termination::Stalled;
            break;
        }
    }

    result.report.iterations = static_cast<int>(result.report.energy_trace.size());
    result.report.termination = termination;

    const BcdOutcome rounded = bcd_core(nm, index, x, cfg.max_iters);
    result.report.final_labeling = detail::labels_from_vertices(rounded.x);
    result.report.discrete_energy = energy_discrete(model, result.report.final_labeling);
    result.report.continuous_energy = energy_continuous(model, x);
    result.x_final = std::move(x);
    result.report.wall_time_s = detail::seconds_since(start);
    return result;
}

}  // namespace

SolveResult bcd_solve_full(const MrfModel& model, const ContinuousAssignment& x0,
                           const SolverConfig& cfg) {
    cfg.check();
    require_feasible(x0, model);
    const auto start = Clock::now();
    const NormalizedModel norm = normalize_potentials(model);
    const PositionIndex index = build_position_index(norm.model);

    BcdOutcome out = bcd_core(norm.model, index, x0, cfg.max_iters);

    SolveResult result;
    result.report.final_labeling = detail::labels_from_vertices(out.x);
    result.report.discrete_energy = energy_discrete(model, result.report.final_labeling);
    result.report.continuous_energy = energy_continuous(model, out.x);
    for (double e : out.trace) result.report.energy_trace.push_back(e * norm.scale);
    result.report.iterations = static_cast<int>(out.trace.size());
    result.report.termination =
        out.converged ? Termination::Converged : Termination::MaxIters;
    result.report.wall_time_s = detail::seconds_since(start);
    result.x_final = std::move(out.x);
    return result;
}

SolverReport bcd_solve(const MrfModel& model, const ContinuousAssignment& x0,
                       const SolverConfig& cfg) {
    return bcd_solve_full(model, x0, cfg).report;
}

DiscreteLabeling round_bcd(const MrfModel& model, const ContinuousAssignment& x) {
    // BCD updates are invariant to the positive rescaling used inside the
    // solvers, so rounding on the raw model is equivalent.
    const PositionIndex index = build_position_index(model);
    const BcdOutcome out = bcd_core(model, index, x, std::numeric_limits<int>::max());
    return detail::labels_from_vertices(out.x);
}

SolveResult pgd_solve_full(const MrfModel& model, const ContinuousAssignment& x0,
                           const SolverConfig& cfg) {
    return gradient_solve(model, x0, cfg, GradientStep::ProjectedGradient);
}

SolverReport pgd_solve(const MrfModel& model, const ContinuousAssignment& x0,
                       const SolverConfig& cfg) {
    return pgd_solve_full(model, x0, cfg).report;
}

SolveResult fw_solve_full(const MrfModel& model, const ContinuousAssignment& x0,
                          const SolverConfig& cfg) {
    return gradient_solve(model, x0, cfg, GradientStep::FrankWolfe);
}

SolverReport fw_solve(const MrfModel& model, const ContinuousAssignment& x0,
                      const SolverConfig& cfg) {
    return fw_solve_full(model, x0, cfg).report;
}

double check_stationarity(const MrfModel& model, const ContinuousAssignment& x) {
    const GradientVector grad = energy_gradient(model, x);
    return detail::fw_gap(grad, x);
}

}  // namespace mapmrf
