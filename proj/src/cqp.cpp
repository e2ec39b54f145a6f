#include <algorithm>
#include <cmath>

#include "mapmrf/errors.hpp"
#include "mapmrf/linesearch.hpp"
#include "mapmrf/projection.hpp"
#include "mapmrf/solvers.hpp"
#include "mapmrf/tensor.hpp"
#include "mapmrf/threads.hpp"
#include "solver_util.hpp"

namespace mapmrf {

using detail::Clock;

BlockVector cqp_correction(const MrfModel& model) {
    if (model.degree() > 2) {
        throw NotPairwise("the convex QP relaxation needs a pairwise model");
    }
    BlockVector weights(model);
    for (const Clique& c : model.cliques) {
        if (c.arity() != 2) continue;
        auto di = weights.block(static_cast<std::size_t>(c.nodes[0]));
        auto dj = weights.block(static_cast<std::size_t>(c.nodes[1]));
        const std::size_t cols = dj.size();
        for (std::size_t s = 0; s < di.size(); ++s) {
            const double* row = c.potential.values.data() + s * cols;
            for (std::size_t t = 0; t < cols; ++t) {
                const double half_abs = 0.5 * std::fabs(row[t]);
                di[s] += half_abs;
                dj[t] += half_abs;
            }
        }
    }
    return weights;
}

double cqp_energy(const MrfModel& model, const BlockVector& correction,
                  const ContinuousAssignment& x) {
    // The correction d . x (x - 1) vanishes entrywise at binary points, so
    // discrete energies are preserved exactly.
    double acc = energy_continuous(model, x);
    auto d = correction.flat();
    auto xf = x.flat();
    for (std::size_t i = 0; i < d.size(); ++i) acc += d[i] * xf[i] * (xf[i] - 1.0);
    return acc;
}

SolveResult cqp_solve_full(const MrfModel& model, const ContinuousAssignment& x0,
                           const SolverConfig& cfg) {
    cfg.check();
    if (model.degree() > 2) {
        throw NotPairwise("the convex QP relaxation needs a pairwise model");
    }
    if (!is_feasible(x0)) throw Error("initial point is not feasible");
    const auto start = Clock::now();
    const NormalizedModel norm = normalize_potentials(model);
    const MrfModel& nm = norm.model;
    const PositionIndex index = build_position_index(nm);
    const BlockVector correction = cqp_correction(nm);

    SolveResult result;
    ContinuousAssignment x = x0;
    double objective = cqp_energy(nm, correction, x);
    Termination termination = Termination::MaxIters;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        GradientVector grad = energy_gradient(nm, index, x);
        {
            auto g = grad.flat();
            auto d = correction.flat();
            auto xf = x.flat();
            for (std::size_t i = 0; i < g.size(); ++i) {
                g[i] += d[i] * (2.0 * xf[i] - 1.0);
            }
        }
        const double gap = detail::fw_gap(grad, x);
        if (gap <= cfg.stationarity_tol) {
            termination = Termination::Converged;
            break;
        }

        BlockVector target(nm);
        parallel_for(x.num_blocks(), [&](std::size_t i) {
            auto block = target.block(i);
            std::fill(block.begin(), block.end(), 0.0);
            block[argmin_index(grad.block(i))] = 1.0;
        });
        const BlockVector direction = detail::difference(target, x);

        // Quadratic coefficients of the corrected objective along the ray.
        std::vector<double> coeffs = poly_coeffs_pairwise(nm, x, direction);
        coeffs.resize(3, 0.0);
        coeffs[0] = objective;
        {
            auto d = correction.flat();
            auto xf = x.flat();
            auto r = direction.flat();
            for (std::size_t i = 0; i < d.size(); ++i) {
                coeffs[2] += d[i] * r[i] * r[i];
                coeffs[1] += d[i] * r[i] * (2.0 * xf[i] - 1.0);
            }
        }
        const double alpha = minimize_poly(coeffs, cfg.linesearch_delta);
        detail::axpy(x, alpha, direction);

        const double new_objective = cqp_energy(nm, correction, x);
        result.report.energy_trace.push_back(new_objective * norm.scale);
        const bool stalled = std::fabs(objective - new_objective) <=
                             cfg.energy_tol * (1.0 + std::fabs(objective));
        objective = new_objective;
        if (stalled) {
            termination = Termination::Stalled;
            break;
        }
    }

    result.report.iterations = static_cast<int>(result.report.energy_trace.size());
    result.report.termination = termination;
    // Rounding runs on the original energy, not the corrected one.
    result.report.final_labeling = round_bcd(nm, x);
    result.report.discrete_energy = energy_discrete(model, result.report.final_labeling);
    result.report.continuous_energy = energy_continuous(model, x);
    result.report.wall_time_s = detail::seconds_since(start);
    result.x_final = std::move(x);
    return result;
}

SolverReport cqp_solve(const MrfModel& model, const ContinuousAssignment& x0,
                       const SolverConfig& cfg) {
    return cqp_solve_full(model, x0, cfg).report;
}

}  // namespace mapmrf
