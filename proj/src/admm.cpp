#include <algorithm>
#include <cmath>
#include <limits>

#include "mapmrf/errors.hpp"
#include "mapmrf/projection.hpp"
#include "mapmrf/solvers.hpp"
#include "mapmrf/tensor.hpp"
#include "mapmrf/threads.hpp"
#include "solver_util.hpp"

namespace mapmrf {

using detail::Clock;

double admm_residual(const std::vector<ContinuousAssignment>& xs,
                     const std::vector<ContinuousAssignment>& xs_prev) {
    double acc = 0.0;
    for (std::size_t d = 1; d < xs.size(); ++d) {
        acc += detail::squared_distance(xs[d - 1], xs[d]);
    }
    for (std::size_t d = 0; d < xs.size(); ++d) {
        acc += detail::squared_distance(xs[d], xs_prev[d]);
    }
    return acc;
}

double admm_residual(const AdmmState& state) {
    return admm_residual(state.xs, state.xs_prev);
}

namespace {

bool spans_equal(std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return false;
    }
    return true;
}

}  // namespace

AdmmResult admm_solve_full(const MrfModel& model, const SolverConfig& cfg) {
    cfg.check();
    const auto start = Clock::now();
    const NormalizedModel norm = normalize_potentials(model);
    const MrfModel& nm = norm.model;
    const PositionIndex index = build_position_index(nm);
    const std::size_t n = static_cast<std::size_t>(nm.num_nodes);
    const int degree = nm.degree();
    const std::size_t copies = static_cast<std::size_t>(degree);

    AdmmResult result;
    std::vector<ContinuousAssignment> xs(copies, init_homogeneous(nm));
    std::vector<BlockVector> ys(copies > 0 ? copies - 1 : 0, BlockVector(nm));
    std::vector<ContinuousAssignment> xs_prev = xs;

    DecomposedCoefficientCache pcache(nm, index);
    // Change flags drive both the coefficient cache and the projection skips.
    std::vector<std::vector<char>> x_changed(copies, std::vector<char>(n, 1));
    std::vector<std::vector<char>> y_changed(copies > 0 ? copies - 1 : 0,
                                             std::vector<char>(n, 1));

    double rho = cfg.admm.rho0;
    bool rho_bumped = false;
    double best_residual = std::numeric_limits<double>::infinity();
    int no_improvement = 0;
    int track_from = cfg.admm.stabilization;
    double residual = std::numeric_limits<double>::infinity();
    Termination termination = Termination::MaxIters;
    int iter = 0;

    std::vector<char> p_dirty(n, 1);
    std::vector<double> scratch;

    for (int k = 0; k < cfg.max_iters; ++k) {
        const bool rho_changed = rho_bumped;
        rho_bumped = false;
        xs_prev = xs;

        for (std::size_t d = 0; d < copies; ++d) {
            for (std::size_t i = 0; i < n; ++i) {
                p_dirty[i] = pcache.is_dirty(static_cast<int>(d), static_cast<int>(i)) ? 1 : 0;
            }
            pcache.refresh(xs, static_cast<int>(d));

            parallel_for(n, [&](std::size_t i) {
                bool need = p_dirty[i] != 0 || rho_changed;
                if (d > 0) need = need || y_changed[d - 1][i] || x_changed[d - 1][i];
                if (d + 1 < copies) need = need || y_changed[d][i] || x_changed[d + 1][i];
                if (!need) {
                    x_changed[d][i] = 0;
                    return;
                }

                auto p = pcache.get(static_cast<int>(d), static_cast<int>(i));
                auto block = xs[d].block(i);
                std::vector<double> c(block.size());

                if (copies == 1) {
                    // No consensus constraints: the update is a plain linear
                    // minimization over the simplex.
                    std::fill(block.begin(), block.end(), 0.0);
                    block[argmin_index(p)] = 1.0;
                } else if (d == 0) {
                    auto next = xs[1].block(i);
                    auto y = ys[0].block(i);
                    for (std::size_t s = 0; s < c.size(); ++s) {
                        c[s] = next[s] - (y[s] + p[s]) / rho;
                    }
                    project_simplex(c, block);
                } else if (d + 1 < copies) {
                    auto prev = xs[d - 1].block(i);
                    auto next = xs[d + 1].block(i);
                    auto y_in = ys[d - 1].block(i);
                    auto y_out = ys[d].block(i);
                    for (std::size_t s = 0; s < c.size(); ++s) {
                        c[s] = 0.5 * (prev[s] + next[s]) +
                               (y_in[s] - y_out[s] - p[s]) / (2.0 * rho);
                    }
                    project_nonneg(c, block);
                } else {
                    auto prev = xs[d - 1].block(i);
                    auto y_in = ys[d - 1].block(i);
                    for (std::size_t s = 0; s < c.size(); ++s) {
                        c[s] = prev[s] + (y_in[s] - p[s]) / rho;
                    }
                    project_nonneg(c, block);
                }
                x_changed[d][i] = spans_equal(block, xs_prev[d].block(i)) ? 0 : 1;
            });

            for (std::size_t i = 0; i < n; ++i) {
                if (x_changed[d][i]) {
                    pcache.note_block_change(static_cast<int>(d), static_cast<int>(i));
                }
            }
        }

        for (std::size_t j = 0; j + 1 < copies; ++j) {
            parallel_for(n, [&](std::size_t i) {
                auto lhs = xs[j].block(i);
                auto rhs = xs[j + 1].block(i);
                auto y = ys[j].block(i);
                char changed = 0;
                for (std::size_t s = 0; s < y.size(); ++s) {
                    const double delta = lhs[s] - rhs[s];
                    if (delta != 0.0) {
                        y[s] += rho * delta;
                        changed = 1;
                    }
                }
                y_changed[j][i] = changed;
            });
        }

        residual = admm_residual(xs, xs_prev);
        result.report.residual_trace.push_back(residual);
        result.report.energy_trace.push_back(energy_continuous(nm, xs[0]) * norm.scale);
        iter = k + 1;

        if (residual < cfg.admm.residual_tol) {
            termination = Termination::Converged;
            break;
        }

        // The penalty grows whenever the best residual seen so far has not
        // improved for a full patience window, once past the initial
        // stabilization phase.
        if (k >= track_from) {
            if (residual < best_residual) {
                best_residual = residual;
                no_improvement = 0;
            } else {
                ++no_improvement;
            }
            if (no_improvement >= cfg.admm.patience) {
                no_improvement = 0;
                if (rho < cfg.admm.rho_max) {
                    rho = std::min(rho * cfg.admm.beta, cfg.admm.rho_max);
                    rho_bumped = true;
                } else {
                    termination = Termination::Stalled;
                    break;
                }
            }
        }
    }

    result.report.iterations = static_cast<int>(result.report.energy_trace.size());
    result.report.termination = termination;
    result.report.final_labeling = round_bcd(nm, xs[0]);
    result.report.discrete_energy = energy_discrete(model, result.report.final_labeling);
    result.report.continuous_energy = energy_continuous(model, xs[0]);
    result.report.wall_time_s = detail::seconds_since(start);

    // Return the state in the units of the caller's model: multipliers and
    // the penalty scale with the potentials.
    result.state.xs = std::move(xs);
    result.state.xs_prev = std::move(xs_prev);
    result.state.ys = std::move(ys);
    for (BlockVector& y : result.state.ys) {
        for (double& v : y.flat()) v *= norm.scale;
    }
    result.state.rho = rho * norm.scale;
    result.state.residual = residual;
    result.state.iter = iter;
    return result;
}

SolverReport admm_solve(const MrfModel& model, const SolverConfig& cfg) {
    return admm_solve_full(model, cfg).report;
}

KktReport check_kkt(const MrfModel& model, const AdmmState& state, double tol) {
    KktReport report;
    const PositionIndex index = build_position_index(model);
    const std::size_t copies = state.xs.size();
    const std::size_t n = state.xs.empty() ? 0 : state.xs[0].num_blocks();

    double consensus = 0.0;
    for (std::size_t d = 1; d < copies; ++d) {
        auto a = state.xs[d].flat();
        auto b = state.xs[0].flat();
        for (std::size_t i = 0; i < a.size(); ++i) {
            consensus = std::max(consensus, std::fabs(a[i] - b[i]));
        }
    }
    report.consensus_error = consensus;
    report.consensus_ok = consensus <= tol;

    double violation = 0.0;
    for (std::size_t d = 0; d < copies; ++d) {
        double simplex_gap = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> q = decomposed_coefficient(
                model, index, state.xs, static_cast<int>(d), static_cast<int>(i));
            if (d + 1 < copies) {
                auto y = state.ys[d].block(i);
                for (std::size_t s = 0; s < q.size(); ++s) q[s] += y[s];
            }
            if (d > 0) {
                auto y = state.ys[d - 1].block(i);
                for (std::size_t s = 0; s < q.size(); ++s) q[s] -= y[s];
            }
            auto x = state.xs[d].block(i);
            double dot = 0.0;
            double lo = q[0];
            for (std::size_t s = 0; s < q.size(); ++s) {
                dot += q[s] * x[s];
                lo = std::min(lo, q[s]);
            }
            if (d == 0) {
                // Simplex copy: linearized optimality over the whole set.
                simplex_gap += dot - lo;
            } else {
                // Nonnegative copy: the coefficient must be nonnegative and
                // complementary to the block.
                violation = std::max(violation, -lo);
                violation = std::max(violation, std::fabs(dot));
            }
        }
        if (d == 0) violation = std::max(violation, simplex_gap);
    }
    report.block_violation = violation;
    report.blocks_ok = violation <= tol;

    report.stationarity_gap =
        copies == 0 ? 0.0 : check_stationarity(model, state.xs[0]);
    report.stationarity_ok = report.stationarity_gap <= 10.0 * tol;
    report.passed = report.consensus_ok && report.blocks_ok && report.stationarity_ok;
    return report;
}

}  // namespace mapmrf
