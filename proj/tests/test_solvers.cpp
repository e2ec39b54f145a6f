#include <cmath>

#include <doctest.h>

#include "mapmrf/bench.hpp"
#include "mapmrf/oracle.hpp"
#include "mapmrf/solvers.hpp"
#include "testgen.hpp"

using namespace mapmrf;

namespace {

MrfModel zero_pairwise_model() {
    MrfModel model;
    model.num_nodes = 2;
    model.label_counts = {2, 2};
    model.cliques.push_back({{0, 1}, PotentialTensor({2, 2}, {0, 0, 0, 0})});
    return model;
}

MrfModel unit_grid(std::uint64_t seed) {
    return gen_grid(3, 3, 2, GridConnectivity::N4, GridPotential::Random, 1.0, seed);
}

void check_trace_nonincreasing(const std::vector<double>& trace) {
    for (std::size_t k = 1; k < trace.size(); ++k) {
        CHECK(trace[k] <= trace[k - 1] + 1e-9);
    }
}

bool reports_equal_ignoring_time(const SolverReport& a, const SolverReport& b) {
    return a.final_labeling == b.final_labeling && a.discrete_energy == b.discrete_energy &&
           a.continuous_energy == b.continuous_energy && a.energy_trace == b.energy_trace &&
           a.residual_trace == b.residual_trace && a.iterations == b.iterations &&
           a.termination == b.termination;
}

}  // namespace

TEST_CASE("bcd keeps a discrete start on a zero model") {
    const MrfModel model = zero_pairwise_model();
    const ContinuousAssignment x0 = one_hot(model, {1, 0});
    const SolveResult result = bcd_solve_full(model, x0, SolverConfig{});
    CHECK(result.report.final_labeling == DiscreteLabeling{1, 0});
    CHECK(result.report.iterations == 1);  // one sweep, nothing changed
    CHECK(result.report.termination == Termination::Converged);
}

TEST_CASE("bcd descends on random grids and ends stationary") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const MrfModel model = unit_grid(seed);
        const SolveResult result =
            bcd_solve_full(model, init_random(model, seed), SolverConfig{});
        check_trace_nonincreasing(result.report.energy_trace);
        CHECK(result.report.termination == Termination::Converged);
        CHECK(check_stationarity(model, result.x_final) <= 1e-9);
        CHECK(result.report.discrete_energy ==
              energy_discrete(model, result.report.final_labeling));
    }
}

TEST_CASE("bcd started at the oracle optimum stays there") {
    const MrfModel model = unit_grid(42);
    const auto [best, energy] = brute_force_map(model);
    const SolveResult result =
        bcd_solve_full(model, one_hot(model, best), SolverConfig{});
    CHECK(result.report.final_labeling == best);
    CHECK(result.report.discrete_energy == doctest::Approx(energy));
}

TEST_CASE("round_bcd is the identity on discrete points") {
    const MrfModel model = unit_grid(7);
    const DiscreteLabeling s{0, 1, 1, 0, 1, 0, 0, 1, 1};
    // A discrete point is a BCD fixed point only up to per-node optimality,
    // so rounding may still improve it; rounding a rounded point changes
    // nothing.
    const DiscreteLabeling once = round_bcd(model, one_hot(model, s));
    const DiscreteLabeling twice = round_bcd(model, one_hot(model, once));
    CHECK(once == twice);
}

TEST_CASE("round_bcd maps the homogeneous point of a zero model to label 0") {
    const MrfModel model = zero_pairwise_model();
    CHECK(round_bcd(model, init_homogeneous(model)) == DiscreteLabeling{0, 0});
}

TEST_CASE("rounding never exceeds the continuous energy") {
    int pairs = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const MrfModel model = testgen::random_model(seed, 4);
        for (int t = 0; t < 10; ++t, ++pairs) {
            const ContinuousAssignment x =
                testgen::random_feasible(model, seed * 100 + static_cast<std::uint64_t>(t));
            const DiscreteLabeling rounded = round_bcd(model, x);
            CHECK(energy_discrete(model, rounded) <= energy_continuous(model, x) + 1e-9);
        }
    }
    CHECK(pairs == 200);
}

TEST_CASE("pgd descends, stops immediately on a zero model, ends near-stationary") {
    const MrfModel zero = zero_pairwise_model();
    const SolveResult flat = pgd_solve_full(zero, init_homogeneous(zero), SolverConfig{});
    CHECK(flat.report.termination == Termination::Converged);
    CHECK(flat.report.iterations == 0);
    CHECK(flat.report.discrete_energy == 0.0);

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const MrfModel model = unit_grid(seed);
        SolverConfig cfg;
        cfg.stationarity_tol = 1e-6;
        const SolveResult result = pgd_solve_full(model, init_random(model, seed), cfg);
        check_trace_nonincreasing(result.report.energy_trace);
        if (result.report.termination == Termination::Converged) {
            CHECK(check_stationarity(model, result.x_final) <= 1e-6);
        }
    }
}

TEST_CASE("fw reports a zero gap at a bcd fixed point") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const MrfModel model = unit_grid(seed);
        const SolveResult bcd = bcd_solve_full(model, init_unary(model), SolverConfig{});
        const SolveResult fw = fw_solve_full(model, bcd.x_final, SolverConfig{});
        CHECK(fw.report.iterations == 0);  // gap test fires before any step
        CHECK(fw.report.termination == Termination::Converged);
        CHECK(check_stationarity(model, fw.x_final) <= 1e-9);
    }
}

TEST_CASE("fw on zero potentials converges with zero iterations") {
    const MrfModel model = zero_pairwise_model();
    const SolveResult result = fw_solve_full(model, init_homogeneous(model), SolverConfig{});
    CHECK(result.report.iterations == 0);
    CHECK(result.report.termination == Termination::Converged);
}

TEST_CASE("fw traces are nonincreasing") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const MrfModel model = unit_grid(seed + 20);
        const SolveResult result =
            fw_solve_full(model, init_random(model, seed), SolverConfig{});
        check_trace_nonincreasing(result.report.energy_trace);
    }
}

TEST_CASE("identical runs produce identical reports") {
    const MrfModel model = unit_grid(33);
    SolverConfig cfg;
    cfg.seed = 5;
    CHECK(reports_equal_ignoring_time(pgd_solve(model, init_random(model, 5), cfg),
                                      pgd_solve(model, init_random(model, 5), cfg)));
    CHECK(reports_equal_ignoring_time(admm_solve(model, cfg), admm_solve(model, cfg)));
}

TEST_CASE("degenerate models solve without errors") {
    MrfModel empty;
    const SolveResult nothing = bcd_solve_full(empty, ContinuousAssignment(empty), SolverConfig{});
    CHECK(nothing.report.final_labeling.empty());
    CHECK(nothing.report.discrete_energy == 0.0);

    MrfModel forced;
    forced.num_nodes = 2;
    forced.label_counts = {1, 1};
    forced.cliques.push_back({{0}, PotentialTensor({1}, {0.4})});
    const SolveResult single = pgd_solve_full(forced, init_homogeneous(forced), SolverConfig{});
    CHECK(single.report.final_labeling == DiscreteLabeling{0, 0});
    CHECK(single.report.discrete_energy == doctest::Approx(0.4));

    const SolverReport admm = admm_solve(forced, SolverConfig{});
    CHECK(admm.final_labeling == DiscreteLabeling{0, 0});
}

TEST_CASE("solvers improve or match the unary start on random grids") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const MrfModel model = unit_grid(seed + 40);
        const double start = energy_discrete(model, round_bcd(model, init_unary(model)));
        for (SolverKind kind : {SolverKind::Bcd, SolverKind::Pgd, SolverKind::Fw}) {
            const SolverReport report = solve_with_inits(model, kind, SolverConfig{}, 1);
            CHECK(report.discrete_energy <= start + 1e-9);
        }
    }
}
