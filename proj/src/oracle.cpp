#include "mapmrf/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "mapmrf/errors.hpp"
#include "mapmrf/rng.hpp"

namespace mapmrf {

namespace {

std::uint64_t label_space_size(const MrfModel& model, std::uint64_t cap) {
    std::uint64_t total = 1;
    for (int count : model.label_counts) {
        if (total > cap / static_cast<std::uint64_t>(count)) {
            throw SearchSpaceTooLarge("label space exceeds the enumeration cap of " +
                                      std::to_string(cap));
        }
        total *= static_cast<std::uint64_t>(count);
    }
    return total;
}

}  // namespace

std::pair<DiscreteLabeling, double> brute_force_map(const MrfModel& model, std::uint64_t cap) {
    validate_or_throw(model);
    const std::uint64_t total = label_space_size(model, cap);

    DiscreteLabeling current(static_cast<std::size_t>(model.num_nodes), 0);
    DiscreteLabeling best = current;
    double best_energy = energy_discrete(model, current);
    for (std::uint64_t k = 1; k < total; ++k) {
        // Lexicographic odometer: the last node varies fastest, so the first
        // minimizer found is the lexicographically smallest one.
        for (int i = model.num_nodes - 1; i >= 0; --i) {
            if (++current[static_cast<std::size_t>(i)] <
                model.label_counts[static_cast<std::size_t>(i)]) {
                break;
            }
            current[static_cast<std::size_t>(i)] = 0;
        }
        const double energy = energy_discrete(model, current);
        if (energy < best_energy) {
            best_energy = energy;
            best = current;
        }
    }
    return {best, best_energy};
}

TightnessReport verify_tightness(const MrfModel& model, int trials, std::uint64_t seed,
                                 std::uint64_t cap) {
    const auto [oracle_labels, oracle_energy] = brute_force_map(model, cap);
    (void)oracle_labels;

    TightnessReport report;
    report.trials = trials;
    report.oracle_energy = oracle_energy;
    for (int t = 0; t < trials; ++t) {
        const ContinuousAssignment x = init_random(model, seed + static_cast<std::uint64_t>(t));
        const double continuous = energy_continuous(model, x);
        const DiscreteLabeling rounded = round_bcd(model, x);
        const double discrete = energy_discrete(model, rounded);
        if (discrete > continuous + 1e-9) ++report.rounding_violations;
        if (discrete < oracle_energy - 1e-9) ++report.oracle_violations;
        if (discrete <= oracle_energy + 1e-9) ++report.reached_optimum;
    }
    report.fraction_optimal =
        trials > 0 ? static_cast<double>(report.reached_optimum) / trials : 0.0;
    return report;
}

std::string to_string(SolverKind k) {
    switch (k) {
        case SolverKind::Bcd: return "bcd";
        case SolverKind::Pgd: return "pgd";
        case SolverKind::Fw: return "fw";
        case SolverKind::Admm: return "admm";
        case SolverKind::Cqp: return "cqp";
    }
    return "unknown";
}

SolverKind solver_kind_from_string(const std::string& s) {
    if (s == "bcd") return SolverKind::Bcd;
    if (s == "pgd") return SolverKind::Pgd;
    if (s == "fw") return SolverKind::Fw;
    if (s == "admm") return SolverKind::Admm;
    if (s == "cqp") return SolverKind::Cqp;
    throw Error("unknown solver: " + s);
}

double solver_vs_oracle(const MrfModel& model, SolverKind solver, const SolverConfig& cfg,
                        std::uint64_t cap) {
    const auto [oracle_labels, oracle_energy] = brute_force_map(model, cap);
    (void)oracle_labels;

    SolverReport report;
    switch (solver) {
        case SolverKind::Bcd: report = bcd_solve(model, init_unary(model), cfg); break;
        case SolverKind::Pgd: report = pgd_solve(model, init_unary(model), cfg); break;
        case SolverKind::Fw: report = fw_solve(model, init_unary(model), cfg); break;
        case SolverKind::Admm: report = admm_solve(model, cfg); break;
        case SolverKind::Cqp: report = cqp_solve(model, init_unary(model), cfg); break;
    }
    return report.discrete_energy - oracle_energy;
}

}  // namespace mapmrf
