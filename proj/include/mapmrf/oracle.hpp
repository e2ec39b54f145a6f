#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "mapmrf/model.hpp"
#include "mapmrf/solvers.hpp"

namespace mapmrf {

inline constexpr std::uint64_t kDefaultOracleCap = 1'000'000;

/// Exhaustive MAP: enumerates every labeling lexicographically and returns
/// the first global minimizer with its energy. Throws SearchSpaceTooLarge
/// when the label space exceeds cap.
std::pair<DiscreteLabeling, double> brute_force_map(const MrfModel& model,
                                                    std::uint64_t cap = kDefaultOracleCap);

struct TightnessReport {
    int trials = 0;
    int rounding_violations = 0;   // rounded energy > continuous energy + tol
    int oracle_violations = 0;     // rounded energy < oracle minimum - tol
    int reached_optimum = 0;
    double fraction_optimal = 0.0;
    double oracle_energy = 0.0;
};

/// Samples random feasible points, rounds each with BCD and checks the
/// rounded energy against both the continuous energy and the exhaustive
/// minimum.
TightnessReport verify_tightness(const MrfModel& model, int trials, std::uint64_t seed,
                                 std::uint64_t cap = kDefaultOracleCap);

enum class SolverKind { Bcd, Pgd, Fw, Admm, Cqp };

std::string to_string(SolverKind k);
SolverKind solver_kind_from_string(const std::string& s);

/// Runs one solver (BCD/PGD/FW start from the unary initialization) and
/// returns its discrete energy minus the exhaustive minimum.
double solver_vs_oracle(const MrfModel& model, SolverKind solver, const SolverConfig& cfg,
                        std::uint64_t cap = kDefaultOracleCap);

}  // namespace mapmrf
