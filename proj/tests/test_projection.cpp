#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "mapmrf/projection.hpp"
#include "mapmrf/rng.hpp"

using namespace mapmrf;

namespace {

/// Bisection oracle on the simplex-projection threshold.
std::vector<double> project_simplex_bisection(const std::vector<double>& v) {
    double lo = *std::min_element(v.begin(), v.end()) - 1.0;
    double hi = *std::max_element(v.begin(), v.end());
    const auto mass = [&](double tau) {
        double acc = 0.0;
        for (double x : v) acc += std::max(x - tau, 0.0);
        return acc;
    };
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mass(mid) > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double tau = 0.5 * (lo + hi);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
    return out;
}

}  // namespace

TEST_CASE("argmin_vertex picks the lowest index on ties") {
    CHECK(argmin_vertex(std::vector<double>{0.3, -0.7}) == std::vector<double>{0.0, 1.0});
    CHECK(argmin_vertex(std::vector<double>{1.0, 1.0}) == std::vector<double>{1.0, 0.0});
    CHECK(argmin_vertex(std::vector<double>{5.0}) == std::vector<double>{1.0});
}

TEST_CASE("project_simplex hand cases") {
    const std::vector<double> feasible{0.2, 0.8};
    CHECK(project_simplex(feasible) == feasible);

    // tau = 1 solves the threshold equation.
    const std::vector<double> spiked{2.0, 0.0};
    CHECK(project_simplex(spiked) == std::vector<double>{1.0, 0.0});

    // Bisection on tau gives tau = 0.5.
    const std::vector<double> three{0.5, 0.5, 1.5};
    const std::vector<double> projected = project_simplex(three);
    CHECK(projected[0] == doctest::Approx(0.0));
    CHECK(projected[1] == doctest::Approx(0.0));
    CHECK(projected[2] == doctest::Approx(1.0));
}

TEST_CASE("project_nonneg clips negatives") {
    CHECK(project_nonneg(std::vector<double>{-1.0, 2.0}) == std::vector<double>{0.0, 2.0});
    CHECK(project_nonneg(std::vector<double>{0.0, 0.0}) == std::vector<double>{0.0, 0.0});
    CHECK(project_nonneg(std::vector<double>{-0.3, -0.1, 0.4}) ==
          std::vector<double>{0.0, 0.0, 0.4});
}

TEST_CASE("project_simplex agrees with the bisection oracle") {
    Rng rng(123);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t dim = 1 + rng.below(20);
        std::vector<double> v(dim);
        for (double& x : v) x = rng.uniform(-5.0, 5.0);
        if (trial % 7 == 0) {
            for (double& x : v) x = -std::fabs(x);  // all-negative inputs
        }
        if (trial % 5 == 0 && dim > 1) v[0] = v[dim - 1];  // exact ties
        const std::vector<double> fast = project_simplex(v);
        const std::vector<double> slow = project_simplex_bisection(v);
        double sum = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            CHECK(std::fabs(fast[i] - slow[i]) < 1e-9);
            CHECK(fast[i] >= 0.0);
            sum += fast[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}
