#include "mapmrf/projection.hpp"

#include <algorithm>

namespace mapmrf {

std::size_t argmin_index(std::span<const double> c) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
        if (c[i] < c[best]) best = i;
    }
    return best;
}

std::vector<double> argmin_vertex(std::span<const double> c) {
    std::vector<double> out(c.size(), 0.0);
    out[argmin_index(c)] = 1.0;
    return out;
}

void project_simplex(std::span<const double> v, std::span<double> out) {
    // Sorted threshold method: tau is the unique value with
    // sum(max(v - tau, 0)) = 1.
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double running = 0.0;
    double tau = sorted[0] - 1.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        running += sorted[k];
        const double candidate = (running - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - candidate > 0.0) {
            tau = candidate;
        } else {
            break;
        }
    }
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
}

std::vector<double> project_simplex(std::span<const double> v) {
    std::vector<double> out(v.size());
    project_simplex(v, out);
    return out;
}

void project_nonneg(std::span<const double> v, std::span<double> out) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], 0.0);
}

std::vector<double> project_nonneg(std::span<const double> v) {
    std::vector<double> out(v.size());
    project_nonneg(v, out);
    return out;
}

}  // namespace mapmrf
