#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mapmrf {

/// Index of the smallest entry; ties resolve to the lowest index.
std::size_t argmin_index(std::span<const double> c);

/// One-hot vector at argmin_index(c).
std::vector<double> argmin_vertex(std::span<const double> c);

/// Euclidean projection onto the probability simplex
/// {u | sum(u) = 1, u >= 0}, via the sorted threshold method.
std::vector<double> project_simplex(std::span<const double> v);

/// In-place variant writing into out (same length as v).
void project_simplex(std::span<const double> v, std::span<double> out);

/// Elementwise max(v, 0).
std::vector<double> project_nonneg(std::span<const double> v);

void project_nonneg(std::span<const double> v, std::span<double> out);

}  // namespace mapmrf
