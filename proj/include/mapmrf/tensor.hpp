#pragma once

#include <span>
#include <vector>

#include "mapmrf/model.hpp"

namespace mapmrf {

/// Mode-d product: contracts mode d (0-based) of f with v. The result has
/// rank(f) - 1; remaining modes keep their order.
PotentialTensor mode_product(const PotentialTensor& f, std::span<const double> v, int mode);

/// Product of f with several vectors at distinct modes. Mode indices refer to
/// the ORIGINAL tensor; vectors[k] is multiplied at modes[k]. An empty list
/// returns f unchanged; consuming all modes yields a rank-0 tensor.
PotentialTensor multi_product(const PotentialTensor& f,
                              const std::vector<std::span<const double>>& vectors,
                              const std::vector<int>& modes);

/// Full contraction of f with one vector per mode. Returns the scalar
/// directly; at one-hot vectors this equals plain tensor lookup exactly.
double contract_full(const PotentialTensor& f,
                     const std::vector<std::span<const double>>& vectors);

/// Contracts every mode except `keep`; vectors[keep] is ignored. Returns the
/// vector of length dims[keep].
std::vector<double> contract_except(const PotentialTensor& f,
                                    const std::vector<std::span<const double>>& vectors,
                                    int keep);

/// Precomputed clique lookup tables.
struct PositionIndex {
    /// by_node_position[i][p] lists clique ids with node i at position p.
    std::vector<std::vector<std::vector<int>>> by_node_position;
    /// cliques_of_node[i] lists (clique id, position of i) pairs.
    std::vector<std::vector<std::pair<int, int>>> cliques_of_node;
    /// neighbors[i]: nodes (excluding i) sharing at least one clique with i.
    /// A change to node j's block invalidates cached coefficients of exactly
    /// the nodes that list j here.
    std::vector<std::vector<int>> neighbors;

    int max_positions = 0;  // equals the model degree
};

PositionIndex build_position_index(const MrfModel& model);

/// c_i: linear coefficient of E with respect to block i, i.e. the sum over
/// cliques of i of their tensors contracted with every block but x_i.
std::vector<double> node_coefficient(const MrfModel& model, const PositionIndex& index,
                                     const ContinuousAssignment& x, int node);

/// Convenience overload that builds the index on the fly.
std::vector<double> node_coefficient(const MrfModel& model, const ContinuousAssignment& x,
                                     int node);

/// Gradient of E at x; block i equals node_coefficient(model, x, i).
GradientVector energy_gradient(const MrfModel& model, const PositionIndex& index,
                               const ContinuousAssignment& x);

GradientVector energy_gradient(const MrfModel& model, const ContinuousAssignment& x);

/// p_i^d: linear coefficient of the decomposed energy with respect to the
/// d-th copy (0-based) of block i. Sums, over all cliques whose position d
/// holds node i, the tensor contracted with the other positions' copies:
/// position c contributes xs[c]'s block of the node there.
std::vector<double> decomposed_coefficient(const MrfModel& model, const PositionIndex& index,
                                           const std::vector<ContinuousAssignment>& xs,
                                           int degree, int node);

std::vector<double> decomposed_coefficient(const MrfModel& model,
                                           const std::vector<ContinuousAssignment>& xs,
                                           int degree, int node);

/// Cache of the node coefficients c_i with dirty-set invalidation. Entries
/// are recomputed lazily via node_coefficient, so cached and uncached values
/// are identical.
class NodeCoefficientCache {
public:
    NodeCoefficientCache(const MrfModel& model, const PositionIndex& index);

    /// The coefficient for `node` at assignment x; recomputes only if dirty.
    std::span<const double> get(const ContinuousAssignment& x, int node);

    /// Marks the coefficients that depend on `changed_node`'s block dirty.
    void invalidate_neighbors_of(int changed_node);

    void invalidate_all();

private:
    const MrfModel& model_;
    const PositionIndex& index_;
    GradientVector values_;
    std::vector<char> dirty_;
};

/// Cache of the decomposed coefficients p_i^d, one vector per (degree, node),
/// with dirty flags driven by which blocks changed since the last refresh.
class DecomposedCoefficientCache {
public:
    DecomposedCoefficientCache(const MrfModel& model, const PositionIndex& index);

    /// Recomputes the dirty entries of degree d from xs.
    void refresh(const std::vector<ContinuousAssignment>& xs, int degree);

    /// Records that the copy `degree` of node `node` changed: every cached
    /// p_i^e with a clique holding `node` at position `degree` (e != degree)
    /// becomes dirty.
    void note_block_change(int degree, int node);

    void mark_all_dirty();

    std::span<const double> get(int degree, int node) const {
        return values_[degree].block(node);
    }
    bool is_dirty(int degree, int node) const { return dirty_[degree][node] != 0; }

private:
    const MrfModel& model_;
    const PositionIndex& index_;
    std::vector<BlockVector> values_;        // one BlockVector per degree
    std::vector<std::vector<char>> dirty_;   // [degree][node]
};

}  // namespace mapmrf
