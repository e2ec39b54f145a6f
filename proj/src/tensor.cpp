#include "mapmrf/tensor.hpp"

#include <algorithm>
#include <numeric>

#include "mapmrf/errors.hpp"
#include "mapmrf/threads.hpp"

namespace mapmrf {

namespace {

std::size_t dim_product(const std::vector<int>& dims, int from, int to) {
    std::size_t p = 1;
    for (int d = from; d < to; ++d) p *= static_cast<std::size_t>(dims[d]);
    return p;
}

}  // namespace

PotentialTensor mode_product(const PotentialTensor& f, std::span<const double> v, int mode) {
    if (mode < 0 || mode >= f.rank()) {
        throw DimensionMismatch("mode index out of range");
    }
    if (v.size() != static_cast<std::size_t>(f.dims[mode])) {
        throw DimensionMismatch("vector length differs from the mode size");
    }
    const std::size_t outer = dim_product(f.dims, 0, mode);
    const std::size_t len = static_cast<std::size_t>(f.dims[mode]);
    const std::size_t inner = dim_product(f.dims, mode + 1, f.rank());

    PotentialTensor result;
    result.dims.reserve(f.dims.size() - 1);
    for (int d = 0; d < f.rank(); ++d) {
        if (d != mode) result.dims.push_back(f.dims[d]);
    }
    result.values.assign(outer * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t k = 0; k < len; ++k) {
            const double w = v[k];
            const double* src = f.values.data() + (o * len + k) * inner;
            double* dst = result.values.data() + o * inner;
            for (std::size_t in = 0; in < inner; ++in) dst[in] += src[in] * w;
        }
    }
    return result;
}

PotentialTensor multi_product(const PotentialTensor& f,
                              const std::vector<std::span<const double>>& vectors,
                              const std::vector<int>& modes) {
    if (vectors.size() != modes.size()) {
        throw DimensionMismatch("vector and mode lists differ in length");
    }
    std::vector<std::size_t> order(modes.size());
    std::iota(order.begin(), order.end(), 0);
    // Contract the highest mode first so that remaining original-mode indices
    // stay valid (and row-major strides shrink monotonically).
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return modes[a] > modes[b]; });
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        if (modes[order[k]] == modes[order[k + 1]]) {
            throw RepeatedMode("mode " + std::to_string(modes[order[k]]) + " repeats");
        }
    }
    PotentialTensor result = f;
    for (std::size_t k : order) {
        result = mode_product(result, vectors[k], modes[k]);
    }
    return result;
}

double contract_full(const PotentialTensor& f,
                     const std::vector<std::span<const double>>& vectors) {
    const int rank = f.rank();
    if (vectors.size() != static_cast<std::size_t>(rank)) {
        throw DimensionMismatch("need one vector per mode");
    }
    for (int d = 0; d < rank; ++d) {
        if (vectors[d].size() != static_cast<std::size_t>(f.dims[d])) {
            throw DimensionMismatch("vector length differs from the mode size");
        }
    }
    if (rank == 0) return f.scalar();
    std::vector<int> idx(static_cast<std::size_t>(rank), 0);
    double acc = 0.0;
    const std::size_t size = f.size();
    for (std::size_t flat = 0; flat < size; ++flat) {
        double term = f.values[flat];
        for (int d = 0; d < rank; ++d) term *= vectors[d][static_cast<std::size_t>(idx[d])];
        acc += term;
        for (int d = rank - 1; d >= 0; --d) {
            if (++idx[d] < f.dims[d]) break;
            idx[d] = 0;
        }
    }
    return acc;
}

std::vector<double> contract_except(const PotentialTensor& f,
                                    const std::vector<std::span<const double>>& vectors,
                                    int keep) {
    const int rank = f.rank();
    if (keep < 0 || keep >= rank) throw DimensionMismatch("kept mode out of range");
    if (vectors.size() != static_cast<std::size_t>(rank)) {
        throw DimensionMismatch("need one vector per mode");
    }
    for (int d = 0; d < rank; ++d) {
        if (d != keep && vectors[d].size() != static_cast<std::size_t>(f.dims[d])) {
            throw DimensionMismatch("vector length differs from the mode size");
        }
    }
    std::vector<double> out(static_cast<std::size_t>(f.dims[keep]), 0.0);
    std::vector<int> idx(static_cast<std::size_t>(rank), 0);
    const std::size_t size = f.size();
    for (std::size_t flat = 0; flat < size; ++flat) {
        double term = f.values[flat];
        for (int d = 0; d < rank; ++d) {
            if (d != keep) term *= vectors[d][static_cast<std::size_t>(idx[d])];
        }
        out[static_cast<std::size_t>(idx[keep])] += term;
        for (int d = rank - 1; d >= 0; --d) {
            if (++idx[d] < f.dims[d]) break;
            idx[d] = 0;
        }
    }
    return out;
}

PositionIndex build_position_index(const MrfModel& model) {
    PositionIndex index;
    const std::size_t n = static_cast<std::size_t>(model.num_nodes);
    index.max_positions = model.degree();
    index.by_node_position.assign(
        n, std::vector<std::vector<int>>(static_cast<std::size_t>(index.max_positions)));
    index.cliques_of_node.assign(n, {});
    std::vector<std::vector<int>> neighbor_lists(n);
    for (std::size_t c = 0; c < model.cliques.size(); ++c) {
        const Clique& clique = model.cliques[c];
        for (int p = 0; p < clique.arity(); ++p) {
            const std::size_t node = static_cast<std::size_t>(clique.nodes[p]);
            index.by_node_position[node][static_cast<std::size_t>(p)].push_back(
                static_cast<int>(c));
            index.cliques_of_node[node].emplace_back(static_cast<int>(c), p);
            for (int q = 0; q < clique.arity(); ++q) {
                if (q != p) neighbor_lists[node].push_back(clique.nodes[q]);
            }
        }
    }
    index.neighbors.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& list = neighbor_lists[i];
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        index.neighbors[i] = std::move(list);
    }
    return index;
}

namespace {

void gather_blocks(const Clique& clique, const ContinuousAssignment& x,
                   std::vector<std::span<const double>>& factors) {
    factors.clear();
    for (int node : clique.nodes) factors.push_back(x.block(static_cast<std::size_t>(node)));
}

}  // namespace

std::vector<double> node_coefficient(const MrfModel& model, const PositionIndex& index,
                                     const ContinuousAssignment& x, int node) {
    std::vector<double> coeff(
        static_cast<std::size_t>(model.label_counts[static_cast<std::size_t>(node)]), 0.0);
    std::vector<std::span<const double>> factors;
    for (const auto& [c, pos] : index.cliques_of_node[static_cast<std::size_t>(node)]) {
        const Clique& clique = model.cliques[static_cast<std::size_t>(c)];
        gather_blocks(clique, x, factors);
        const std::vector<double> part = contract_except(clique.potential, factors, pos);
        for (std::size_t s = 0; s < coeff.size(); ++s) coeff[s] += part[s];
    }
    return coeff;
}

std::vector<double> node_coefficient(const MrfModel& model, const ContinuousAssignment& x,
                                     int node) {
    return node_coefficient(model, build_position_index(model), x, node);
}

GradientVector energy_gradient(const MrfModel& model, const PositionIndex& index,
                               const ContinuousAssignment& x) {
    GradientVector grad(model);
    parallel_for(static_cast<std::size_t>(model.num_nodes), [&](std::size_t i) {
        const std::vector<double> c = node_coefficient(model, index, x, static_cast<int>(i));
        auto block = grad.block(i);
        std::copy(c.begin(), c.end(), block.begin());
    });
    return grad;
}

GradientVector energy_gradient(const MrfModel& model, const ContinuousAssignment& x) {
    return energy_gradient(model, build_position_index(model), x);
}

std::vector<double> decomposed_coefficient(const MrfModel& model, const PositionIndex& index,
                                           const std::vector<ContinuousAssignment>& xs,
                                           int degree, int node) {
    std::vector<double> coeff(
        static_cast<std::size_t>(model.label_counts[static_cast<std::size_t>(node)]), 0.0);
    if (degree >= index.max_positions) return coeff;
    std::vector<std::span<const double>> factors;
    for (int c : index.by_node_position[static_cast<std::size_t>(node)]
                                       [static_cast<std::size_t>(degree)]) {
        const Clique& clique = model.cliques[static_cast<std::size_t>(c)];
        factors.clear();
        for (int p = 0; p < clique.arity(); ++p) {
            factors.push_back(xs[static_cast<std::size_t>(p)].block(
                static_cast<std::size_t>(clique.nodes[p])));
        }
        const std::vector<double> part = contract_except(clique.potential, factors, degree);
        for (std::size_t s = 0; s < coeff.size(); ++s) coeff[s] += part[s];
    }
    return coeff;
}

std::vector<double> decomposed_coefficient(const MrfModel& model,
                                           const std::vector<ContinuousAssignment>& xs,
                                           int degree, int node) {
    return decomposed_coefficient(model, build_position_index(model), xs, degree, node);
}

NodeCoefficientCache::NodeCoefficientCache(const MrfModel& model, const PositionIndex& index)
    : model_(model), index_(index), values_(model),
      dirty_(static_cast<std::size_t>(model.num_nodes), 1) {}

std::span<const double> NodeCoefficientCache::get(const ContinuousAssignment& x, int node) {
    const std::size_t i = static_cast<std::size_t>(node);
    if (dirty_[i]) {
        const std::vector<double> c = node_coefficient(model_, index_, x, node);
        auto block = values_.block(i);
        std::copy(c.begin(), c.end(), block.begin());
        dirty_[i] = 0;
    }
    return values_.block(i);
}

void NodeCoefficientCache::invalidate_neighbors_of(int changed_node) {
    for (int i : index_.neighbors[static_cast<std::size_t>(changed_node)]) {
        dirty_[static_cast<std::size_t>(i)] = 1;
    }
}

void NodeCoefficientCache::invalidate_all() {
    std::fill(dirty_.begin(), dirty_.end(), 1);
}

DecomposedCoefficientCache::DecomposedCoefficientCache(const MrfModel& model,
                                                       const PositionIndex& index)
    : model_(model), index_(index) {
    const std::size_t degrees = static_cast<std::size_t>(index.max_positions);
    values_.assign(degrees, BlockVector(model));
    dirty_.assign(degrees,
                  std::vector<char>(static_cast<std::size_t>(model.num_nodes), 1));
}

void DecomposedCoefficientCache::refresh(const std::vector<ContinuousAssignment>& xs,
                                         int degree) {
    const std::size_t d = static_cast<std::size_t>(degree);
    parallel_for(static_cast<std::size_t>(model_.num_nodes), [&](std::size_t i) {
        if (!dirty_[d][i]) return;
        const std::vector<double> p =
            decomposed_coefficient(model_, index_, xs, degree, static_cast<int>(i));
        auto block = values_[d].block(i);
        std::copy(p.begin(), p.end(), block.begin());
        dirty_[d][i] = 0;
    });
}

void DecomposedCoefficientCache::note_block_change(int degree, int node) {
    if (degree >= index_.max_positions) return;
    for (int c : index_.by_node_position[static_cast<std::size_t>(node)]
                                        [static_cast<std::size_t>(degree)]) {
        const Clique& clique = model_.cliques[static_cast<std::size_t>(c)];
        for (int p = 0; p < clique.arity(); ++p) {
            if (p == degree) continue;
            dirty_[static_cast<std::size_t>(p)]
                  [static_cast<std::size_t>(clique.nodes[p])] = 1;
        }
    }
}

void DecomposedCoefficientCache::mark_all_dirty() {
    for (auto& flags : dirty_) std::fill(flags.begin(), flags.end(), 1);
}

}  // namespace mapmrf
