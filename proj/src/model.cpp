#include "mapmrf/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mapmrf/errors.hpp"
#include "mapmrf/rng.hpp"
#include "mapmrf/tensor.hpp"

namespace mapmrf {

double PotentialTensor::at(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (int d = 0; d < rank(); ++d) {
        flat = flat * static_cast<std::size_t>(dims[d]) + static_cast<std::size_t>(idx[d]);
    }
    return values[flat];
}

int MrfModel::degree() const {
    int d = 1;
    for (const Clique& c : cliques) d = std::max(d, c.arity());
    return d;
}

BlockVector::BlockVector(const MrfModel& model, double fill) {
    offsets_.resize(static_cast<std::size_t>(model.num_nodes) + 1, 0);
    for (int i = 0; i < model.num_nodes; ++i) {
        offsets_[static_cast<std::size_t>(i) + 1] =
            offsets_[i] + static_cast<std::size_t>(model.label_counts[i]);
    }
    data_.assign(offsets_.back(), fill);
}

BlockVector::BlockVector(const std::vector<int>& block_sizes, double fill) {
    offsets_.resize(block_sizes.size() + 1, 0);
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
        offsets_[i + 1] = offsets_[i] + static_cast<std::size_t>(block_sizes[i]);
    }
    data_.assign(offsets_.back(), fill);
}

std::optional<ValidationError> validate(const MrfModel& model, std::size_t tensor_entry_cap) {
    if (model.num_nodes < 0 ||
        model.label_counts.size() != static_cast<std::size_t>(model.num_nodes)) {
        return ValidationError{ValidationIssue::DimensionMismatch,
                               "label_counts length does not match num_nodes"};
    }
    for (int i = 0; i < model.num_nodes; ++i) {
        if (model.label_counts[i] < 1) {
            return ValidationError{ValidationIssue::DimensionMismatch,
                                   "node " + std::to_string(i) + " has no labels"};
        }
    }
    for (std::size_t c = 0; c < model.cliques.size(); ++c) {
        const Clique& clique = model.cliques[c];
        const std::string tag = "clique " + std::to_string(c);
        if (clique.arity() < 1) {
            return ValidationError{ValidationIssue::DimensionMismatch, tag + " is empty"};
        }
        for (int node : clique.nodes) {
            if (node < 0 || node >= model.num_nodes) {
                return ValidationError{ValidationIssue::NodeIndexOutOfRange,
                                       tag + " references node " + std::to_string(node)};
            }
        }
        std::vector<int> sorted = clique.nodes;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            return ValidationError{ValidationIssue::DuplicateNodeInClique,
                                   tag + " repeats a node"};
        }
        if (clique.potential.rank() != clique.arity()) {
            return ValidationError{ValidationIssue::DimensionMismatch,
                                   tag + " tensor rank differs from arity"};
        }
        std::size_t expected = 1;
        for (int p = 0; p < clique.arity(); ++p) {
            if (clique.potential.dims[p] != model.label_counts[clique.nodes[p]]) {
                return ValidationError{ValidationIssue::DimensionMismatch,
                                       tag + " mode " + std::to_string(p) +
                                           " size differs from the node's label count"};
            }
            expected *= static_cast<std::size_t>(clique.potential.dims[p]);
        }
        if (expected > tensor_entry_cap) {
            return ValidationError{ValidationIssue::TensorTooLarge,
                                   tag + " exceeds the dense tensor entry cap"};
        }
        if (clique.potential.values.size() != expected) {
            return ValidationError{ValidationIssue::DimensionMismatch,
                                   tag + " value count differs from the dim product"};
        }
        for (double v : clique.potential.values) {
            if (!std::isfinite(v)) {
                return ValidationError{ValidationIssue::NonFiniteValue,
                                       tag + " holds a non-finite value"};
            }
        }
    }
    return std::nullopt;
}

void validate_or_throw(const MrfModel& model, std::size_t tensor_entry_cap) {
    if (auto err = validate(model, tensor_entry_cap)) {
        throw Error("invalid model: " + err->message);
    }
}

NormalizedModel normalize_potentials(const MrfModel& model) {
    double max_abs = 0.0;
    for (const Clique& c : model.cliques) {
        for (double v : c.potential.values) max_abs = std::max(max_abs, std::fabs(v));
    }
    NormalizedModel out;
    out.model = model;
    if (max_abs == 0.0) {
        out.all_zero = true;
        return out;
    }
    out.scale = max_abs;
    for (Clique& c : out.model.cliques) {
        for (double& v : c.potential.values) v /= max_abs;
    }
    return out;
}

double energy_discrete(const MrfModel& model, const DiscreteLabeling& labeling) {
    double energy = 0.0;
    std::vector<int> idx;
    for (const Clique& c : model.cliques) {
        idx.resize(c.nodes.size());
        for (std::size_t p = 0; p < c.nodes.size(); ++p) idx[p] = labeling[c.nodes[p]];
        energy += c.potential.at(idx);
    }
    return energy;
}

double energy_continuous(const MrfModel& model, const ContinuousAssignment& x) {
    if (x.num_blocks() != static_cast<std::size_t>(model.num_nodes)) {
        throw DimensionMismatch("assignment block count differs from num_nodes");
    }
    double energy = 0.0;
    std::vector<std::span<const double>> factors;
    for (const Clique& c : model.cliques) {
        factors.clear();
        for (int node : c.nodes) {
            auto block = x.block(static_cast<std::size_t>(node));
            if (block.size() != static_cast<std::size_t>(model.label_counts[node])) {
                throw DimensionMismatch("assignment block size differs from label count");
            }
            factors.push_back(block);
        }
        energy += contract_full(c.potential, factors);
    }
    return energy;
}

ContinuousAssignment one_hot(const MrfModel& model, const DiscreteLabeling& labeling) {
    ContinuousAssignment x(model);
    for (int i = 0; i < model.num_nodes; ++i) {
        x.block(static_cast<std::size_t>(i))[static_cast<std::size_t>(labeling[i])] = 1.0;
    }
    return x;
}

bool is_feasible(const ContinuousAssignment& x, double sum_tol, double neg_tol) {
    for (std::size_t i = 0; i < x.num_blocks(); ++i) {
        auto block = x.block(i);
        double sum = 0.0;
        for (double v : block) {
            if (v < -neg_tol || !std::isfinite(v)) return false;
            sum += v;
        }
        if (std::fabs(sum - 1.0) > sum_tol) return false;
    }
    return true;
}

bool is_nonnegative(const ContinuousAssignment& x, double neg_tol) {
    for (double v : x.flat()) {
        if (v < -neg_tol || !std::isfinite(v)) return false;
    }
    return true;
}

ContinuousAssignment init_homogeneous(const MrfModel& model) {
    ContinuousAssignment x(model);
    for (int i = 0; i < model.num_nodes; ++i) {
        auto block = x.block(static_cast<std::size_t>(i));
        const double v = 1.0 / static_cast<double>(block.size());
        std::fill(block.begin(), block.end(), v);
    }
    return x;
}

ContinuousAssignment init_unary(const MrfModel& model) {
    BlockVector unary_sums(model, 0.0);
    for (const Clique& c : model.cliques) {
        if (c.arity() != 1) continue;
        auto block = unary_sums.block(static_cast<std::size_t>(c.nodes[0]));
        for (std::size_t s = 0; s < block.size(); ++s) block[s] += c.potential.values[s];
    }
    ContinuousAssignment x(model);
    for (int i = 0; i < model.num_nodes; ++i) {
        auto sums = unary_sums.block(static_cast<std::size_t>(i));
        std::size_t best = 0;
        for (std::size_t s = 1; s < sums.size(); ++s) {
            if (sums[s] < sums[best]) best = s;
        }
        x.block(static_cast<std::size_t>(i))[best] = 1.0;
    }
    return x;
}

ContinuousAssignment init_random(const MrfModel& model, std::uint64_t seed) {
    Rng rng(seed);
    ContinuousAssignment x(model);
    for (int i = 0; i < model.num_nodes; ++i) {
        auto block = x.block(static_cast<std::size_t>(i));
        double sum = 0.0;
        for (double& v : block) {
            v = rng.exponential();
            sum += v;
        }
        for (double& v : block) v /= sum;
    }
    return x;
}

}  // namespace mapmrf
