#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mapmrf {

/// Dense real tensor in row-major order (last mode fastest).
struct PotentialTensor {
    std::vector<int> dims;
    std::vector<double> values;

    PotentialTensor() = default;
    PotentialTensor(std::vector<int> d, std::vector<double> v)
        : dims(std::move(d)), values(std::move(v)) {}

    int rank() const { return static_cast<int>(dims.size()); }
    std::size_t size() const { return values.size(); }

    /// Entry at a full multi-index.
    double at(std::span<const int> idx) const;

    /// A rank-0 tensor holds a single value.
    double scalar() const { return values.at(0); }
};

/// One clique: an ordered node list plus its potential tensor. The position
/// of a node in `nodes` is the tensor mode it is multiplied at.
struct Clique {
    std::vector<int> nodes;
    PotentialTensor potential;

    int arity() const { return static_cast<int>(nodes.size()); }
};

struct MrfModel {
    int num_nodes = 0;
    std::vector<int> label_counts;
    std::vector<Clique> cliques;

    /// Maximum clique size; at least 1 even for clique-free models.
    int degree() const;
};

/// Per-node block vector sized by the model's label counts. Used for
/// continuous assignments, gradients and multipliers alike.
class BlockVector {
public:
    BlockVector() = default;
    explicit BlockVector(const MrfModel& model, double fill = 0.0);
    explicit BlockVector(const std::vector<int>& block_sizes, double fill = 0.0);

    std::size_t num_blocks() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t block_size(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }

    std::span<double> block(std::size_t i) {
        return {data_.data() + offsets_[i], block_size(i)};
    }
    std::span<const double> block(std::size_t i) const {
        return {data_.data() + offsets_[i], block_size(i)};
    }

    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }
    std::size_t total_size() const { return data_.size(); }

    void fill(double v) { data_.assign(data_.size(), v); }

    bool same_shape(const BlockVector& other) const { return offsets_ == other.offsets_; }

    friend bool operator==(const BlockVector& a, const BlockVector& b) {
        return a.offsets_ == b.offsets_ && a.data_ == b.data_;
    }

private:
    std::vector<double> data_;
    std::vector<std::size_t> offsets_;  // size num_blocks + 1
};

/// One simplex-constrained block per node.
using ContinuousAssignment = BlockVector;

/// Block-structured gradient; block i has the node's label count.
using GradientVector = BlockVector;

/// One label index per node.
using DiscreteLabeling = std::vector<int>;

enum class ValidationIssue {
    DimensionMismatch,
    NodeIndexOutOfRange,
    DuplicateNodeInClique,
    NonFiniteValue,
    TensorTooLarge,
};

struct ValidationError {
    ValidationIssue issue;
    std::string message;
};

/// Largest dense tensor accepted per clique.
inline constexpr std::size_t kDefaultTensorEntryCap = 10'000'000;

/// Checks all model invariants; returns the first violation found.
std::optional<ValidationError> validate(const MrfModel& model,
                                        std::size_t tensor_entry_cap = kDefaultTensorEntryCap);

/// Throwing form of validate() for call sites that require a valid model.
void validate_or_throw(const MrfModel& model,
                       std::size_t tensor_entry_cap = kDefaultTensorEntryCap);

struct NormalizedModel {
    MrfModel model;
    double scale = 1.0;   // original energies = scale * normalized energies
    double offset = 0.0;  // reserved; always 0 for plain rescaling
    bool all_zero = false;
};

/// Divides every potential entry by the global max absolute entry, mapping
/// potentials into [-1, 1]. All-zero models are returned unchanged with the
/// flag set and scale 1.
NormalizedModel normalize_potentials(const MrfModel& model);

/// e(s): sum of clique potential entries selected by the labeling.
double energy_discrete(const MrfModel& model, const DiscreteLabeling& labeling);

/// E(x): the multilinear energy. Feasibility is not required; blocks only
/// need the right sizes.
double energy_continuous(const MrfModel& model, const ContinuousAssignment& x);

/// Indicator encoding of a labeling.
ContinuousAssignment one_hot(const MrfModel& model, const DiscreteLabeling& labeling);

/// True when every block sums to 1 within sum_tol and has entries >= -neg_tol.
bool is_feasible(const ContinuousAssignment& x, double sum_tol = 1e-9,
                 double neg_tol = 1e-12);

bool is_nonnegative(const ContinuousAssignment& x, double neg_tol = 1e-12);

/// x_i(s) = 1/|S_i| for every node and label.
ContinuousAssignment init_homogeneous(const MrfModel& model);

/// One-hot at the argmin of the summed unary potentials of each node; ties
/// and nodes without unary cliques resolve to label 0.
ContinuousAssignment init_unary(const MrfModel& model);

/// Each block drawn uniformly from its simplex (exponential draws,
/// normalized). Deterministic for a given seed.
ContinuousAssignment init_random(const MrfModel& model, std::uint64_t seed);

}  // namespace mapmrf
