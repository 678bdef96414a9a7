#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "frechet/curve.hpp"
#include "frechet/dataset.hpp"
#include "frechet/metric_core.hpp"
#include "frechet/random.hpp"

namespace frechet {

inline constexpr double default_purity_epsilon = 1e-12;

// A scored two-means split of one node along one input variable.
struct SplitCandidate {
    std::size_t variable = 0;
    // Over the node's observations, in node order.
    SplitAssignment split;
    // Dataset indices routed to each child.
    std::vector<std::size_t> left_obs;
    std::vector<std::size_t> right_obs;
    double parent_variance = 0.0;
    double left_variance = 0.0;
    double right_variance = 0.0;
    // (parent_variance - left_variance - right_variance) / node size.
    double gain = 0.0;
};

struct TreeNode {
    // Split part; variable < 0 marks a leaf.
    std::int64_t variable = -1;
    std::int64_t left = -1;
    std::int64_t right = -1;
    Curve center_left;
    Curve center_right;
    // Dataset indices of the center curves, or -1 when the tree was built
    // without access to the training set.
    std::int64_t center_left_obs = -1;
    std::int64_t center_right_obs = -1;
    double gain = 0.0;

    // Present on every node so that any node can be turned into a leaf.
    std::vector<std::size_t> obs;
    Curve prediction;
    std::int64_t prediction_obs = -1;
    double variance = 0.0;

    bool is_leaf() const noexcept { return variable < 0; }
    bool operator==(const TreeNode&) const = default;
};

// Binary tree stored in preorder; node 0 is the root and every child index
// is larger than its parent's.
class Tree {
public:
    Tree() = default;
    explicit Tree(std::vector<TreeNode> nodes);

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    const TreeNode& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t size() const noexcept { return nodes_.size(); }

    std::size_t leaf_count() const;
    std::vector<std::size_t> leaves() const;
    std::set<std::size_t> used_variables() const;

    // Sum of V_t over leaves.
    double leaf_cost() const;

    // Copy in which every reachable node flagged in `make_leaf` is a leaf and
    // its descendants are dropped; the result is re-indexed in preorder.
    Tree collapse(const std::vector<bool>& make_leaf) const;

    bool operator==(const Tree&) const = default;

private:
    std::vector<TreeNode> nodes_;
};

struct GrowParams {
    std::size_t mtry = 1;
    std::size_t min_node_size = 1;
    double purity_epsilon = default_purity_epsilon;
    std::size_t two_means_iterations = default_two_means_iterations;
};

// Splits node_obs along `variable` with two-means and scores the result by
// the decrease in medoid Frechet variance of the outputs.
// Throws NodeTooSmall for fewer than 2 observations and UnsplittableVariable
// when the variable's curves coincide on the node.
SplitCandidate evaluate_split(const TrainingData& td, std::span<const std::size_t> node_obs, std::size_t variable,
                              std::size_t two_means_iterations = default_two_means_iterations);

// Highest-gain split among the candidate variables (ties -> smaller index).
// Splits with negative gain are not eligible. Throws NoValidSplit when no
// candidate qualifies.
SplitCandidate best_split(const TrainingData& td, std::span<const std::size_t> node_obs,
                          std::span<const std::size_t> candidate_vars,
                          std::size_t two_means_iterations = default_two_means_iterations);

// Grows until each node is pure, too small (< 2 * min_node_size), or has no
// valid split. mtry variables are redrawn at every node from `rng`.
Tree grow_maximal_tree(const TrainingData& td, std::span<const std::size_t> obs, const GrowParams& params,
                       RngStream& rng);

struct PruneStep {
    Tree subtree;
    double alpha = 0.0;
    std::size_t leaf_count = 0;
    double cost = 0.0;
    std::optional<double> hubert_gamma;
    std::optional<double> cv_error;
};

// Weakest-link pruning on R(T) = sum of leaf V_t with penalty alpha * |leaves|.
// Starts at `tree` (alpha 0) and ends at the root-only tree.
std::vector<PruneStep> cost_complexity_sequence(const Tree& tree);

// Index into `sequence` of the subtree minimizing R(T) + alpha * |leaves|.
std::size_t step_for_alpha(const std::vector<PruneStep>& sequence, double alpha);

// Normalized Hubert statistic: Pearson correlation over pairs i < j between
// d_Y(Y_i, Y_j) and [label_i != label_j]. `obs` are dataset indices.
// Throws NotApplicable for a single class or a constant pair vector.
double hubert_gamma(const DistanceMatrix& output, std::span<const std::size_t> obs, std::span<const int> labels);

// Partition of a tree's training observations by leaf, as (obs, labels).
std::pair<std::vector<std::size_t>, std::vector<int>> leaf_partition(const Tree& tree);

enum class SelectMode { Cv, Hubert };

struct SelectOptions {
    SelectMode mode = SelectMode::Cv;
    std::size_t folds = 5;
    // Used to regrow the per-fold maximal trees in cv mode.
    GrowParams grow;
};

struct SelectionResult {
    Tree tree;
    std::size_t step = 0;
    // Hubert mode found no applicable subtree and returned the maximal tree.
    bool fallback = false;
};

// Picks one subtree from `sequence` (filling in the cv_error or hubert_gamma
// fields as a side effect). `obs` are the observations the sequence was
// grown from.
SelectionResult select_subtree(const TrainingData& td, std::span<const std::size_t> obs,
                               std::vector<PruneStep>& sequence, const SelectOptions& options, RngStream& rng);

// Maximal tree on obs with every variable as candidate, pruned and selected.
struct FittedTree {
    Tree tree;
    std::vector<PruneStep> sequence;
    SelectionResult selection;
};
FittedTree fit_tree(const TrainingData& td, std::span<const std::size_t> obs, const SelectOptions& options,
                    RngStream& rng);

// Leaf reached by x; ties in center distance route left. Throws
// MissingVariable when x lacks a variable a visited node splits on.
std::size_t route(const Tree& tree, const Observation& x);
const Curve& predict_tree(const Tree& tree, const Observation& x);

// Leaf reached by dataset observation `obs` using cached distances. Optionally
// variable `swapped_var` is read from observation `swapped_source` instead,
// which is how permuted inputs are evaluated.
std::size_t route_cached(const Tree& tree, const DatasetMetrics& metrics, std::size_t obs,
                         std::optional<std::size_t> swapped_var = std::nullopt, std::size_t swapped_source = 0);

// Squared output distance between the tree's prediction for dataset
// observation `obs` and its true output.
double squared_error_cached(const Tree& tree, const DatasetMetrics& metrics, std::size_t obs);

// Smallest gain over internal nodes; +inf for a single leaf.
double min_split_gain(const Tree& tree);

}  // namespace frechet
