#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "frechet/dataset.hpp"
#include "frechet/tree.hpp"

namespace frechet {

enum class PruneMode { None, Cv, Hubert };

struct ForestParams {
    std::size_t trees = 100;
    std::size_t mtry = 1;
    std::size_t min_node_size = 1;
    std::uint64_t seed = 0;
    PruneMode prune_mode = PruneMode::None;
    std::size_t folds = 5;
    double purity_epsilon = default_purity_epsilon;
};

struct Forest {
    std::vector<Tree> trees;
    // bags[l]: dataset indices drawn with replacement for tree l.
    std::vector<std::vector<std::size_t>> bags;
    // Observations the forest was trained on (bags are drawn from these).
    std::vector<std::size_t> training_obs;
    ForestParams params;
};

// Trains params.trees randomized trees on bootstrap samples of `obs`. Tree l
// uses its own stream derived from (params.seed, l), so the result does not
// depend on `workers`.
Forest train_forest(const TrainingData& td, const ForestParams& params, std::span<const std::size_t> obs,
                    std::size_t workers = 1);
Forest train_forest(const TrainingData& td, const ForestParams& params, std::size_t workers = 1);

// Medoid of the tree predictions under the output distance; ties -> lowest
// tree index.
Curve predict_forest(const Forest& forest, const Observation& x);

// Same, for a dataset observation, using cached distances. Returns the
// dataset index of the predicted output curve.
std::size_t predict_forest_cached(const Forest& forest, const DatasetMetrics& metrics, std::size_t obs);

struct OobResult {
    double error = 0.0;
    // Observations with at least one out-of-bag tree.
    std::size_t covered = 0;
    // Observations in every bag, left out of the average.
    std::size_t excluded = 0;
};

// OOB error using the first `tree_limit` trees (all when 0).
OobResult oob_error(const Forest& forest, const TrainingData& td, std::size_t tree_limit = 0);

struct ImportanceReport {
    std::vector<double> importance;
    // errOOB_l per tree; NaN for trees with an empty OOB set.
    std::vector<double> tree_oob_errors;
    std::size_t skipped_trees = 0;
};

// Permutation importance: mean over trees of the increase in the tree's OOB
// error after shuffling variable j among its OOB observations.
ImportanceReport variable_importance(const Forest& forest, const TrainingData& td, std::uint64_t permutation_seed,
                                     std::size_t workers = 1);

std::vector<std::size_t> out_of_bag(const Forest& forest, std::size_t tree);

}  // namespace frechet
