#include "frechet/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "frechet/error.hpp"
#include "frechet/parallel.hpp"
#include "frechet/random.hpp"

namespace frechet {

namespace {

void validate(const TrainingData& td, const ForestParams& params, std::span<const std::size_t> obs) {
    const std::size_t p = td.data.p();
    if (params.trees < 1) throw Error(ErrorCode::InvalidParams, "tree count must be >= 1");
    if (params.mtry < 1 || params.mtry > p) {
        throw Error(ErrorCode::InvalidParams, "mtry must lie in [1, " + std::to_string(p) + "]");
    }
    if (params.min_node_size < 1) throw Error(ErrorCode::InvalidParams, "min_node_size must be >= 1");
    if (obs.empty()) throw Error(ErrorCode::InvalidParams, "no training observations");
    for (auto o : obs) {
        if (o >= td.data.n()) throw Error(ErrorCode::InvalidParams, "observation index out of range");
    }
    if (params.prune_mode == PruneMode::Cv && (params.folds < 2 || params.folds > obs.size())) {
        throw Error(ErrorCode::InvalidParams, "folds must lie in [2, n]");
    }
}

std::vector<std::vector<bool>> bag_membership(const Forest& forest, std::size_t n) {
    std::vector<std::vector<bool>> in_bag(forest.bags.size(), std::vector<bool>(n, false));
    for (std::size_t l = 0; l < forest.bags.size(); ++l) {
        for (auto o : forest.bags[l]) in_bag[l][o] = true;
    }
    return in_bag;
}

std::size_t medoid_prediction(const DatasetMetrics& metrics, std::span<const std::size_t> predicted) {
    const MetricItems items(metrics.output, predicted);
    return predicted[frechet_medoid(items)];
}

}  // namespace

Forest train_forest(const TrainingData& td, const ForestParams& params, std::span<const std::size_t> obs,
                    std::size_t workers) {
    validate(td, params, obs);
    Forest forest;
    forest.params = params;
    forest.training_obs.assign(obs.begin(), obs.end());
    forest.trees.resize(params.trees);
    forest.bags.resize(params.trees);

    GrowParams grow;
    grow.mtry = params.mtry;
    grow.min_node_size = params.min_node_size;
    grow.purity_epsilon = params.purity_epsilon;

    parallel_for(params.trees, workers, [&](std::size_t l) {
        auto rng = derive_stream(params.seed, StreamDomain::Tree, {l});
        std::vector<std::size_t> bag(obs.size());
        for (auto& b : bag) b = obs[static_cast<std::size_t>(uniform_index(rng, obs.size()))];
        Tree tree = grow_maximal_tree(td, bag, grow, rng);
        if (params.prune_mode != PruneMode::None) {
            auto sequence = cost_complexity_sequence(tree);
            SelectOptions select;
            select.mode = params.prune_mode == PruneMode::Cv ? SelectMode::Cv : SelectMode::Hubert;
            select.folds = params.folds;
            select.grow = grow;
            tree = select_subtree(td, bag, sequence, select, rng).tree;
        }
        forest.trees[l] = std::move(tree);
        forest.bags[l] = std::move(bag);
    });
    return forest;
}

Forest train_forest(const TrainingData& td, const ForestParams& params, std::size_t workers) {
    const auto all = iota_positions(td.data.n());
    return train_forest(td, params, all, workers);
}

Curve predict_forest(const Forest& forest, const Observation& x) {
    if (forest.trees.empty()) throw Error(ErrorCode::InvalidParams, "forest has no trees");
    std::vector<const Curve*> preds;
    preds.reserve(forest.trees.size());
    for (const auto& tree : forest.trees) preds.push_back(&predict_tree(tree, x));
    const FunctionItems items(preds.size(), [&](std::size_t a, std::size_t b) {
        if (a == b || *preds[a] == *preds[b]) return 0.0;
        return discrete_frechet(*preds[a], *preds[b]);
    });
    return *preds[frechet_medoid(items)];
}

std::size_t predict_forest_cached(const Forest& forest, const DatasetMetrics& metrics, std::size_t obs) {
    if (forest.trees.empty()) throw Error(ErrorCode::InvalidParams, "forest has no trees");
    std::vector<std::size_t> predicted;
    predicted.reserve(forest.trees.size());
    for (const auto& tree : forest.trees) {
        const auto& leaf = tree.node(route_cached(tree, metrics, obs));
        predicted.push_back(static_cast<std::size_t>(leaf.prediction_obs));
    }
    return medoid_prediction(metrics, predicted);
}

std::vector<std::size_t> out_of_bag(const Forest& forest, std::size_t tree) {
    const auto& bag = forest.bags.at(tree);
    std::vector<std::size_t> sorted_bag(bag);
    std::sort(sorted_bag.begin(), sorted_bag.end());
    std::vector<std::size_t> oob;
    for (auto o : forest.training_obs) {
        if (!std::binary_search(sorted_bag.begin(), sorted_bag.end(), o)) oob.push_back(o);
    }
    return oob;
}

OobResult oob_error(const Forest& forest, const TrainingData& td, std::size_t tree_limit) {
    const std::size_t q = tree_limit == 0 ? forest.trees.size() : std::min(tree_limit, forest.trees.size());
    const auto in_bag = bag_membership(forest, td.data.n());

    OobResult result;
    double total = 0.0;
    std::vector<std::size_t> predicted;
    for (auto i : forest.training_obs) {
        predicted.clear();
        for (std::size_t l = 0; l < q; ++l) {
            if (in_bag[l][i]) continue;
            const auto& leaf = forest.trees[l].node(route_cached(forest.trees[l], td.metrics, i));
            predicted.push_back(static_cast<std::size_t>(leaf.prediction_obs));
        }
        if (predicted.empty()) {
            ++result.excluded;
            continue;
        }
        const double d = td.metrics.output(medoid_prediction(td.metrics, predicted), i);
        total += d * d;
        ++result.covered;
    }
    if (result.covered == 0) throw Error(ErrorCode::NoOOBCoverage, "no observation has an out-of-bag tree");
    result.error = total / static_cast<double>(result.covered);
    return result;
}

ImportanceReport variable_importance(const Forest& forest, const TrainingData& td, std::uint64_t permutation_seed,
                                     std::size_t workers) {
    const std::size_t q = forest.trees.size();
    const std::size_t p = td.data.p();
    std::vector<std::vector<double>> diffs(q);
    std::vector<double> base(q, std::numeric_limits<double>::quiet_NaN());

    parallel_for(q, workers, [&](std::size_t l) {
        const auto& tree = forest.trees[l];
        const auto oob = out_of_bag(forest, l);
        if (oob.empty()) return;

        auto tree_error = [&](std::optional<std::size_t> var, std::span<const std::size_t> sources) {
            double total = 0.0;
            for (std::size_t k = 0; k < oob.size(); ++k) {
                const auto& leaf = tree.node(route_cached(tree, td.metrics, oob[k], var, sources[k]));
                const double d = td.metrics.output(static_cast<std::size_t>(leaf.prediction_obs), oob[k]);
                total += d * d;
            }
            return total / static_cast<double>(oob.size());
        };

        base[l] = tree_error(std::nullopt, oob);
        std::vector<double> row(p, 0.0);
        const auto used = tree.used_variables();
        for (auto j : used) {
            auto rng = derive_stream(permutation_seed, StreamDomain::Permutation, {l, j});
            auto permuted = oob;
            shuffle(permuted, rng);
            row[j] = tree_error(j, permuted) - base[l];
        }
        diffs[l] = std::move(row);
    });

    ImportanceReport report;
    report.importance.assign(p, 0.0);
    report.tree_oob_errors = base;
    std::size_t counted = 0;
    for (std::size_t l = 0; l < q; ++l) {
        if (diffs[l].empty()) {
            ++report.skipped_trees;
            continue;
        }
        ++counted;
        for (std::size_t j = 0; j < p; ++j) report.importance[j] += diffs[l][j];
    }
    if (counted > 0) {
        for (auto& v : report.importance) v /= static_cast<double>(counted);
    }
    return report;
}

}  // namespace frechet
