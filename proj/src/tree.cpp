#include "frechet/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "frechet/error.hpp"

namespace frechet {

Tree::Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw Error(ErrorCode::InvalidParams, "tree has no nodes");
    const auto n = static_cast<std::int64_t>(nodes_.size());
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& node = nodes_[static_cast<std::size_t>(i)];
        if (node.is_leaf()) continue;
        if (node.left <= i || node.right <= i || node.left >= n || node.right >= n || node.left == node.right) {
            throw Error(ErrorCode::InvalidParams, "malformed child references at node " + std::to_string(i));
        }
    }
}

std::size_t Tree::leaf_count() const { return leaves().size(); }

std::vector<std::size_t> Tree::leaves() const {
    std::vector<std::size_t> out;
    if (nodes_.empty()) return out;
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        const auto& node = nodes_[i];
        if (node.is_leaf()) {
            out.push_back(i);
        } else {
            stack.push_back(static_cast<std::size_t>(node.right));
            stack.push_back(static_cast<std::size_t>(node.left));
        }
    }
    return out;
}

std::set<std::size_t> Tree::used_variables() const {
    std::set<std::size_t> vars;
    for (const auto& node : nodes_) {
        if (!node.is_leaf()) vars.insert(static_cast<std::size_t>(node.variable));
    }
    return vars;
}

double Tree::leaf_cost() const {
    double cost = 0.0;
    for (auto i : leaves()) cost += nodes_[i].variance;
    return cost;
}

Tree Tree::collapse(const std::vector<bool>& make_leaf) const {
    std::vector<TreeNode> out;
    out.reserve(nodes_.size());
    auto copy = [&](auto&& self, std::size_t i) -> std::int64_t {
        const auto idx = static_cast<std::int64_t>(out.size());
        out.push_back(nodes_[i]);
        if (nodes_[i].is_leaf()) return idx;
        if (i < make_leaf.size() && make_leaf[i]) {
            auto& leaf = out.back();
            leaf.variable = -1;
            leaf.left = leaf.right = -1;
            leaf.center_left = Curve();
            leaf.center_right = Curve();
            leaf.center_left_obs = leaf.center_right_obs = -1;
            leaf.gain = 0.0;
            return idx;
        }
        const auto l = self(self, static_cast<std::size_t>(nodes_[i].left));
        const auto r = self(self, static_cast<std::size_t>(nodes_[i].right));
        out[static_cast<std::size_t>(idx)].left = l;
        out[static_cast<std::size_t>(idx)].right = r;
        return idx;
    };
    copy(copy, 0);
    return Tree(std::move(out));
}

namespace {

struct OutputStats {
    std::size_t medoid_obs;
    double variance;
};

OutputStats output_stats(const DatasetMetrics& metrics, std::span<const std::size_t> obs) {
    const MetricItems items(metrics.output, obs);
    const auto all = iota_positions(obs.size());
    const std::span<const std::size_t> positions(all);
    const auto med = medoid_among(items, positions);
    return {obs[med], sum_squared_to(items, positions, med)};
}

// evaluate_split without the exception for degenerate variables, with the
// parent variance supplied by the caller.
std::optional<SplitCandidate> try_split(const TrainingData& td, std::span<const std::size_t> node_obs,
                                        std::size_t variable, double parent_variance, std::size_t iterations) {
    const MetricItems items(td.metrics.inputs.at(variable), node_obs);
    SplitAssignment split;
    try {
        split = two_means_split(items, iterations);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DegenerateSpace) return std::nullopt;
        throw;
    }

    SplitCandidate c;
    c.variable = variable;
    for (std::size_t i = 0; i < node_obs.size(); ++i) {
        (split.labels[i] == Side::Left ? c.left_obs : c.right_obs).push_back(node_obs[i]);
    }
    c.split = std::move(split);
    c.parent_variance = parent_variance;
    c.left_variance = output_stats(td.metrics, c.left_obs).variance;
    c.right_variance = output_stats(td.metrics, c.right_obs).variance;
    c.gain = (c.parent_variance - c.left_variance - c.right_variance) / static_cast<double>(node_obs.size());
    return c;
}

TreeNode make_leaf_node(const TrainingData& td, std::vector<std::size_t> obs) {
    TreeNode node;
    const auto stats = output_stats(td.metrics, obs);
    node.obs = std::move(obs);
    node.prediction_obs = static_cast<std::int64_t>(stats.medoid_obs);
    node.prediction = td.data.outputs[stats.medoid_obs];
    node.variance = stats.variance;
    return node;
}

}  // namespace

SplitCandidate evaluate_split(const TrainingData& td, std::span<const std::size_t> node_obs, std::size_t variable,
                              std::size_t two_means_iterations) {
    if (node_obs.size() < 2) {
        throw Error(ErrorCode::NodeTooSmall, "cannot split a node of size " + std::to_string(node_obs.size()));
    }
    if (variable >= td.data.p()) {
        throw Error(ErrorCode::InvalidParams, "variable index " + std::to_string(variable) + " out of range");
    }
    const double parent = output_stats(td.metrics, node_obs).variance;
    auto c = try_split(td, node_obs, variable, parent, two_means_iterations);
    if (!c) {
        throw Error(ErrorCode::UnsplittableVariable,
                    "variable '" + td.data.variable_names[variable] + "' is constant on this node");
    }
    return std::move(*c);
}

SplitCandidate best_split(const TrainingData& td, std::span<const std::size_t> node_obs,
                          std::span<const std::size_t> candidate_vars, std::size_t two_means_iterations) {
    if (candidate_vars.empty()) throw Error(ErrorCode::InvalidParams, "no candidate variables");
    if (node_obs.size() < 2) {
        throw Error(ErrorCode::NodeTooSmall, "cannot split a node of size " + std::to_string(node_obs.size()));
    }
    const double parent = output_stats(td.metrics, node_obs).variance;
    std::optional<SplitCandidate> best;
    for (auto var : candidate_vars) {
        if (var >= td.data.p()) {
            throw Error(ErrorCode::InvalidParams, "variable index " + std::to_string(var) + " out of range");
        }
        auto c = try_split(td, node_obs, var, parent, two_means_iterations);
        if (!c || c->gain < 0.0) continue;
        if (!best || c->gain > best->gain || (c->gain == best->gain && c->variable < best->variable)) {
            best = std::move(c);
        }
    }
    if (!best) throw Error(ErrorCode::NoValidSplit, "no candidate variable yields a valid split");
    return std::move(*best);
}

Tree grow_maximal_tree(const TrainingData& td, std::span<const std::size_t> obs, const GrowParams& params,
                       RngStream& rng) {
    if (obs.empty()) throw Error(ErrorCode::EmptyInput, "cannot grow a tree on zero observations");
    const std::size_t p = td.data.p();
    if (params.mtry < 1 || params.mtry > p) {
        throw Error(ErrorCode::InvalidParams, "mtry must lie in [1, " + std::to_string(p) + "]");
    }
    if (params.min_node_size < 1) throw Error(ErrorCode::InvalidParams, "min_node_size must be >= 1");

    std::vector<TreeNode> nodes;
    auto grow = [&](auto&& self, std::vector<std::size_t> node_obs) -> std::int64_t {
        const auto idx = static_cast<std::int64_t>(nodes.size());
        nodes.push_back(make_leaf_node(td, std::move(node_obs)));
        const auto& here = nodes.back();
        if (here.variance <= params.purity_epsilon || here.obs.size() < 2 * params.min_node_size) return idx;

        // The node is a leaf only when no variable at all splits it: if the
        // drawn ones fail, the undrawn ones are tried together.
        const auto vars = sample_without_replacement(p, params.mtry, rng);
        std::optional<SplitCandidate> split;
        try {
            split = best_split(td, here.obs, vars, params.two_means_iterations);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoValidSplit) throw;
        }
        if (!split && vars.size() < p) {
            std::vector<std::size_t> rest;
            for (std::size_t j = 0, k = 0; j < p; ++j) {
                if (k < vars.size() && vars[k] == j) {
                    ++k;
                } else {
                    rest.push_back(j);
                }
            }
            try {
                split = best_split(td, here.obs, rest, params.two_means_iterations);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoValidSplit) throw;
            }
        }
        if (!split) return idx;

        {
            auto& node = nodes[static_cast<std::size_t>(idx)];
            const auto& var_curves = td.data.inputs[split->variable];
            const auto cl = node.obs[split->split.center_left];
            const auto cr = node.obs[split->split.center_right];
            node.variable = static_cast<std::int64_t>(split->variable);
            node.center_left = var_curves[cl];
            node.center_right = var_curves[cr];
            node.center_left_obs = static_cast<std::int64_t>(cl);
            node.center_right_obs = static_cast<std::int64_t>(cr);
            node.gain = split->gain;
        }
        const auto l = self(self, std::move(split->left_obs));
        const auto r = self(self, std::move(split->right_obs));
        nodes[static_cast<std::size_t>(idx)].left = l;
        nodes[static_cast<std::size_t>(idx)].right = r;
        return idx;
    };
    grow(grow, std::vector<std::size_t>(obs.begin(), obs.end()));
    return Tree(std::move(nodes));
}

std::vector<PruneStep> cost_complexity_sequence(const Tree& tree) {
    const auto& nodes = tree.nodes();
    const std::size_t n = nodes.size();
    std::vector<bool> collapsed(n, false);

    auto record = [&](double alpha) {
        PruneStep step;
        step.subtree = tree.collapse(collapsed);
        step.alpha = alpha;
        step.leaf_count = step.subtree.leaf_count();
        step.cost = step.subtree.leaf_cost();
        return step;
    };

    std::vector<PruneStep> sequence;
    sequence.push_back(record(0.0));

    std::vector<bool> reachable(n);
    std::vector<double> subtree_cost(n);
    std::vector<std::size_t> subtree_leaves(n);
    double alpha = 0.0;
    for (;;) {
        std::fill(reachable.begin(), reachable.end(), false);
        reachable[0] = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (reachable[i] && !nodes[i].is_leaf() && !collapsed[i]) {
                reachable[static_cast<std::size_t>(nodes[i].left)] = true;
                reachable[static_cast<std::size_t>(nodes[i].right)] = true;
            }
        }
        // Children follow parents in preorder, so a reverse sweep is post-order.
        for (std::size_t k = n; k-- > 0;) {
            if (!reachable[k]) continue;
            if (nodes[k].is_leaf() || collapsed[k]) {
                subtree_cost[k] = nodes[k].variance;
                subtree_leaves[k] = 1;
            } else {
                const auto l = static_cast<std::size_t>(nodes[k].left);
                const auto r = static_cast<std::size_t>(nodes[k].right);
                subtree_cost[k] = subtree_cost[l] + subtree_cost[r];
                subtree_leaves[k] = subtree_leaves[l] + subtree_leaves[r];
            }
        }
        if (subtree_leaves[0] <= 1) break;

        double weakest = std::numeric_limits<double>::infinity();
        std::vector<double> link(n, std::numeric_limits<double>::infinity());
        for (std::size_t k = 0; k < n; ++k) {
            if (!reachable[k] || nodes[k].is_leaf() || collapsed[k]) continue;
            link[k] = (nodes[k].variance - subtree_cost[k]) / static_cast<double>(subtree_leaves[k] - 1);
            weakest = std::min(weakest, link[k]);
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (link[k] == weakest) collapsed[k] = true;
        }
        alpha = std::max(alpha, weakest);
        sequence.push_back(record(alpha));
    }
    return sequence;
}

std::size_t step_for_alpha(const std::vector<PruneStep>& sequence, double alpha) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        if (sequence[i].alpha <= alpha) k = i;
    }
    return k;
}

double hubert_gamma(const DistanceMatrix& output, std::span<const std::size_t> obs, std::span<const int> labels) {
    if (obs.size() != labels.size()) {
        throw Error(ErrorCode::InvalidParams, "hubert_gamma: obs and labels differ in length");
    }
    const std::size_t m = obs.size();
    if (m < 2) throw Error(ErrorCode::NotApplicable, "fewer than two observations");

    double n_pairs = 0.0, sum_d = 0.0, sum_c = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            sum_d += output(obs[i], obs[j]);
            sum_c += labels[i] != labels[j] ? 1.0 : 0.0;
            n_pairs += 1.0;
        }
    }
    const double mean_d = sum_d / n_pairs;
    const double mean_c = sum_c / n_pairs;
    double sdd = 0.0, scc = 0.0, sdc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double dd = output(obs[i], obs[j]) - mean_d;
            const double dc = (labels[i] != labels[j] ? 1.0 : 0.0) - mean_c;
            sdd += dd * dd;
            scc += dc * dc;
            sdc += dd * dc;
        }
    }
    if (sum_c == 0.0) throw Error(ErrorCode::NotApplicable, "partition has a single class");
    if (!(sdd > 0.0) || !(scc > 0.0)) throw Error(ErrorCode::NotApplicable, "constant pair vector");
    return std::clamp(sdc / std::sqrt(sdd * scc), -1.0, 1.0);
}

std::pair<std::vector<std::size_t>, std::vector<int>> leaf_partition(const Tree& tree) {
    std::vector<std::size_t> obs;
    std::vector<int> labels;
    int label = 0;
    for (auto leaf : tree.leaves()) {
        for (auto o : tree.node(leaf).obs) {
            obs.push_back(o);
            labels.push_back(label);
        }
        ++label;
    }
    return {std::move(obs), std::move(labels)};
}

namespace {

SelectionResult select_by_hubert(const TrainingData& td, std::vector<PruneStep>& sequence) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < sequence.size(); ++k) {
        const auto [obs, labels] = leaf_partition(sequence[k].subtree);
        try {
            sequence[k].hubert_gamma = hubert_gamma(td.metrics.output, obs, labels);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotApplicable) throw;
            continue;
        }
        // Later steps have fewer leaves, so >= resolves ties toward them.
        if (!best || *sequence[k].hubert_gamma >= *sequence[*best].hubert_gamma) best = k;
    }
    if (!best) return {sequence.front().subtree, 0, true};
    return {sequence[*best].subtree, *best, false};
}

SelectionResult select_by_cv(const TrainingData& td, std::span<const std::size_t> obs,
                             std::vector<PruneStep>& sequence, const SelectOptions& options, RngStream& rng) {
    const std::size_t m = obs.size();
    if (options.folds < 2 || options.folds > m) {
        throw Error(ErrorCode::InvalidParams, "folds must lie in [2, " + std::to_string(m) + "]");
    }
    auto order = iota_positions(m);
    shuffle(order, rng);
    std::vector<std::size_t> fold_of(m);
    for (std::size_t k = 0; k < m; ++k) fold_of[order[k]] = k % options.folds;

    const std::size_t steps = sequence.size();
    std::vector<double> probe(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        probe[k] = k + 1 < steps ? std::sqrt(sequence[k].alpha * sequence[k + 1].alpha)
                                 : std::numeric_limits<double>::infinity();
    }

    std::vector<double> total(steps, 0.0);
    for (std::size_t v = 0; v < options.folds; ++v) {
        std::vector<std::size_t> train, held_out;
        for (std::size_t i = 0; i < m; ++i) (fold_of[i] == v ? held_out : train).push_back(obs[i]);
        const auto fold_tree = grow_maximal_tree(td, train, options.grow, rng);
        const auto fold_seq = cost_complexity_sequence(fold_tree);
        for (std::size_t k = 0; k < steps; ++k) {
            const auto& pruned = fold_seq[step_for_alpha(fold_seq, probe[k])].subtree;
            for (auto o : held_out) total[k] += squared_error_cached(pruned, td.metrics, o);
        }
    }

    std::size_t best = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        sequence[k].cv_error = total[k] / static_cast<double>(m);
        if (*sequence[k].cv_error <= *sequence[best].cv_error) best = k;
    }
    return {sequence[best].subtree, best, false};
}

}  // namespace

SelectionResult select_subtree(const TrainingData& td, std::span<const std::size_t> obs,
                               std::vector<PruneStep>& sequence, const SelectOptions& options, RngStream& rng) {
    if (sequence.empty()) throw Error(ErrorCode::InvalidParams, "empty prune sequence");
    if (sequence.size() == 1) return {sequence.front().subtree, 0, false};
    return options.mode == SelectMode::Hubert ? select_by_hubert(td, sequence)
                                              : select_by_cv(td, obs, sequence, options, rng);
}

FittedTree fit_tree(const TrainingData& td, std::span<const std::size_t> obs, const SelectOptions& options,
                    RngStream& rng) {
    SelectOptions opts = options;
    opts.grow.mtry = td.data.p();
    FittedTree fitted;
    fitted.tree = grow_maximal_tree(td, obs, opts.grow, rng);
    fitted.sequence = cost_complexity_sequence(fitted.tree);
    fitted.selection = select_subtree(td, obs, fitted.sequence, opts, rng);
    return fitted;
}

std::size_t route(const Tree& tree, const Observation& x) {
    std::size_t i = 0;
    for (;;) {
        const auto& node = tree.node(i);
        if (node.is_leaf()) return i;
        const auto var = static_cast<std::size_t>(node.variable);
        if (var >= x.inputs.size() || !x.inputs[var]) {
            throw Error(ErrorCode::MissingVariable, "observation lacks variable index " + std::to_string(var));
        }
        const auto& curve = *x.inputs[var];
        const double dl = discrete_frechet(curve, node.center_left);
        const double dr = discrete_frechet(curve, node.center_right);
        i = static_cast<std::size_t>(dl <= dr ? node.left : node.right);
    }
}

const Curve& predict_tree(const Tree& tree, const Observation& x) { return tree.node(route(tree, x)).prediction; }

std::size_t route_cached(const Tree& tree, const DatasetMetrics& metrics, std::size_t obs,
                         std::optional<std::size_t> swapped_var, std::size_t swapped_source) {
    std::size_t i = 0;
    for (;;) {
        const auto& node = tree.node(i);
        if (node.is_leaf()) return i;
        if (node.center_left_obs < 0 || node.center_right_obs < 0) {
            throw Error(ErrorCode::Internal, "cached routing needs center observation indices");
        }
        const auto var = static_cast<std::size_t>(node.variable);
        const auto src = (swapped_var && *swapped_var == var) ? swapped_source : obs;
        const auto& dist = metrics.inputs[var];
        const double dl = dist(src, static_cast<std::size_t>(node.center_left_obs));
        const double dr = dist(src, static_cast<std::size_t>(node.center_right_obs));
        i = static_cast<std::size_t>(dl <= dr ? node.left : node.right);
    }
}

double squared_error_cached(const Tree& tree, const DatasetMetrics& metrics, std::size_t obs) {
    const auto& leaf = tree.node(route_cached(tree, metrics, obs));
    if (leaf.prediction_obs < 0) {
        throw Error(ErrorCode::Internal, "cached error needs the leaf's prediction observation index");
    }
    const double d = metrics.output(static_cast<std::size_t>(leaf.prediction_obs), obs);
    return d * d;
}

double min_split_gain(const Tree& tree) {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& node : tree.nodes()) {
        if (!node.is_leaf()) g = std::min(g, node.gain);
    }
    return g;
}

}  // namespace frechet
