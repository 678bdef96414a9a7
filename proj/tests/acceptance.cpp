// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Runs single-threaded unless FRECHET_WORKERS says otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "frechet/benchmark.hpp"
#include "frechet/forest.hpp"
#include "frechet/io.hpp"
#include "frechet/parallel.hpp"
#include "frechet/simgen.hpp"
#include "frechet/tree.hpp"
#include "oracles.hpp"

using namespace frechet;

namespace {

constexpr std::uint64_t scenario1_seed = 2019;
constexpr std::uint64_t scenario2_seed = 2020;
constexpr std::uint64_t benchmark_seed = 1;
constexpr std::uint64_t forest_seed = 7;
constexpr std::uint64_t permutation_seed = 11;

// Reference mean errors for criterion 1 and the relative band around them.
constexpr double reference_tree_error = 1.89;
constexpr double reference_forest_error = 1.49;
constexpr double reference_band = 0.5;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool within(double value, double reference, double band) { return std::abs(value - reference) <= band * reference; }

// Smallest accepted split gain across every tree grown by criteria 1-4.
double global_min_gain = std::numeric_limits<double>::infinity();
void record_gains(const Tree& t) { global_min_gain = std::min(global_min_gain, min_split_gain(t)); }

struct Scenario {
    Dataset data;
    sim::SimTruth truth;
    DatasetMetrics metrics;
    TrainingData td() const { return {data, metrics}; }
};

Scenario make_scenario(std::size_t noise_vars, std::uint64_t seed, std::size_t workers) {
    sim::SimConfig cfg;
    cfg.seed = seed;
    cfg.noise_vars = noise_vars;
    auto [d, t] = sim::simulate_dataset(cfg);
    Scenario s{std::move(d), std::move(t), {}};
    s.metrics = DatasetMetrics::compute(s.data, workers);
    return s;
}

ForestParams scenario1_forest(std::size_t trees) {
    ForestParams p;
    p.trees = trees;
    p.mtry = 1;
    p.seed = forest_seed;
    return p;
}

BenchmarkReport c1_report;

Outcome criterion1(const Scenario& s, std::size_t workers) {
    BenchmarkOptions opt;
    opt.reps = 100;
    opt.test_fraction = 0.2;
    opt.forest = scenario1_forest(200);
    opt.tree.mode = SelectMode::Cv;
    opt.seed = benchmark_seed;
    opt.workers = workers;
    c1_report = run_benchmark(s.td(), opt);
    global_min_gain = std::min(global_min_gain, c1_report.min_split_gain);

    const auto& r = c1_report;
    const bool ordered = r.forest_mean < r.tree_mean;
    const bool wins = r.forest_wins >= 90;
    const bool tree_band = within(r.tree_mean, reference_tree_error, reference_band);
    const bool forest_band = within(r.forest_mean, reference_forest_error, reference_band);
    return {ordered && wins && tree_band && forest_band,
            fmt("tree %.4f (sd %.4f), forest %.4f (sd %.4f), forest wins %zu/100; forest<tree %s, wins>=90 %s, "
                "tree in [%.3f, %.3f] %s, forest in [%.3f, %.3f] %s",
                r.tree_mean, r.tree_sd, r.forest_mean, r.forest_sd, r.forest_wins, ordered ? "yes" : "NO",
                wins ? "yes" : "NO", reference_tree_error * (1 - reference_band),
                reference_tree_error * (1 + reference_band), tree_band ? "yes" : "NO",
                reference_forest_error * (1 - reference_band), reference_forest_error * (1 + reference_band),
                forest_band ? "yes" : "NO")};
}

Outcome criterion2(const Scenario& s, std::size_t workers) {
    const auto& r = c1_report;
    const double fidelity = std::abs(r.full_oob.error - r.forest_mean) / r.forest_mean;

    const auto forest = train_forest(s.td(), scenario1_forest(200), workers);
    for (const auto& t : forest.trees) record_gains(t);
    const auto at100 = oob_error(forest, s.td(), 100);
    const auto at200 = oob_error(forest, s.td(), 200);
    const double drift = std::abs(at200.error - at100.error) / at100.error;

    const bool pass = fidelity <= 0.15 && drift <= 0.05 && r.full_oob.excluded == 0 && at200.excluded == 0;
    return {pass, fmt("full-data OOB %.4f vs forest test mean %.4f (rel. diff %.3f, limit 0.15); OOB(100) %.4f, "
                      "OOB(200) %.4f (rel. diff %.4f, limit 0.05); excluded %zu",
                      r.full_oob.error, r.forest_mean, fidelity, at100.error, at200.error, drift,
                      r.full_oob.excluded + at200.excluded)};
}

Outcome criterion3(const Scenario& s) {
    SelectOptions opt;
    opt.mode = SelectMode::Hubert;
    auto rng = derive_stream(forest_seed, StreamDomain::Tree, {0});
    const auto all = iota_positions(s.data.n());
    const auto fitted = fit_tree(s.td(), all, opt, rng);
    record_gains(fitted.tree);
    const auto& tree = fitted.selection.tree;

    const auto y_grid = sim::uniform_grid(sim::output_t_min, sim::output_t_max, sim::SimConfig{}.y_grid_size);
    std::map<std::pair<int, int>, Curve> shapes;
    for (int a = 1; a <= 2; ++a) {
        for (int b = 1; b <= 2; ++b) shapes.emplace(std::pair{a, b}, sim::sampled_output_shape(a, b, y_grid));
    }

    std::size_t good = 0;
    std::string leaves_text;
    for (auto leaf : tree.leaves()) {
        const auto& node = tree.node(leaf);
        // Generating shape: the most frequent label pair in the leaf.
        std::map<std::pair<int, int>, std::size_t> counts;
        for (auto o : node.obs) ++counts[sim::output_shape_for(s.truth.g1[o], s.truth.g2[o])];
        const auto own = std::max_element(counts.begin(), counts.end(), [](const auto& x, const auto& y) {
                             return x.second < y.second;
                         })->first;
        const double d_own = discrete_frechet(node.prediction, shapes.at(own));
        bool closest = true;
        for (const auto& [key, shape] : shapes) {
            if (key != own && discrete_frechet(node.prediction, shape) <= d_own) closest = false;
        }
        good += closest;
        leaves_text += fmt(" g%d%d(n=%zu,%s)", own.first, own.second, node.obs.size(), closest ? "ok" : "NOT closest");
    }
    const std::size_t n_leaves = tree.leaf_count();
    return {n_leaves == 4 && good == 4,
            fmt("selected subtree has %zu leaves (step %zu of %zu%s); closest to own shape %zu/%zu:", n_leaves,
                fitted.selection.step, fitted.sequence.size(), fitted.selection.fallback ? ", fallback" : "", good,
                n_leaves) +
                leaves_text};
}

Outcome criterion4(std::size_t workers, std::size_t noise_vars, std::size_t trees) {
    const auto s = make_scenario(noise_vars, scenario2_seed, workers);
    ForestParams p;
    p.trees = trees;
    p.mtry = 100;
    p.seed = forest_seed;
    const auto forest = train_forest(s.td(), p, workers);
    for (const auto& t : forest.trees) record_gains(t);
    const auto vi = variable_importance(forest, s.td(), permutation_seed, workers);

    double max_noise = 0.0;
    std::size_t above = 0;
    for (std::size_t j = 2; j < vi.importance.size(); ++j) {
        max_noise = std::max(max_noise, std::abs(vi.importance[j]));
        above += vi.importance[j] >= std::min(vi.importance[0], vi.importance[1]);
    }
    const double structured = std::min(vi.importance[0], vi.importance[1]);
    const bool pass = structured > 10.0 * max_noise && above == 0;
    return {pass, fmt("p=%zu, q=%zu, mtry=100: VI(X1) %.4f, VI(X2) %.4f, max |VI(noise)| %.5f (ratio %.1f, need > 10); "
                      "noise variables ranked above a structured one: %zu",
                      s.data.p(), trees, vi.importance[0], vi.importance[1], max_noise,
                      max_noise > 0 ? structured / max_noise : std::numeric_limits<double>::infinity(), above)};
}

Outcome criterion5() {
    return {global_min_gain >= 0.0, fmt("smallest accepted split gain over all trees of criteria 1-4: %.6g",
                                        global_min_gain)};
}

Outcome criterion6() {
    // Every curve of length 1..6 over {0, 1, 2}.
    std::vector<std::vector<double>> curves;
    for (std::size_t len = 1; len <= 6; ++len) {
        std::size_t total = 1;
        for (std::size_t k = 0; k < len; ++k) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<double> c(len);
            for (std::size_t k = 0, x = code; k < len; ++k, x /= 3) c[k] = static_cast<double>(x % 3);
            curves.push_back(std::move(c));
        }
    }
    oracle::CouplingTable table;
    std::size_t pairs = 0, dp_mismatch = 0;
    for (std::size_t a = 0; a < curves.size(); ++a) {
        for (std::size_t b = 0; b < curves.size(); ++b) {
            ++pairs;
            if (discrete_frechet(curves[a], curves[b]) != oracle::brute_frechet(curves[a], curves[b], table)) {
                ++dp_mismatch;
            }
        }
    }

    std::mt19937_64 rng(6);
    std::size_t medoid_mismatch = 0;
    constexpr std::size_t collections = 1000;
    for (std::size_t c = 0; c < collections; ++c) {
        const std::size_t size = 1 + rng() % 50;
        // Small integer values so that ties are common.
        std::vector<Curve> items;
        for (std::size_t i = 0; i < size; ++i) {
            std::vector<double> v(1 + rng() % 5);
            for (auto& x : v) x = static_cast<double>(rng() % 4);
            items.push_back(Curve::from_values(v));
        }
        std::vector<std::vector<double>> full(size, std::vector<double>(size));
        for (std::size_t i = 0; i < size; ++i) {
            for (std::size_t j = 0; j < size; ++j) full[i][j] = discrete_frechet(items[i], items[j]);
        }
        const auto matrix = DistanceMatrix::build(size, [&](std::size_t i, std::size_t j) {
            return discrete_frechet(items[i], items[j]);
        });
        const auto ids = iota_positions(size);
        if (frechet_medoid(MetricItems(matrix, ids)) != oracle::brute_medoid(full)) ++medoid_mismatch;
    }
    return {dp_mismatch == 0 && medoid_mismatch == 0,
            fmt("DP vs coupling enumeration: %zu mismatches over %zu pairs (%zu curves); medoid vs exhaustive argmin: "
                "%zu mismatches over %zu collections",
                dp_mismatch, pairs, curves.size(), medoid_mismatch, collections)};
}

Outcome criterion7() {
    std::mt19937_64 rng(77);
    std::size_t trees = 0, checks = 0, mismatches = 0, non_monotone = 0;
    for (std::size_t t = 0; t < 60; ++t) {
        const std::size_t n = 2 + rng() % 11;
        Dataset d;
        d.variable_names = {"A", "B"};
        d.inputs.assign(2, {});
        for (std::size_t i = 0; i < n; ++i) {
            d.obs_ids.push_back(std::to_string(i + 1));
            for (auto& col : d.inputs) {
                std::vector<double> v(1 + rng() % 4);
                for (auto& x : v) x = static_cast<double>(rng() % 1000) / 100.0;
                col.push_back(Curve::from_values(v));
            }
            std::vector<double> y(1 + rng() % 4);
            for (auto& x : y) x = static_cast<double>(rng() % 1000) / 100.0;
            d.outputs.push_back(Curve::from_values(y));
        }
        const auto m = DatasetMetrics::compute(d);
        auto stream = derive_stream(t, StreamDomain::Tree, {0});
        GrowParams grow;
        grow.mtry = 2;
        const auto tree = grow_maximal_tree(TrainingData{d, m}, iota_positions(n), grow, stream);
        const auto seq = cost_complexity_sequence(tree);
        ++trees;
        for (std::size_t k = 1; k < seq.size(); ++k) non_monotone += seq[k].alpha < seq[k - 1].alpha;

        const double top = seq.back().alpha * 1.25 + 1e-3;
        for (std::size_t g = 0; g <= 400; ++g) {
            const double alpha = top * static_cast<double>(g) / 400.0;
            const auto& step = seq[step_for_alpha(seq, alpha)];
            const double ours = step.cost + alpha * static_cast<double>(step.leaf_count);
            const double best = oracle::brute_min_penalized_cost(tree, alpha);
            ++checks;
            if (std::abs(ours - best) > 1e-9 * std::max(1.0, best)) ++mismatches;
        }
    }
    return {mismatches == 0 && non_monotone == 0,
            fmt("%zu trees (n <= 12), %zu alpha checks: %zu mismatches vs exhaustive R(T)+alpha|T|; %zu alpha "
                "decreases",
                trees, checks, mismatches, non_monotone)};
}

std::string serialized(const Forest& f, const Dataset& d) {
    io::Model m;
    m.variable_names = d.variable_names;
    m.n_train = d.n();
    m.forest = f;
    return io::model_to_json(m).dump();
}

Outcome criterion8(const Scenario& s) {
    const std::size_t many = std::max<std::size_t>(4, default_workers());
    const auto one = serialized(train_forest(s.td(), scenario1_forest(50), 1), s.data);
    const auto par = serialized(train_forest(s.td(), scenario1_forest(50), many), s.data);

    // Scenario 1 plus a constant input, which no tree can ever split on.
    Dataset d = s.data;
    d.variable_names.push_back("C");
    d.inputs.emplace_back(d.n(), Curve::from_values(std::vector<double>(5, 1.0)));
    const auto m = DatasetMetrics::compute(d);
    const TrainingData td{d, m};
    auto p = scenario1_forest(50);
    p.mtry = 2;
    const auto forest = train_forest(td, p, many);
    bool unused = true;
    for (const auto& t : forest.trees) {
        unused = unused && t.used_variables().count(2) == 0;
    }
    const auto vi1 = variable_importance(forest, td, permutation_seed, 1);
    const auto vin = variable_importance(forest, td, permutation_seed, many);
    const bool same = one == par && vi1.importance == vin.importance;
    return {same && unused && vi1.importance[2] == 0.0,
            fmt("model bytes 1 vs %zu workers: %s (%zu bytes); VI identical across workers: %s; "
                "unused variable VI = %g",
                many, one == par ? "identical" : "DIFFERENT", one.size(),
                vi1.importance == vin.importance ? "yes" : "NO", vi1.importance[2])};
}

}  // namespace

int main() {
    const std::size_t workers = default_workers();
    std::printf("acceptance suite (%zu workers)\n", workers);
    std::fflush(stdout);
    bool all = true;
    auto report = [&](int id, const std::function<Outcome()>& fn) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        all = all && o.pass;
        std::printf("criterion %d: %s  %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
    };

    const auto s1 = make_scenario(0, scenario1_seed, workers);
    report(1, [&] { return criterion1(s1, workers); });
    report(2, [&] { return criterion2(s1, workers); });
    report(3, [&] { return criterion3(s1); });
    report(4, [&] { return criterion4(workers, 300, 300); });
    report(5, [&] { return criterion5(); });
    report(6, [&] { return criterion6(); });
    report(7, [&] { return criterion7(); });
    report(8, [&] { return criterion8(s1); });
    std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
    return all ? 0 : 1;
}
