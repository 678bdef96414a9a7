#include "frechet/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "frechet/error.hpp"
#include "frechet/io.hpp"
#include "frechet/parallel.hpp"
#include "frechet/random.hpp"

namespace frechet {

namespace {

std::pair<double, double> mean_sd(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace

BenchmarkReport run_benchmark(const TrainingData& td, const BenchmarkOptions& options) {
    const std::size_t n = td.data.n();
    if (options.reps < 1) throw Error(ErrorCode::InvalidParams, "reps must be >= 1");
    if (!(options.test_fraction > 0.0 && options.test_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidFraction, "test fraction must lie in (0, 1)");
    }
    const auto n_test = static_cast<std::size_t>(std::llround(options.test_fraction * static_cast<double>(n)));
    if (n_test == 0 || n_test >= n) {
        throw Error(ErrorCode::InvalidFraction, "test fraction leaves an empty train or test split");
    }

    const auto start = std::chrono::steady_clock::now();
    BenchmarkReport report;
    report.reps.resize(options.reps);
    std::vector<double> min_gain(options.reps, std::numeric_limits<double>::infinity());

    parallel_for(options.reps, options.workers, [&](std::size_t r) {
        auto split_rng = derive_stream(options.seed, StreamDomain::Benchmark, {r, 0});
        auto order = iota_positions(n);
        shuffle(order, split_rng);
        std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
        std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
        std::sort(test.begin(), test.end());
        std::sort(train.begin(), train.end());

        auto tree_rng = derive_stream(options.seed, StreamDomain::Benchmark, {r, 1});
        const auto fitted = fit_tree(td, train, options.tree, tree_rng);

        ForestParams fp = options.forest;
        fp.seed = derive_seed(options.seed, StreamDomain::Benchmark, {r, 2});
        const auto forest = train_forest(td, fp, train, 1);

        auto& res = report.reps[r];
        res.rep = r;
        res.n_train = train.size();
        res.n_test = test.size();
        res.tree_leaves = fitted.selection.tree.leaf_count();
        double tree_total = 0.0, forest_total = 0.0;
        for (auto o : test) {
            tree_total += squared_error_cached(fitted.selection.tree, td.metrics, o);
            const double d = td.metrics.output(predict_forest_cached(forest, td.metrics, o), o);
            forest_total += d * d;
        }
        res.tree_error = tree_total / static_cast<double>(test.size());
        res.forest_error = forest_total / static_cast<double>(test.size());

        double g = min_split_gain(fitted.tree);
        for (const auto& t : forest.trees) g = std::min(g, min_split_gain(t));
        min_gain[r] = g;
    });

    std::vector<double> tree_errors, forest_errors;
    for (const auto& r : report.reps) {
        tree_errors.push_back(r.tree_error);
        forest_errors.push_back(r.forest_error);
        report.forest_wins += r.forest_error < r.tree_error;
    }
    std::tie(report.tree_mean, report.tree_sd) = mean_sd(tree_errors);
    std::tie(report.forest_mean, report.forest_sd) = mean_sd(forest_errors);

    ForestParams full = options.forest;
    full.seed = options.seed;
    const auto full_forest = train_forest(td, full, options.workers);
    report.full_oob = oob_error(full_forest, td);
    double g = *std::min_element(min_gain.begin(), min_gain.end());
    for (const auto& t : full_forest.trees) g = std::min(g, min_split_gain(t));
    report.min_split_gain = g;

    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void write_benchmark_csv(std::ostream& out, const BenchmarkReport& report) {
    out << "rep,n_train,n_test,tree_error,forest_error,tree_leaves\n";
    for (const auto& r : report.reps) {
        out << r.rep << ',' << r.n_train << ',' << r.n_test << ',' << io::format_double(r.tree_error) << ','
            << io::format_double(r.forest_error) << ',' << r.tree_leaves << '\n';
    }
    out << "mean,,," << io::format_double(report.tree_mean) << ',' << io::format_double(report.forest_mean) << ",\n";
    out << "sd,,," << io::format_double(report.tree_sd) << ',' << io::format_double(report.forest_sd) << ",\n";
    out << "oob,,,," << io::format_double(report.full_oob.error) << ",\n";
}

void print_benchmark_summary(std::ostream& out, const BenchmarkReport& report) {
    out << "repetitions:       " << report.reps.size() << '\n'
        << "tree error:        " << report.tree_mean << " (sd " << report.tree_sd << ")\n"
        << "forest error:      " << report.forest_mean << " (sd " << report.forest_sd << ")\n"
        << "forest wins:       " << report.forest_wins << " / " << report.reps.size() << '\n'
        << "full-data OOB:     " << report.full_oob.error << " (" << report.full_oob.covered << " covered, "
        << report.full_oob.excluded << " excluded)\n"
        << "min split gain:    " << report.min_split_gain << '\n'
        << "wall clock:        " << report.seconds << " s\n";
}

}  // namespace frechet
