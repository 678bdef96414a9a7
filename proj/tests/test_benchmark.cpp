#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "frechet/benchmark.hpp"
#include "frechet/error.hpp"

using namespace frechet;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

std::string csv(const BenchmarkReport& r) {
    std::ostringstream out;
    write_benchmark_csv(out, r);
    return out.str();
}

}  // namespace

TEST_CASE("benchmark smoke run on a miniature") {
    const auto d = fixture::scalar_dataset({{0.0, 1.0, 5.0, 6.0}}, {0.0, 1.0, 5.0, 6.0});
    const auto m = DatasetMetrics::compute(d);
    const TrainingData td{d, m};
    BenchmarkOptions opt;
    opt.reps = 1;
    opt.test_fraction = 0.25;
    opt.seed = 3;
    opt.forest.trees = 10;
    opt.tree.mode = SelectMode::Hubert;

    const auto report = run_benchmark(td, opt);
    REQUIRE(report.reps.size() == 1);
    CHECK(report.reps[0].n_test == 1);
    CHECK(report.reps[0].n_train == 3);
    CHECK(std::isfinite(report.reps[0].tree_error));
    CHECK(std::isfinite(report.reps[0].forest_error));
    CHECK(report.tree_sd == 0.0);
    CHECK(report.min_split_gain >= 0.0);
    CHECK(report.full_oob.covered + report.full_oob.excluded == d.n());
    CHECK(std::isfinite(report.full_oob.error));
}

TEST_CASE("benchmark rejects unusable fractions") {
    const auto [d, truth] = fixture::four_groups(2, 0.05);
    const auto m = DatasetMetrics::compute(d);
    const TrainingData td{d, m};
    BenchmarkOptions opt;
    opt.reps = 1;
    opt.seed = 1;
    for (double f : {0.0, 1.0, -0.2, 1.5, 0.01, 0.99}) {
        opt.test_fraction = f;
        CHECK(code_of([&] { run_benchmark(td, opt); }) == ErrorCode::InvalidFraction);
    }
    opt.test_fraction = 0.25;
    opt.reps = 0;
    CHECK(code_of([&] { run_benchmark(td, opt); }) == ErrorCode::InvalidParams);
}

TEST_CASE("benchmark reports are deterministic") {
    const auto [d, truth] = fixture::four_groups(4, 0.05);
    const auto m = DatasetMetrics::compute(d);
    const TrainingData td{d, m};
    BenchmarkOptions opt;
    opt.reps = 4;
    opt.test_fraction = 0.25;
    opt.seed = 42;
    opt.forest.trees = 12;
    opt.tree.folds = 3;

    const auto a = run_benchmark(td, opt);
    opt.workers = 3;
    const auto b = run_benchmark(td, opt);
    CHECK(csv(a) == csv(b));
    CHECK(a.forest_wins == b.forest_wins);
    for (const auto& r : a.reps) {
        CHECK(r.n_test == 4);
        CHECK(r.tree_error >= 0.0);
        CHECK(r.forest_error >= 0.0);
        CHECK(r.tree_leaves >= 1);
    }

    opt.seed = 43;
    CHECK(csv(run_benchmark(td, opt)) != csv(a));
}
