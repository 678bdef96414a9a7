#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "frechet/dataset.hpp"
#include "frechet/forest.hpp"
#include "frechet/tree.hpp"

namespace frechet {

struct BenchmarkOptions {
    std::size_t reps = 100;
    double test_fraction = 0.2;
    ForestParams forest;
    // Selection rule and growth settings for the single pruned tree.
    SelectOptions tree;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

struct RepetitionResult {
    std::size_t rep = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    double tree_error = 0.0;
    double forest_error = 0.0;
    std::size_t tree_leaves = 0;
};

struct BenchmarkReport {
    std::vector<RepetitionResult> reps;
    double tree_mean = 0.0;
    double tree_sd = 0.0;
    double forest_mean = 0.0;
    double forest_sd = 0.0;
    std::size_t forest_wins = 0;
    // Forest trained on every observation.
    OobResult full_oob;
    // Smallest accepted split gain over every maximal and forest tree grown.
    double min_split_gain = 0.0;
    double seconds = 0.0;
};

// Repeated random train/test cuts comparing a pruned tree with a forest,
// plus the OOB error of one forest on the full data. Repetition r draws its
// cut and forest seed from streams derived from (seed, r).
BenchmarkReport run_benchmark(const TrainingData& td, const BenchmarkOptions& options);

// Per-repetition table plus summary rows; contains no timings.
void write_benchmark_csv(std::ostream& out, const BenchmarkReport& report);
void print_benchmark_summary(std::ostream& out, const BenchmarkReport& report);

}  // namespace frechet
