#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "frechet/curve.hpp"
#include "frechet/metric_core.hpp"

namespace frechet {

// n observations of p curve-valued inputs and one curve-valued output.
struct Dataset {
    std::vector<std::string> obs_ids;
    std::vector<std::string> variable_names;
    // inputs[j][i]: curve of variable j for observation i.
    std::vector<std::vector<Curve>> inputs;
    std::vector<Curve> outputs;

    std::size_t n() const noexcept { return outputs.size(); }
    std::size_t p() const noexcept { return inputs.size(); }

    // Throws Error{InvalidParams} when shapes disagree or n, p are zero.
    void validate() const;
};

// Inputs of one observation at prediction time. A variable may be absent as
// long as no split of the model uses it.
struct Observation {
    std::vector<std::optional<Curve>> inputs;

    static Observation from_dataset(const Dataset& data, std::size_t obs);
};

// Pairwise discrete Frechet distances over the whole dataset: one matrix per
// input variable and one for the output.
struct DatasetMetrics {
    std::vector<DistanceMatrix> inputs;
    DistanceMatrix output;

    static DatasetMetrics compute(const Dataset& data, std::size_t workers = 1);
};

// What tree and forest training read from: the curves plus their cache.
struct TrainingData {
    const Dataset& data;
    const DatasetMetrics& metrics;
};

}  // namespace frechet
