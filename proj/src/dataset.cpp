#include "frechet/dataset.hpp"

#include <string>

#include "frechet/error.hpp"
#include "frechet/parallel.hpp"

namespace frechet {

void Dataset::validate() const {
    if (n() == 0) throw Error(ErrorCode::InvalidParams, "dataset has no observations");
    if (p() == 0) throw Error(ErrorCode::InvalidParams, "dataset has no input variables");
    if (variable_names.size() != p()) {
        throw Error(ErrorCode::InvalidParams, "variable_names has " + std::to_string(variable_names.size()) +
                                                  " entries for " + std::to_string(p()) + " variables");
    }
    if (obs_ids.size() != n()) {
        throw Error(ErrorCode::InvalidParams, "obs_ids has " + std::to_string(obs_ids.size()) + " entries for " +
                                                  std::to_string(n()) + " observations");
    }
    for (std::size_t j = 0; j < p(); ++j) {
        if (inputs[j].size() != n()) {
            throw Error(ErrorCode::InvalidParams, "variable '" + variable_names[j] + "' has " +
                                                      std::to_string(inputs[j].size()) + " curves, expected " +
                                                      std::to_string(n()));
        }
    }
}

Observation Observation::from_dataset(const Dataset& data, std::size_t obs) {
    Observation x;
    x.inputs.reserve(data.p());
    for (const auto& var : data.inputs) x.inputs.emplace_back(var[obs]);
    return x;
}

DatasetMetrics DatasetMetrics::compute(const Dataset& data, std::size_t workers) {
    data.validate();
    const std::size_t n = data.n();
    const std::size_t p = data.p();

    DatasetMetrics m;
    m.inputs.reserve(p);
    for (std::size_t j = 0; j < p; ++j) {
        const auto& curves = data.inputs[j];
        m.inputs.push_back(DistanceMatrix::build(
            n, [&](std::size_t a, std::size_t b) { return discrete_frechet(curves[a], curves[b]); }, workers));
    }
    m.output = DistanceMatrix::build(
        n, [&](std::size_t a, std::size_t b) { return discrete_frechet(data.outputs[a], data.outputs[b]); },
        workers);
    return m;
}

}  // namespace frechet
