#pragma once

#include <string>
#include <vector>

#include "frechet/dataset.hpp"
#include "frechet/simgen.hpp"

namespace fixture {

// Scalars as single-sample curves, so that the discrete Frechet distance is
// |a - b|.
inline frechet::Curve scalar(double v) { return frechet::Curve({0.0}, {v}); }

inline frechet::Curve constant(double level, std::size_t len) {
    return frechet::Curve::from_values(std::vector<double>(len, level));
}

inline frechet::Dataset scalar_dataset(const std::vector<std::vector<double>>& inputs,
                                       const std::vector<double>& outputs) {
    frechet::Dataset d;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        d.obs_ids.push_back(std::to_string(i + 1));
        d.outputs.push_back(scalar(outputs[i]));
    }
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        d.variable_names.push_back("V" + std::to_string(j + 1));
        std::vector<frechet::Curve> col;
        for (double v : inputs[j]) col.push_back(scalar(v));
        d.inputs.push_back(std::move(col));
    }
    return d;
}

// Miniature of the simulation: `per_group` observations for each of the four
// label pairs, with the given noise levels.
inline std::pair<frechet::Dataset, frechet::sim::SimTruth> four_groups(std::size_t per_group, double noise,
                                                                       std::uint64_t seed = 7) {
    using namespace frechet;
    sim::SimConfig cfg;
    cfg.n = 1;
    cfg.x_grid_size = 21;
    cfg.y_grid_size = 19;
    const auto x_grid = sim::uniform_grid(0.0, 1.0, cfg.x_grid_size);
    const auto y_grid = sim::uniform_grid(sim::output_t_min, sim::output_t_max, cfg.y_grid_size);
    auto rng = derive_stream(seed, StreamDomain::Simulation, {99});

    Dataset d;
    sim::SimTruth truth;
    d.variable_names = {"X1", "X2"};
    d.inputs.assign(2, {});
    std::size_t id = 0;
    for (int g1 = 0; g1 < 2; ++g1) {
        for (int g2 = 0; g2 < 2; ++g2) {
            for (std::size_t r = 0; r < per_group; ++r) {
                const int g[2] = {g1, g2};
                d.obs_ids.push_back(std::to_string(++id));
                for (int j = 1; j <= 2; ++j) {
                    std::vector<double> v;
                    for (double t : x_grid) {
                        v.push_back(sim::typical_input_curve(j, g[j - 1] + 1, t) + noise * standard_normal(rng));
                    }
                    d.inputs[static_cast<std::size_t>(j - 1)].emplace_back(x_grid, v);
                }
                std::vector<double> y;
                for (double t : y_grid) y.push_back(sim::typical_output_curve(g1 + 1, g2 + 1, t) + noise * standard_normal(rng));
                d.outputs.emplace_back(y_grid, y);
                truth.g1.push_back(g1);
                truth.g2.push_back(g2);
                truth.beta.push_back(1.0);
            }
        }
    }
    return {std::move(d), std::move(truth)};
}

}  // namespace fixture
