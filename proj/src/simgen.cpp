#include "frechet/simgen.hpp"

#include <cmath>
#include <string>

#include "frechet/error.hpp"

namespace frechet::sim {

void SimConfig::validate() const {
    if (n < 1) throw Error(ErrorCode::InvalidParams, "n must be >= 1");
    if (x_grid_size < 2 || y_grid_size < 2) throw Error(ErrorCode::InvalidParams, "grid sizes must be >= 2");
    if (input_noise_sd < 0 || output_noise_sd < 0 || beta_sd < 0) {
        throw Error(ErrorCode::InvalidParams, "standard deviations must be non-negative");
    }
}

double typical_input_curve(int j, int k, double t) {
    if (j == 1 && k == 1) return 0.5 * t + 0.1 * std::sin(6.0 * t);
    if (j == 1 && k == 2) return 0.3 - 0.7 * (t - 0.45) * (t - 0.45);
    if (j == 2 && k == 1) return 2.0 * (t - 0.5) * (t - 0.5) - 0.3 * t;
    if (j == 2 && k == 2) return 0.2 - 0.3 * t + 0.1 * std::cos(8.0 * t);
    throw Error(ErrorCode::InvalidParams, "typical input curve indices must be in {1, 2}");
}

double typical_output_curve(int a, int b, double t) {
    if (a == 1 && b == 1) return t + 0.3 * std::sin(10.0 * t);
    if (a == 1 && b == 2) return t + 2.0 * (t - 1.7) * (t - 1.7);
    if (a == 2 && b == 1) return 1.5 * std::exp(-(t - 1.5) * (t - 1.5) / 0.5) - 0.1 * t * std::cos(10.0 * t);
    if (a == 2 && b == 2) {
        if (!(t > 1.0 + 1.0 / 13.0)) {
            throw Error(ErrorCode::DomainError, "g_{2,2} undefined at t = " + std::to_string(t));
        }
        return 2.0 * std::log(13.0 * (t - 1.0)) / (1.0 + t);
    }
    throw Error(ErrorCode::InvalidParams, "typical output curve indices must be in {1, 2}");
}

std::pair<int, int> output_shape_for(int g1, int g2) { return {g1 + 1, g2 + 1}; }

std::vector<double> uniform_grid(double lo, double hi, std::size_t size) {
    if (size < 2) throw Error(ErrorCode::InvalidGrid, "grid needs at least 2 points");
    std::vector<double> grid(size);
    for (std::size_t i = 0; i < size; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(size - 1);
    }
    grid.back() = hi;
    return grid;
}

Curve sampled_output_shape(int a, int b, std::span<const double> grid) {
    std::vector<double> values;
    values.reserve(grid.size());
    for (double t : grid) values.push_back(typical_output_curve(a, b, t));
    return Curve(std::vector<double>(grid.begin(), grid.end()), std::move(values));
}

Curve brownian_path(std::span<const double> grid, RngStream& rng) {
    if (grid.empty() || grid.front() != 0.0) throw Error(ErrorCode::InvalidGrid, "grid must start at 0");
    std::vector<double> values(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double dt = grid[i] - grid[i - 1];
        if (!(dt > 0.0)) throw Error(ErrorCode::InvalidGrid, "grid must be strictly increasing");
        values[i] = values[i - 1] + std::sqrt(dt) * standard_normal(rng);
    }
    return Curve(std::vector<double>(grid.begin(), grid.end()), std::move(values));
}

std::pair<Dataset, SimTruth> simulate_dataset(const SimConfig& config) {
    config.validate();
    const auto x_grid = uniform_grid(0.0, 1.0, config.x_grid_size);
    const auto y_grid = uniform_grid(output_t_min, output_t_max, config.y_grid_size);
    const std::size_t n = config.n;
    const std::size_t p = 2 + config.noise_vars;

    Dataset data;
    data.variable_names = {"X1", "X2"};
    for (std::size_t k = 0; k < config.noise_vars; ++k) data.variable_names.push_back("N" + std::to_string(k + 1));
    data.inputs.assign(p, {});
    for (auto& v : data.inputs) v.reserve(n);
    data.outputs.reserve(n);

    SimTruth truth;
    for (std::size_t i = 0; i < n; ++i) {
        data.obs_ids.push_back(std::to_string(i + 1));

        // Structured part and noise variables use separate streams so that
        // adding noise variables leaves the structured curves unchanged.
        auto rng = derive_stream(config.seed, StreamDomain::Simulation, {i, 0});
        const int g[2] = {bernoulli_half(rng) ? 1 : 0, bernoulli_half(rng) ? 1 : 0};
        const double beta = 1.0 + config.beta_sd * standard_normal(rng);
        truth.g1.push_back(g[0]);
        truth.g2.push_back(g[1]);
        truth.beta.push_back(beta);

        for (int j = 1; j <= 2; ++j) {
            std::vector<double> values;
            values.reserve(x_grid.size());
            for (double t : x_grid) {
                const double shape = typical_input_curve(j, g[j - 1] == 0 ? 1 : 2, t);
                values.push_back(beta * shape + config.input_noise_sd * standard_normal(rng));
            }
            data.inputs[static_cast<std::size_t>(j - 1)].emplace_back(x_grid, std::move(values));
        }

        const auto [a, b] = output_shape_for(g[0], g[1]);
        std::vector<double> values;
        values.reserve(y_grid.size());
        for (double t : y_grid) {
            values.push_back(beta * typical_output_curve(a, b, t) + config.output_noise_sd * standard_normal(rng));
        }
        data.outputs.emplace_back(y_grid, std::move(values));

        for (std::size_t k = 0; k < config.noise_vars; ++k) {
            auto noise_rng = derive_stream(config.seed, StreamDomain::Simulation, {i, k + 1});
            data.inputs[2 + k].push_back(brownian_path(x_grid, noise_rng));
        }
    }
    return {std::move(data), std::move(truth)};
}

}  // namespace frechet::sim
