#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "frechet/curve.hpp"
#include "frechet/dataset.hpp"
#include "frechet/random.hpp"

namespace frechet::sim {

// Two structured curve inputs driven by binary group labels, one output whose
// shape is picked by the label pair, and optional Brownian noise inputs.
struct SimConfig {
    std::size_t n = 100;
    std::size_t noise_vars = 0;
    std::size_t x_grid_size = 51;  // uniform on [0, 1]
    std::size_t y_grid_size = 46;  // uniform on [1.1, 2]
    std::uint64_t seed = 0;

    // Set these to zero for noiseless, undilated curves.
    double input_noise_sd = 0.03;
    double output_noise_sd = 0.05;
    double beta_sd = 0.1;

    void validate() const;
};

struct SimTruth {
    std::vector<int> g1;
    std::vector<int> g2;
    std::vector<double> beta;
};

inline constexpr double output_t_min = 1.1;
inline constexpr double output_t_max = 2.0;

// f_{j,k}(t) for j, k in {1, 2}, t in [0, 1].
double typical_input_curve(int j, int k, double t);

// g_{a,b}(t) for a, b in {1, 2}, t in [1.1, 2]. g_{2,2} throws DomainError
// for t <= 1 + 1/13.
double typical_output_curve(int a, int b, double t);

// Index pair (a, b) of the output shape used for labels (g1, g2).
std::pair<int, int> output_shape_for(int g1, int g2);

std::vector<double> uniform_grid(double lo, double hi, std::size_t size);

// g_{a,b} sampled on `grid`.
Curve sampled_output_shape(int a, int b, std::span<const double> grid);

// Standard Brownian motion on `grid` (strictly increasing, starting at 0).
Curve brownian_path(std::span<const double> grid, RngStream& rng);

std::pair<Dataset, SimTruth> simulate_dataset(const SimConfig& config);

}  // namespace frechet::sim
