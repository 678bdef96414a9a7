#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace frechet {

// One sampled trajectory: strictly increasing times with one finite value per
// time. Immutable after construction.
class Curve {
public:
    Curve() = default;

    // Throws Error{EmptyCurve} on zero samples and Error{InvalidCurve} on
    // length mismatch, non-finite entries, or non-increasing times.
    Curve(std::vector<double> times, std::vector<double> values);

    // Values on the integer grid 0, 1, ..., n-1.
    static Curve from_values(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> values() const noexcept { return values_; }

    bool operator==(const Curve&) const = default;

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

// Monotone traversal of two sequences from (0,0) to (len_a-1, len_b-1).
struct Coupling {
    std::vector<std::pair<std::size_t, std::size_t>> steps;
};

bool is_valid_coupling(const Coupling& coupling, std::size_t len_a, std::size_t len_b);

// Largest ground distance |a_i - b_j| over the coupling's steps.
double coupling_cost(std::span<const double> a, std::span<const double> b, const Coupling& coupling);

// Discrete Frechet distance between two value sequences, computed by the
// O(len_a * len_b) dynamic program
//   c(i,j) = max(|a_i - b_j|, min(c(i-1,j), c(i,j-1), c(i-1,j-1))).
// Time stamps play no role: the distance compares shapes only.
double discrete_frechet(std::span<const double> a, std::span<const double> b);
double discrete_frechet(const Curve& a, const Curve& b);

// A coupling achieving discrete_frechet(a, b).
Coupling optimal_coupling(std::span<const double> a, std::span<const double> b);

// Square of discrete_frechet; the per-observation error of a prediction.
double squared_output_distance(const Curve& a, const Curve& b);

}  // namespace frechet
