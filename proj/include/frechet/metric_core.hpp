#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "frechet/error.hpp"
#include "frechet/parallel.hpp"

namespace frechet {

// Dense symmetric matrix of pairwise distances over one metric space.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    // Fills the upper triangle with dist(i, j) for i < j and mirrors it.
    // Rows are distributed over `workers` threads.
    template <typename Dist>
    static DistanceMatrix build(std::size_t n, Dist&& dist, std::size_t workers = 1) {
        DistanceMatrix m(n);
        parallel_for(n, workers, [&](std::size_t i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                m.data_[i * n + j] = dist(i, j);
            }
        });
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) m.data_[j * n + i] = m.data_[i * n + j];
        }
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
    const double* row(std::size_t i) const noexcept { return data_.data() + i * n_; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

// Collection of items in one metric space, addressed by local index 0..size()-1.
template <typename T>
concept MetricItemsLike = requires(const T& items, std::size_t i) {
    { items.size() } -> std::convertible_to<std::size_t>;
    { items.distance(i, i) } -> std::convertible_to<double>;
};

// Items given as a subset (possibly with repeats) of a precomputed matrix.
class MetricItems {
public:
    MetricItems(const DistanceMatrix& matrix, std::span<const std::size_t> ids) : matrix_(&matrix), ids_(ids) {}

    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t id(std::size_t local) const noexcept { return ids_[local]; }
    double distance(std::size_t i, std::size_t j) const noexcept { return (*matrix_)(ids_[i], ids_[j]); }

private:
    const DistanceMatrix* matrix_;
    std::span<const std::size_t> ids_;
};

// Items given by a count and an arbitrary distance callable.
class FunctionItems {
public:
    FunctionItems(std::size_t count, std::function<double(std::size_t, std::size_t)> dist)
        : count_(count), dist_(std::move(dist)) {}

    std::size_t size() const noexcept { return count_; }
    double distance(std::size_t i, std::size_t j) const { return dist_(i, j); }

private:
    std::size_t count_;
    std::function<double(std::size_t, std::size_t)> dist_;
};

// Medoid among the given local positions: argmin over p in `positions` of
// sum over q in `positions` of dist(p, q)^2. Ties go to the earliest position.
// Returns the local index of the winner.
template <MetricItemsLike Items>
std::size_t medoid_among(const Items& items, std::span<const std::size_t> positions) {
    if (positions.empty()) {
        throw Error(ErrorCode::EmptyInput, "medoid of an empty collection");
    }
    std::size_t best = positions[0];
    double best_sum = std::numeric_limits<double>::infinity();
    for (std::size_t cand : positions) {
        double sum = 0.0;
        for (std::size_t other : positions) {
            const double d = items.distance(cand, other);
            sum += d * d;
            // Terms are non-negative, so a partial sum above the incumbent
            // can never win; the full-sum result is unchanged.
            if (sum > best_sum) break;
        }
        if (sum < best_sum) {
            best_sum = sum;
            best = cand;
        }
    }
    return best;
}

// Sum of squared distances from each listed position to `center`.
template <MetricItemsLike Items>
double sum_squared_to(const Items& items, std::span<const std::size_t> positions, std::size_t center) {
    double sum = 0.0;
    for (std::size_t p : positions) {
        const double d = items.distance(p, center);
        sum += d * d;
    }
    return sum;
}

inline std::vector<std::size_t> iota_positions(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

// Medoid Frechet mean: the item minimizing the sum of squared distances to
// all items, searched over the items themselves. Ties -> smallest index.
template <MetricItemsLike Items>
std::size_t frechet_medoid(const Items& items) {
    if (items.size() == 0) {
        throw Error(ErrorCode::EmptyInput, "medoid of an empty collection");
    }
    const auto all = iota_positions(items.size());
    return medoid_among(items, std::span<const std::size_t>(all));
}

// Frechet variance in sum form: sum of squared distances to the medoid.
template <MetricItemsLike Items>
double frechet_variance(const Items& items) {
    if (items.size() == 0) {
        throw Error(ErrorCode::EmptyInput, "variance of an empty collection");
    }
    const auto all = iota_positions(items.size());
    const std::span<const std::size_t> span(all);
    return sum_squared_to(items, span, medoid_among(items, span));
}

enum class Side : std::uint8_t { Left = 0, Right = 1 };

// Result of the two-means split function: two centers, the induced Voronoi
// labels (ties resolved left), and the empirical distortion.
struct SplitAssignment {
    std::size_t center_left = 0;
    std::size_t center_right = 0;
    std::vector<Side> labels;
    double distortion = 0.0;
    // Distortion after each assignment step; non-increasing.
    std::vector<double> distortion_trace;
    std::size_t iterations = 0;

    std::size_t count(Side side) const {
        std::size_t c = 0;
        for (Side s : labels) c += (s == side);
        return c;
    }
};

inline constexpr std::size_t default_two_means_iterations = 50;

namespace detail {

template <MetricItemsLike Items>
double assign_voronoi(const Items& items, std::size_t left, std::size_t right, std::vector<Side>& labels) {
    double distortion = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const double dl = items.distance(i, left);
        const double dr = items.distance(i, right);
        if (dl <= dr) {
            labels[i] = Side::Left;
            distortion += dl * dl;
        } else {
            labels[i] = Side::Right;
            distortion += dr * dr;
        }
    }
    return distortion;
}

}  // namespace detail

// k-medoids with k = 2. Starts from the farthest pair (lexicographically
// smallest on ties), then alternates Voronoi assignment and per-class medoid
// updates until the labels stop changing or max_iter updates have run.
template <MetricItemsLike Items>
SplitAssignment two_means_split(const Items& items, std::size_t max_iter = default_two_means_iterations) {
    const std::size_t m = items.size();
    if (m < 2) {
        throw Error(ErrorCode::TooFewItems, "two-means split needs at least 2 items");
    }
    if (max_iter == 0) {
        throw Error(ErrorCode::InvalidParams, "two-means max_iter must be positive");
    }

    SplitAssignment out;
    double farthest = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = items.distance(i, j);
            if (d > farthest) {
                farthest = d;
                out.center_left = i;
                out.center_right = j;
            }
        }
    }
    if (!(farthest > 0.0)) {
        throw Error(ErrorCode::DegenerateSpace, "all pairwise distances are zero");
    }

    out.labels.assign(m, Side::Left);
    out.distortion = detail::assign_voronoi(items, out.center_left, out.center_right, out.labels);
    out.distortion_trace.push_back(out.distortion);

    std::vector<std::size_t> left_pos, right_pos;
    std::vector<Side> next_labels(m);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        left_pos.clear();
        right_pos.clear();
        for (std::size_t i = 0; i < m; ++i) {
            (out.labels[i] == Side::Left ? left_pos : right_pos).push_back(i);
        }
        const std::size_t new_left = medoid_among(items, std::span<const std::size_t>(left_pos));
        const std::size_t new_right = medoid_among(items, std::span<const std::size_t>(right_pos));
        ++out.iterations;
        if (new_left == out.center_left && new_right == out.center_right) break;

        const double distortion = detail::assign_voronoi(items, new_left, new_right, next_labels);
        out.center_left = new_left;
        out.center_right = new_right;
        out.distortion = distortion;
        out.distortion_trace.push_back(distortion);
        const bool unchanged = next_labels == out.labels;
        out.labels.swap(next_labels);
        if (unchanged) break;
    }
    return out;
}

}  // namespace frechet
