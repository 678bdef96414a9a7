#include "frechet/curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frechet/error.hpp"

namespace frechet {

Curve::Curve(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (values_.empty() || times_.empty()) {
        throw Error(ErrorCode::EmptyCurve, "curve has no samples");
    }
    if (times_.size() != values_.size()) {
        throw Error(ErrorCode::InvalidCurve, "times and values differ in length (" +
                                                 std::to_string(times_.size()) + " vs " +
                                                 std::to_string(values_.size()) + ")");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(times_[i]) || !std::isfinite(values_[i])) {
            throw Error(ErrorCode::InvalidCurve, "non-finite sample at position " + std::to_string(i));
        }
        if (i > 0 && !(times_[i] > times_[i - 1])) {
            throw Error(ErrorCode::InvalidCurve, "times not strictly increasing at position " + std::to_string(i));
        }
    }
}

Curve Curve::from_values(std::vector<double> values) {
    std::vector<double> times(values.size());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i);
    return Curve(std::move(times), std::move(values));
}

bool is_valid_coupling(const Coupling& coupling, std::size_t len_a, std::size_t len_b) {
    const auto& s = coupling.steps;
    if (s.empty() || len_a == 0 || len_b == 0) return false;
    if (s.front() != std::pair<std::size_t, std::size_t>{0, 0}) return false;
    if (s.back() != std::pair<std::size_t, std::size_t>{len_a - 1, len_b - 1}) return false;
    for (std::size_t k = 1; k < s.size(); ++k) {
        const auto di = s[k].first - s[k - 1].first;
        const auto dj = s[k].second - s[k - 1].second;
        if (s[k].first < s[k - 1].first || s[k].second < s[k - 1].second) return false;
        if (di > 1 || dj > 1 || (di == 0 && dj == 0)) return false;
    }
    return true;
}

double coupling_cost(std::span<const double> a, std::span<const double> b, const Coupling& coupling) {
    double cost = 0.0;
    for (auto [i, j] : coupling.steps) cost = std::max(cost, std::abs(a[i] - b[j]));
    return cost;
}

double discrete_frechet(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::EmptyCurve, "discrete Frechet distance of an empty curve");
    }
    const std::size_t m = b.size();
    std::vector<double> prev(m), cur(m);

    prev[0] = std::abs(a[0] - b[0]);
    for (std::size_t j = 1; j < m; ++j) prev[j] = std::max(prev[j - 1], std::abs(a[0] - b[j]));

    for (std::size_t i = 1; i < a.size(); ++i) {
        const double ai = a[i];
        cur[0] = std::max(prev[0], std::abs(ai - b[0]));
        for (std::size_t j = 1; j < m; ++j) {
            const double reach = std::min({prev[j], cur[j - 1], prev[j - 1]});
            cur[j] = std::max(reach, std::abs(ai - b[j]));
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

double discrete_frechet(const Curve& a, const Curve& b) { return discrete_frechet(a.values(), b.values()); }

Coupling optimal_coupling(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::EmptyCurve, "coupling of an empty curve");
    }
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<double> c(n * m);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return c[i * m + j]; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double ground = std::abs(a[i] - b[j]);
            if (i == 0 && j == 0) {
                at(i, j) = ground;
            } else if (i == 0) {
                at(i, j) = std::max(at(i, j - 1), ground);
            } else if (j == 0) {
                at(i, j) = std::max(at(i - 1, j), ground);
            } else {
                at(i, j) = std::max(std::min({at(i - 1, j), at(i, j - 1), at(i - 1, j - 1)}), ground);
            }
        }
    }
    // Walk back from the end, always stepping to the cheapest predecessor.
    Coupling coupling;
    std::size_t i = n - 1, j = m - 1;
    coupling.steps.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = at(i - 1, j - 1);
            const double up = at(i - 1, j);
            const double left = at(i, j - 1);
            if (diag <= up && diag <= left) {
                --i;
                --j;
            } else if (up <= left) {
                --i;
            } else {
                --j;
            }
        }
        coupling.steps.emplace_back(i, j);
    }
    std::reverse(coupling.steps.begin(), coupling.steps.end());
    return coupling;
}

double squared_output_distance(const Curve& a, const Curve& b) {
    const double d = discrete_frechet(a, b);
    return d * d;
}

}  // namespace frechet
