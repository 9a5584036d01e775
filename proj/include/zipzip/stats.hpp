#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "zipzip/ziptree.hpp"

namespace zipzip {

// H_m = sum_{i=1..m} 1/i, summed in ascending order of i. Throws on m = 0.
double harmonic(std::uint64_t m);

// Expected 1-based depth of the j-th smallest of n distinct keys under
// geometric ranks with a uniform secondary tie-break: H_j + H_{n-j+1} - 1.
// Throws unless 1 <= j <= n.
double expected_depth(std::uint64_t j, std::uint64_t n);

enum class XScale { log2_x, log2_log2_x };

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares of log2(y) against the transformed x axis. Points
// need x large enough for the transform and y > 0; fewer than three points
// or invalid coordinates throw. A zero-variance y column reports r²=1.
FitResult fit_loglog(const std::vector<std::pair<double, double>>& points, XScale xs);

// Plain ordinary least squares on untransformed coordinates, same rules.
FitResult fit_linear(const std::vector<std::pair<double, double>>& points);

struct DepthSummary {
    std::uint64_t n = 0;
    std::size_t trials = 0;
    double mean_depth_smallest = 0.0;
    double mean_depth_largest = 0.0;
    double mean_depth_all = 0.0;
    double mean_height = 0.0;
    double mean_root_r1 = 0.0;
    // the same means divided by log2 n (zero when n = 1)
    double scaled_depth_smallest = 0.0;
    double scaled_depth_largest = 0.0;
    double scaled_depth_all = 0.0;
    double scaled_height = 0.0;
    // root rank scales with log log n, so it gets that divisor (zero when n <= 2)
    double scaled_root_r1 = 0.0;
};

// Arithmetic means over per-trial measurements of n-key trees. Throws on an
// empty list or a run whose key count is not n.
DepthSummary summarize(const std::vector<TreeStats>& runs, std::uint64_t n);

}  // namespace zipzip
