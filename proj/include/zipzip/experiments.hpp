#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zipzip/jit.hpp"
#include "zipzip/stats.hpp"
#include "zipzip/ziptree.hpp"

namespace zipzip {

enum class InsertionOrder { sequential, random };

const char* order_name(InsertionOrder o);
InsertionOrder order_from_name(const std::string& name);

// One measurement campaign: `trials` independent builds of an n-key tree.
struct TrialPlan {
    RankVariant variant = RankVariant::zipzip;
    std::uint64_t n = 1ULL << 16;
    std::size_t trials = 100;
    std::uint64_t master_seed = 1;
    unsigned c = 3;
    double p = 0.5;
    InsertionOrder order = InsertionOrder::sequential;
};

// Root of trial i's randomness: a pure function of the run identity, so the
// execution schedule cannot change any result.
std::uint64_t trial_seed(const TrialPlan& plan, std::size_t trial_index);

// Policy the plan describes. The biased variant needs a weight profile and
// has its own runner, so it is rejected here.
RankPolicy policy_for(const TrialPlan& plan);

// Keys 0..n-1, shuffled per trial when the order is random.
std::vector<Key> trial_keys(const TrialPlan& plan, std::size_t trial_index);

// Runs fn(i) for i in [0, count), spreading trials over ZIPZIP_THREADS
// worker threads (default 1). fn must only touch state owned by trial i.
void parallel_trials(std::size_t count, const std::function<void(std::size_t)>& fn);

TreeStats build_trial(const TrialPlan& plan, std::size_t trial_index);
std::vector<TreeStats> run_trials(const TrialPlan& plan);
DepthSummary run_depth_summary(const TrialPlan& plan);

// Rank-tie measurement for one build. Full-rank ties are too rare to count
// directly at desk scale (the uniform variant's rate is ~n^-3), so alongside
// the raw counters each insertion adds its exact conditional expectation
// given the current tree: the inserted key's rank is integrated out along
// its search path, where the nodes compared are the longest prefix whose
// running dominance threshold the rank clears.
struct TieTrial {
    double expected_ties = 0.0;
    double expected_comparisons = 0.0;
    std::uint64_t observed_ties = 0;
    std::uint64_t observed_comparisons = 0;
    std::uint64_t insertions = 0;
};
TieTrial tie_trial(const TrialPlan& plan, std::size_t trial_index);
TieTrial tie_trials(const TrialPlan& plan);  // elementwise sum

MetadataReport jit_trial(const TrialPlan& plan, std::size_t trial_index);
std::vector<MetadataReport> jit_trials(const TrialPlan& plan);

// One heavy key among unit weights; reports the heavy key's mean depth.
struct BiasedPlan {
    std::uint64_t n = 1ULL << 14;
    std::size_t trials = 100;
    std::uint64_t master_seed = 1;
    unsigned c = 3;
    Key heavy_key = 1ULL << 13;
    std::uint64_t heavy_weight = 1;
};
double biased_heavy_depth(const BiasedPlan& plan);

// Fixed-width float for CSV cells: 6 significant digits.
std::string csv_num(double v);

struct ChartSeries {
    std::string label;
    std::vector<double> ys;  // one per x
};

// Self-contained polyline chart with axes, tick labels and a legend. xs are
// plotted on a log2 axis when log2_x is set.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<double>& xs,
                           const std::vector<ChartSeries>& series, bool log2_x);

}  // namespace zipzip
