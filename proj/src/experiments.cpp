#include "zipzip/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace zipzip {

const char* order_name(InsertionOrder o) {
    return o == InsertionOrder::sequential ? "sequential" : "random";
}

InsertionOrder order_from_name(const std::string& name) {
    if (name == "sequential") return InsertionOrder::sequential;
    if (name == "random") return InsertionOrder::random;
    throw std::invalid_argument("unknown insertion order: " + name);
}

std::uint64_t trial_seed(const TrialPlan& plan, std::size_t trial_index) {
    return mix64(plan.master_seed, static_cast<std::uint64_t>(plan.variant), plan.n,
                 static_cast<std::uint64_t>(trial_index));
}

RankPolicy policy_for(const TrialPlan& plan) {
    switch (plan.variant) {
        case RankVariant::original:
            return RankPolicy::original(plan.p);
        case RankVariant::uniform:
            return RankPolicy::uniform(plan.n, plan.c);
        case RankVariant::zipzip:
            return RankPolicy::zipzip(plan.n, plan.c);
        case RankVariant::variable_p:
            return RankPolicy::variable_p(plan.p);
        case RankVariant::biased:
            break;
    }
    throw std::invalid_argument("plan variant needs a weight profile; use the biased runner");
}

std::vector<Key> trial_keys(const TrialPlan& plan, std::size_t trial_index) {
    std::vector<Key> keys(plan.n);
    std::iota(keys.begin(), keys.end(), 0);
    if (plan.order == InsertionOrder::random) {
        // distinct stream from the rank seeds so order and ranks stay independent
        std::mt19937_64 gen(mix64(trial_seed(plan, trial_index), 0x6f72646572ULL));
        std::shuffle(keys.begin(), keys.end(), gen);
    }
    return keys;
}

void parallel_trials(std::size_t count, const std::function<void(std::size_t)>& fn) {
    std::size_t threads = 1;
    if (const char* env = std::getenv("ZIPZIP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 1) threads = static_cast<std::size_t>(v);
    }
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += threads) fn(i);
        });
    for (auto& t : pool) t.join();
}

TreeStats build_trial(const TrialPlan& plan, std::size_t trial_index) {
    ZipTree t(policy_for(plan), KeyedRng(trial_seed(plan, trial_index), RngMode::keyed));
    for (Key k : trial_keys(plan, trial_index)) t.insert(k);
    return stats(t);
}

std::vector<TreeStats> run_trials(const TrialPlan& plan) {
    std::vector<TreeStats> out(plan.trials);
    parallel_trials(plan.trials, [&](std::size_t i) { out[i] = build_trial(plan, i); });
    return out;
}

DepthSummary run_depth_summary(const TrialPlan& plan) {
    return summarize(run_trials(plan), plan.n);
}

namespace {

// P(geometric(1/2) == k) and P(< k), safe far past double underflow
double geo_eq(std::uint64_t k) { return std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(k, 1060)) - 1); }
double geo_less(std::uint64_t k) {
    if (k == 0) return 0.0;
    return 1.0 - std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(k, 1060)));
}

// Walks x's key path before insertion and integrates over the rank x is
// about to draw: each node is compared iff the rank clears every earlier
// node's threshold, so reach probabilities and tie probabilities fall out of
// the running minimum of those thresholds.
void add_conditional(const ZipTree& t, Key x, const RankPolicy& po, TieTrial& acc) {
    std::uint32_t cur = t.root_index();
    if (po.variant == RankVariant::uniform) {
        const double r_hi = static_cast<double>(po.uniform_r1_hi());
        std::uint64_t h = ~0ULL;  // rank reaches node i iff r1 <= h over earlier nodes
        while (cur != detail::kNull) {
            const auto& a = t.node(cur);
            acc.expected_comparisons +=
                h == ~0ULL ? 1.0 : static_cast<double>(std::min<std::uint64_t>(h, po.uniform_r1_hi())) / r_hi;
            if (a.rank.r1 <= h) acc.expected_ties += 1.0 / r_hi;
            const std::uint64_t pass = a.rank.r1 - 1 + (a.key < x ? 1 : 0);
            h = std::min(h, pass);
            if (h == 0) break;  // drawn ranks start at 1, nothing reaches deeper
            cur = x < a.key ? a.left : a.right;
        }
        return;
    }
    // geometric r1 with a uniform r2 tie-break: the pass condition at each
    // node is lexicographic, so the conjunction is one lex-minimum pair
    const double r2_hi = static_cast<double>(po.r2_hi());
    std::uint64_t h1 = ~0ULL, h2 = ~0ULL;
    while (cur != detail::kNull) {
        const auto& a = t.node(cur);
        double reach;
        if (h1 == ~0ULL) {
            reach = 1.0;
        } else {
            const double pw =
                h2 == ~0ULL ? 1.0
                            : static_cast<double>(std::min<std::uint64_t>(h2, po.r2_hi())) / r2_hi;
            reach = geo_less(h1) + geo_eq(h1) * pw;
        }
        acc.expected_comparisons += reach;
        if (a.rank.r1 < h1 || (a.rank.r1 == h1 && a.rank.r2 <= h2))
            acc.expected_ties += geo_eq(a.rank.r1) / r2_hi;
        const std::uint64_t pass2 = a.rank.r2 - 1 + (a.key < x ? 1 : 0);
        if (a.rank.r1 < h1 || (a.rank.r1 == h1 && pass2 < h2)) {
            h1 = a.rank.r1;
            h2 = pass2;
        }
        if (h1 == 0 && h2 == 0) break;  // r2 draws start at 1
        cur = x < a.key ? a.left : a.right;
    }
}

}  // namespace

TieTrial tie_trial(const TrialPlan& plan, std::size_t trial_index) {
    if (plan.variant != RankVariant::uniform && plan.variant != RankVariant::zipzip)
        throw std::invalid_argument("tie measurement covers the uniform and zipzip variants");
    ZipTree t(policy_for(plan), KeyedRng(trial_seed(plan, trial_index), RngMode::keyed));
    TieTrial acc;
    for (Key k : trial_keys(plan, trial_index)) {
        add_conditional(t, k, t.policy(), acc);
        t.insert(k);
        ++acc.insertions;
    }
    acc.observed_ties = t.counters().full_rank_ties;
    acc.observed_comparisons = t.counters().rank_comparisons;
    return acc;
}

TieTrial tie_trials(const TrialPlan& plan) {
    std::vector<TieTrial> per(plan.trials);
    parallel_trials(plan.trials, [&](std::size_t i) { per[i] = tie_trial(plan, i); });
    TieTrial sum;
    for (const TieTrial& x : per) {
        sum.expected_ties += x.expected_ties;
        sum.expected_comparisons += x.expected_comparisons;
        sum.observed_ties += x.observed_ties;
        sum.observed_comparisons += x.observed_comparisons;
        sum.insertions += x.insertions;
    }
    return sum;
}

MetadataReport jit_trial(const TrialPlan& plan, std::size_t trial_index) {
    JitTree t(trial_seed(plan, trial_index));
    for (Key k : trial_keys(plan, trial_index)) t.insert(k);
    return metadata(t);
}

std::vector<MetadataReport> jit_trials(const TrialPlan& plan) {
    std::vector<MetadataReport> out(plan.trials);
    parallel_trials(plan.trials, [&](std::size_t i) { out[i] = jit_trial(plan, i); });
    return out;
}

double biased_heavy_depth(const BiasedPlan& plan) {
    double total = 0.0;
    std::vector<double> depths(plan.trials);
    parallel_trials(plan.trials, [&](std::size_t i) {
        const Key heavy = plan.heavy_key;
        const std::uint64_t w = plan.heavy_weight;
        RankPolicy policy = RankPolicy::biased(
            [heavy, w](Key k) { return k == heavy ? w : 1; }, plan.n, plan.c);
        const std::uint64_t seed =
            mix64(plan.master_seed, static_cast<std::uint64_t>(RankVariant::biased),
                  plan.n, static_cast<std::uint64_t>(i));
        ZipTree t(policy, KeyedRng(mix64(seed, w), RngMode::keyed));
        for (Key k = 0; k < plan.n; ++k) t.insert(k);
        depths[i] = static_cast<double>(t.search(heavy).depth);
    });
    for (double d : depths) total += d;
    return total / static_cast<double>(plan.trials);
}

std::string csv_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

namespace {

const char* kPalette[] = {"#1f6f8b", "#c0504d", "#4f8a10", "#7b5aa6", "#b8860b", "#444444"};

std::string fmt_tick(double v) {
    char buf[48];
    if (v != 0.0 && (std::fabs(v) >= 1e5 || std::fabs(v) < 1e-3))
        std::snprintf(buf, sizeof buf, "%.2e", v);
    else
        std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<double>& xs,
                           const std::vector<ChartSeries>& series, bool log2_x) {
    const double w = 720, h = 480, ml = 78, mr = 24, mt = 46, mb = 58;
    const double px = w - ml - mr, py = h - mt - mb;

    std::vector<double> tx(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        tx[i] = log2_x ? std::log2(std::max(xs[i], 1e-300)) : xs[i];

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!tx.empty()) {
        xmin = *std::min_element(tx.begin(), tx.end());
        xmax = *std::max_element(tx.begin(), tx.end());
    }
    bool have_y = false;
    for (const auto& s : series)
        for (double y : s.ys) {
            if (!have_y) {
                ymin = ymax = y;
                have_y = true;
            } else {
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double ypad = (ymax - ymin) * 0.06;
    ymin -= ypad;
    ymax += ypad;

    auto mx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * px; };
    auto my = [&](double y) { return mt + py - (y - ymin) / (ymax - ymin) * py; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
           "viewBox=\"0 0 720 480\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"720\" height=\"480\" fill=\"#ffffff\"/>\n";
    out += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title +
           "</text>\n";

    char buf[256];
    // frame and gridless tick marks: four per axis
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                  "stroke=\"#333\"/>\n",
                  ml, mt, px, py);
    out += buf;
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n",
                      mx(fx), mt + py, mx(fx), mt + py + 5, mx(fx), mt + py + 20,
                      (log2_x ? ("2^" + fmt_tick(fx)) : fmt_tick(fx)).c_str());
        out += buf;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%s</text>\n",
                      ml - 5, my(fy), ml, my(fy), ml - 9, my(fy) + 4, fmt_tick(fy).c_str());
        out += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n",
                  ml + px / 2, h - 14, x_label.c_str());
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"18\" y=\"%.1f\" text-anchor=\"middle\" transform=\"rotate(-90 "
                  "18 %.1f)\">%s</text>\n",
                  mt + py / 2, mt + py / 2, y_label.c_str());
    out += buf;

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof kPalette / sizeof *kPalette)];
        std::string pts;
        const std::size_t m = std::min(series[s].ys.size(), tx.size());
        for (std::size_t i = 0; i < m; ++i) {
            std::snprintf(buf, sizeof buf, "%.1f,%.1f ", mx(tx[i]), my(series[s].ys[i]));
            pts += buf;
        }
        out += "<polyline fill=\"none\" stroke-width=\"1.8\" stroke=\"" + std::string(color) +
               "\" points=\"" + pts + "\"/>\n";
        for (std::size_t i = 0; i < m; ++i) {
            std::snprintf(buf, sizeof buf,
                          "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"2.6\" fill=\"%s\"/>\n",
                          mx(tx[i]), my(series[s].ys[i]), color);
            out += buf;
        }
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"14\" height=\"4\" fill=\"%s\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                      ml + 10, mt + 12 + 18.0 * s, color, ml + 30, mt + 17 + 18.0 * s,
                      series[s].label.c_str());
        out += buf;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace zipzip
