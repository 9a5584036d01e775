// Experiment driver. Every command builds trees under a fixed master seed,
// aggregates in trial-index order and writes one CSV (and optionally one
// SVG chart) per run, so identical invocations produce identical bytes.

#include "CLI11.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zipzip/experiments.hpp"
#include "zipzip/verify.hpp"

namespace {

using namespace zipzip;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string variants;  // comma separated, empty = command default
    std::string n_spec;    // "4096", "256,1024" or "256..65536"
    std::size_t trials = 0;  // 0 = command default
    std::uint64_t seed = 1;
    unsigned c = 3;
    double p = 0.5;
    std::string order = "sequential";
    std::string out;  // path stem, extension added per format
    std::string format = "csv";
};

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

std::uint64_t parse_power_of_two(const std::string& tok) {
    std::uint64_t v = 0;
    try {
        std::size_t used = 0;
        v = std::stoull(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
        throw UsageError("--n: '" + tok + "' is not a number");
    }
    if (v == 0 || (v & (v - 1)) != 0)
        throw UsageError("--n: " + tok + " is not a power of two");
    return v;
}

// Accepts a single power of two, a comma list, or an inclusive range
// "lo..hi" that expands to every power of two between the endpoints.
std::vector<std::uint64_t> parse_n_list(const std::string& spec) {
    if (spec.empty()) {
        std::vector<std::uint64_t> def;
        for (std::uint64_t n = 1ULL << 8; n <= (1ULL << 16); n <<= 1) def.push_back(n);
        return def;
    }
    const auto dots = spec.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t lo = parse_power_of_two(spec.substr(0, dots));
        const std::uint64_t hi = parse_power_of_two(spec.substr(dots + 2));
        if (lo > hi) throw UsageError("--n: empty range " + spec);
        std::vector<std::uint64_t> ns;
        for (std::uint64_t n = lo; n <= hi; n <<= 1) ns.push_back(n);
        return ns;
    }
    std::vector<std::uint64_t> ns;
    for (const auto& tok : split_commas(spec)) ns.push_back(parse_power_of_two(tok));
    if (ns.empty()) throw UsageError("--n: no values in '" + spec + "'");
    return ns;
}

std::vector<RankVariant> parse_variants(const std::string& spec,
                                        const std::vector<RankVariant>& def,
                                        const std::vector<RankVariant>& allowed) {
    std::vector<RankVariant> out;
    if (spec.empty()) {
        out = def;
    } else {
        for (const auto& tok : split_commas(spec)) {
            try {
                out.push_back(variant_from_name(tok));
            } catch (const std::exception&) {
                throw UsageError("--variant: unknown variant '" + tok + "'");
            }
        }
    }
    for (RankVariant v : out) {
        bool ok = false;
        for (RankVariant a : allowed) ok = ok || a == v;
        if (!ok)
            throw UsageError(std::string("--variant: ") + variant_name(v) +
                             " is not supported by this command");
    }
    if (out.empty()) throw UsageError("--variant: empty list");
    return out;
}

InsertionOrder parse_order(const std::string& name) {
    try {
        return order_from_name(name);
    } catch (const std::exception&) {
        throw UsageError("--order: expected sequential or random, got '" + name + "'");
    }
}

std::string strip_known_extension(const std::string& path) {
    for (const char* ext : {".csv", ".svg"}) {
        const std::string e(ext);
        if (path.size() > e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0)
            return path.substr(0, path.size() - e.size());
    }
    return path;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << body;
    if (!f) throw std::runtime_error("short write to " + path);
}

// Writes the CSV and, when the command has a chart and the format asks for
// it, the SVG next to it. Returns the paths written for the status line.
std::vector<std::string> emit_outputs(const CommonOpts& opts, const std::string& default_stem,
                                      const std::string& csv, const std::string& svg) {
    const std::string stem =
        opts.out.empty() ? default_stem : strip_known_extension(opts.out);
    if (opts.format != "csv" && opts.format != "svg" && opts.format != "both")
        throw UsageError("--format: expected csv, svg or both, got '" + opts.format + "'");
    std::vector<std::string> written;
    if (opts.format == "csv" || opts.format == "both") {
        write_file(stem + ".csv", csv);
        written.push_back(stem + ".csv");
    }
    if (opts.format == "svg" || opts.format == "both") {
        if (svg.empty()) throw UsageError("--format: this command has no chart output");
        write_file(stem + ".svg", svg);
        written.push_back(stem + ".svg");
    }
    return written;
}

void add_common(CLI::App* sub, CommonOpts& o, bool with_p) {
    sub->add_option("--variant", o.variants, "comma separated variant list");
    sub->add_option("--n", o.n_spec, "tree sizes: N, N1,N2,... or LO..HI (powers of two)");
    sub->add_option("--trials", o.trials, "independent builds per (variant, n)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "master seed (default 1)");
    sub->add_option("--c", o.c, "secondary rank range exponent (default 3)")
        ->check(CLI::PositiveNumber);
    if (with_p)
        sub->add_option("--p", o.p, "geometric success probability (default 0.5)")
            ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
    sub->add_option("--order", o.order, "insertion order: sequential or random");
    sub->add_option("--out", o.out, "output path stem (default: command name)");
    sub->add_option("--format", o.format, "csv, svg or both (default csv)");
}

TrialPlan plan_from(const CommonOpts& o, RankVariant v, std::uint64_t n, std::size_t trials) {
    TrialPlan plan;
    plan.variant = v;
    plan.n = n;
    plan.trials = trials;
    plan.master_seed = o.seed;
    plan.c = o.c;
    plan.p = o.p;
    plan.order = parse_order(o.order);
    return plan;
}

void report_written(const std::vector<std::string>& paths) {
    for (const auto& p : paths) std::cout << "wrote " << p << "\n";
}

// ---- depth-discrepancy ----------------------------------------------------

int cmd_depth_discrepancy(const CommonOpts& opts) {
    const auto variants = parse_variants(
        opts.variants, {RankVariant::original, RankVariant::uniform, RankVariant::zipzip},
        {RankVariant::original, RankVariant::uniform, RankVariant::zipzip});
    const auto ns = parse_n_list(opts.n_spec);

    std::string csv =
        "variant,n,trials,seed,smallest_depth,largest_depth,"
        "smallest_over_log2n,largest_over_log2n\n";
    std::vector<double> xs(ns.begin(), ns.end());
    std::vector<ChartSeries> series;
    for (RankVariant v : variants) {
        ChartSeries lo{std::string(variant_name(v)) + " smallest", {}};
        ChartSeries hi{std::string(variant_name(v)) + " largest", {}};
        for (std::uint64_t n : ns) {
            // Small trees are cheap and noisy, so they default to more trials.
            const std::size_t trials =
                opts.trials ? opts.trials : (n <= 4096 ? 1000 : 100);
            const DepthSummary s = run_depth_summary(plan_from(opts, v, n, trials));
            csv += std::string(variant_name(v)) + "," + std::to_string(n) + "," +
                   std::to_string(trials) + "," + std::to_string(opts.seed) + "," +
                   csv_num(s.mean_depth_smallest) + "," + csv_num(s.mean_depth_largest) +
                   "," + csv_num(s.scaled_depth_smallest) + "," +
                   csv_num(s.scaled_depth_largest) + "\n";
            lo.ys.push_back(s.scaled_depth_smallest);
            hi.ys.push_back(s.scaled_depth_largest);
        }
        series.push_back(std::move(lo));
        series.push_back(std::move(hi));
    }
    const std::string svg = svg_line_chart("extreme key depths", "n", "depth / log2 n", xs,
                                           series, true);
    report_written(emit_outputs(opts, "depth-discrepancy", csv, svg));
    return kExitOk;
}

// ---- depth-height ----------------------------------------------------------

int cmd_depth_height(const CommonOpts& opts) {
    const auto variants = parse_variants(
        opts.variants, {RankVariant::original, RankVariant::uniform, RankVariant::zipzip},
        {RankVariant::original, RankVariant::uniform, RankVariant::zipzip,
         RankVariant::variable_p});
    const auto ns = parse_n_list(opts.n_spec);

    std::string csv =
        "variant,n,trials,seed,avg_depth,avg_height,avg_depth_over_log2n,"
        "avg_height_over_log2n\n";
    std::vector<double> xs(ns.begin(), ns.end());
    std::vector<ChartSeries> series;
    for (RankVariant v : variants) {
        ChartSeries depth{std::string(variant_name(v)) + " depth", {}};
        ChartSeries height{std::string(variant_name(v)) + " height", {}};
        for (std::uint64_t n : ns) {
            const std::size_t trials = opts.trials ? opts.trials : 100;
            const DepthSummary s = run_depth_summary(plan_from(opts, v, n, trials));
            csv += std::string(variant_name(v)) + "," + std::to_string(n) + "," +
                   std::to_string(trials) + "," + std::to_string(opts.seed) + "," +
                   csv_num(s.mean_depth_all) + "," + csv_num(s.mean_height) + "," +
                   csv_num(s.scaled_depth_all) + "," + csv_num(s.scaled_height) + "\n";
            depth.ys.push_back(s.scaled_depth_all);
            height.ys.push_back(s.scaled_height);
        }
        series.push_back(std::move(depth));
        series.push_back(std::move(height));
    }
    const std::string svg = svg_line_chart("average depth and height", "n",
                                           "value / log2 n", xs, series, true);
    report_written(emit_outputs(opts, "depth-height", csv, svg));
    return kExitOk;
}

// ---- rank-ties ---------------------------------------------------------------

int cmd_rank_ties(const CommonOpts& opts) {
    const auto variants =
        parse_variants(opts.variants, {RankVariant::uniform, RankVariant::zipzip},
                       {RankVariant::uniform, RankVariant::zipzip});
    const auto ns = parse_n_list(opts.n_spec);

    std::string csv =
        "variant,n,trials,seed,expected_ties,expected_comparisons,insertions,"
        "observed_ties,observed_comparisons,ties_per_comparison,ties_per_insertion\n";
    std::vector<double> xs(ns.begin(), ns.end());
    std::vector<ChartSeries> series;
    bool fit_ok = true;
    for (RankVariant v : variants) {
        ChartSeries line{std::string(variant_name(v)), {}};
        std::vector<std::pair<double, double>> pts;
        for (std::uint64_t n : ns) {
            const std::size_t trials = opts.trials ? opts.trials : 100;
            const TieTrial t = tie_trials(plan_from(opts, v, n, trials));
            const double per_cmp =
                t.expected_comparisons > 0 ? t.expected_ties / t.expected_comparisons : 0.0;
            const double per_ins =
                t.insertions > 0 ? t.expected_ties / static_cast<double>(t.insertions) : 0.0;
            csv += std::string(variant_name(v)) + "," + std::to_string(n) + "," +
                   std::to_string(trials) + "," + std::to_string(opts.seed) + "," +
                   csv_num(t.expected_ties) + "," + csv_num(t.expected_comparisons) + "," +
                   std::to_string(t.insertions) + "," + std::to_string(t.observed_ties) +
                   "," + std::to_string(t.observed_comparisons) + "," + csv_num(per_cmp) +
                   "," + csv_num(per_ins) + "\n";
            // The uniform rate decays polynomially in n, the zip-zip rate
            // polynomially in log n; each is fitted on its own scale.
            const double rate = v == RankVariant::uniform ? per_cmp : per_ins;
            line.ys.push_back(rate > 0 ? std::log2(rate) : 0.0);
            pts.emplace_back(static_cast<double>(n), rate);
        }
        series.push_back(std::move(line));
        if (ns.size() >= 3) {
            try {
                const XScale scale =
                    v == RankVariant::uniform ? XScale::log2_x : XScale::log2_log2_x;
                const FitResult fit = fit_loglog(pts, scale);
                std::cout << variant_name(v) << " tie rate: slope " << csv_num(fit.slope)
                          << " intercept " << csv_num(fit.intercept) << " r2 "
                          << csv_num(fit.r_squared)
                          << (v == RankVariant::uniform ? " (vs log2 n)"
                                                        : " (vs log2 log2 n)")
                          << "\n";
            } catch (const std::exception& e) {
                std::cout << variant_name(v) << " tie rate: fit failed (" << e.what()
                          << ")\n";
                fit_ok = false;
            }
        }
    }
    const std::string svg = svg_line_chart("rank tie rates", "n", "log2(tie rate)", xs,
                                           series, true);
    report_written(emit_outputs(opts, "rank-ties", csv, svg));
    return fit_ok ? kExitOk : kExitFailure;
}

// ---- jit-bits ----------------------------------------------------------------

int cmd_jit_bits(const CommonOpts& opts, bool order_given) {
    if (!opts.variants.empty() && opts.variants != "jit")
        throw UsageError("--variant: jit-bits only measures the jit variant");
    const auto ns = parse_n_list(opts.n_spec);
    std::vector<InsertionOrder> orders;
    if (order_given)
        orders.push_back(parse_order(opts.order));
    else
        orders = {InsertionOrder::sequential, InsertionOrder::random};

    std::string csv =
        "variant,n,trials,seed,order,r1_diff_bits_per_node,r2_bits_per_node,"
        "root_bits_per_node,bits_per_node\n";
    std::vector<double> xs(ns.begin(), ns.end());
    std::vector<ChartSeries> series;
    for (InsertionOrder ord : orders) {
        ChartSeries r2{std::string(order_name(ord)) + " r2 bits", {}};
        ChartSeries total{std::string(order_name(ord)) + " total bits", {}};
        for (std::uint64_t n : ns) {
            const std::size_t trials = opts.trials ? opts.trials : 100;
            TrialPlan plan = plan_from(opts, RankVariant::zipzip, n, trials);
            plan.order = ord;
            const auto reports = jit_trials(plan);
            double diff = 0, r2b = 0, rootb = 0, totb = 0;
            for (const MetadataReport& r : reports) {
                const double nn = static_cast<double>(r.n ? r.n : 1);
                diff += static_cast<double>(r.r1_diff_bits) / nn;
                r2b += static_cast<double>(r.r2_bits) / nn;
                rootb += static_cast<double>(r.root_bits) / nn;
                totb += r.bits_per_node;
            }
            const double k = static_cast<double>(reports.size());
            diff /= k, r2b /= k, rootb /= k, totb /= k;
            csv += std::string("jit,") + std::to_string(n) + "," + std::to_string(trials) +
                   "," + std::to_string(opts.seed) + "," + order_name(ord) + "," +
                   csv_num(diff) + "," + csv_num(r2b) + "," + csv_num(rootb) + "," +
                   csv_num(totb) + "\n";
            r2.ys.push_back(r2b);
            total.ys.push_back(totb);
        }
        series.push_back(std::move(r2));
        series.push_back(std::move(total));
    }
    const std::string svg = svg_line_chart("deferred rank metadata", "n", "bits per node",
                                           xs, series, true);
    report_written(emit_outputs(opts, "jit-bits", csv, svg));
    return kExitOk;
}

// ---- vary-p ------------------------------------------------------------------

int cmd_vary_p(const CommonOpts& opts, bool p_given) {
    if (!opts.variants.empty() && opts.variants != "variable_p")
        throw UsageError("--variant: vary-p always runs the variable_p variant");
    const auto ns = parse_n_list(opts.n_spec);
    const std::uint64_t n = *std::max_element(ns.begin(), ns.end());
    std::vector<double> ps;
    if (p_given)
        ps.push_back(opts.p);
    else
        ps = {1e-5, 1e-4, 2e-4, 1e-3, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999};

    std::string csv =
        "variant,n,trials,seed,p,avg_depth,avg_height,mean_root_r1,"
        "avg_depth_over_log2n,avg_height_over_log2n,root_r1_over_log2log2n\n";
    std::vector<double> xs;
    ChartSeries depth{"depth / log2 n", {}};
    ChartSeries height{"height / log2 n", {}};
    ChartSeries root{"root r1 / log2 log2 n", {}};
    for (double p : ps) {
        const std::size_t trials = opts.trials ? opts.trials : 100;
        CommonOpts o = opts;
        o.p = p;
        const DepthSummary s =
            run_depth_summary(plan_from(o, RankVariant::variable_p, n, trials));
        csv += std::string("variable_p,") + std::to_string(n) + "," +
               std::to_string(trials) + "," + std::to_string(opts.seed) + "," +
               csv_num(p) + "," + csv_num(s.mean_depth_all) + "," +
               csv_num(s.mean_height) + "," + csv_num(s.mean_root_r1) + "," +
               csv_num(s.scaled_depth_all) + "," + csv_num(s.scaled_height) + "," +
               csv_num(s.scaled_root_r1) + "\n";
        xs.push_back(-std::log2(p));
        depth.ys.push_back(s.scaled_depth_all);
        height.ys.push_back(s.scaled_height);
        root.ys.push_back(s.scaled_root_r1);
    }
    const std::string svg =
        svg_line_chart("geometric success probability sweep", "-log2(p)", "scaled value",
                       xs, {depth, height, root}, false);
    report_written(emit_outputs(opts, "vary-p", csv, svg));
    return kExitOk;
}

// ---- biased ------------------------------------------------------------------

int cmd_biased(const CommonOpts& opts) {
    if (!opts.variants.empty() && opts.variants != "biased")
        throw UsageError("--variant: this command always runs the biased variant");
    const auto ns = opts.n_spec.empty() ? std::vector<std::uint64_t>{1ULL << 14}
                                        : parse_n_list(opts.n_spec);

    struct Profile {
        const char* name;
        std::uint64_t weight;
    };
    std::string csv =
        "variant,n,trials,seed,profile,heavy_weight,total_weight,log2_weight_ratio,"
        "heavy_mean_depth\n";
    std::vector<ChartSeries> series;
    std::vector<double> xs;
    bool fits_ok = true;
    for (std::uint64_t n : ns) {
        const std::size_t trials = opts.trials ? opts.trials : 100;
        const double dn = static_cast<double>(n);
        const std::vector<Profile> profiles = {
            {"unit", 1},
            {"sqrt_n", static_cast<std::uint64_t>(std::llround(std::sqrt(dn)))},
            {"n", n},
            {"n_squared", n * n},
            // heavy weight equal to everyone else combined: ratio is constant
            {"half_total", n - 1},
        };
        ChartSeries line{"n = " + std::to_string(n), {}};
        std::vector<double> line_xs;
        std::vector<std::pair<double, double>> fit_pts;
        for (const Profile& prof : profiles) {
            BiasedPlan plan;
            plan.n = n;
            plan.trials = trials;
            plan.master_seed = opts.seed;
            plan.c = opts.c;
            plan.heavy_key = n / 2;
            plan.heavy_weight = prof.weight;
            const double depth = biased_heavy_depth(plan);
            const double total = static_cast<double>(prof.weight) + dn - 1.0;
            const double ratio = std::log2(total / static_cast<double>(prof.weight));
            csv += std::string("biased,") + std::to_string(n) + "," +
                   std::to_string(trials) + "," + std::to_string(opts.seed) + "," +
                   prof.name + "," + std::to_string(prof.weight) + "," + csv_num(total) +
                   "," + csv_num(ratio) + "," + csv_num(depth) + "\n";
            line_xs.push_back(ratio);
            line.ys.push_back(depth);
            const std::string pname(prof.name);
            if (pname == "sqrt_n" || pname == "n" || pname == "n_squared")
                fit_pts.emplace_back(ratio, depth);
        }
        // Chart shares one x axis; the per-n x values differ, so the series
        // are emitted per n with their own x vector joined below.
        if (xs.empty()) xs = line_xs;
        for (std::size_t i = 0; i < line_xs.size(); ++i)
            if (i < xs.size()) xs[i] = line_xs[i];
        series.push_back(std::move(line));
        try {
            const FitResult fit = fit_linear(fit_pts);
            std::cout << "n=" << n << " heavy key depth vs log2(W/w): slope "
                      << csv_num(fit.slope) << " intercept " << csv_num(fit.intercept)
                      << " r2 " << csv_num(fit.r_squared) << "\n";
        } catch (const std::exception& e) {
            std::cout << "n=" << n << " fit failed (" << e.what() << ")\n";
            fits_ok = false;
        }
    }
    const std::string svg = svg_line_chart("weighted key depth", "log2(W / w)",
                                           "heavy key mean depth", xs, series, false);
    report_written(emit_outputs(opts, "biased", csv, svg));
    return fits_ok ? kExitOk : kExitFailure;
}

// ---- hi-check ------------------------------------------------------------------

int cmd_hi_check(const CommonOpts& opts) {
    std::vector<Harness> targets;
    if (opts.variants.empty()) {
        targets = {Harness::original, Harness::uniform, Harness::zipzip, Harness::external,
                   Harness::persistent};
    } else {
        for (const auto& tok : split_commas(opts.variants)) {
            bool found = false;
            for (Harness h : all_harnesses())
                if (tok == harness_name(h)) {
                    targets.push_back(h);
                    found = true;
                }
            if (!found) throw UsageError("--variant: unknown harness '" + tok + "'");
        }
    }
    const std::size_t pairs = opts.trials ? opts.trials : 100;

    std::string text;
    bool all_ok = true;
    for (Harness h : targets) {
        if (h == Harness::jit) {
            text += "jit: exempt (deferred metadata depends on insertion history)\n";
            continue;
        }
        const CheckReport r = hi_sequence_pairs(h, pairs, opts.seed);
        if (r.ok()) {
            text += std::string(harness_name(h)) + ": pass (" + std::to_string(pairs) +
                    " pairs, " + std::to_string(r.checks) + " checks)\n";
        } else {
            all_ok = false;
            text += std::string(harness_name(h)) + ": FAIL " + r.violations.front() +
                    " (seed " + std::to_string(opts.seed) + ")\n";
        }
    }
    std::cout << text;
    if (!opts.out.empty()) write_file(strip_known_extension(opts.out) + ".txt", text);
    return all_ok ? kExitOk : kExitFailure;
}

// ---- validate ------------------------------------------------------------------

int cmd_validate(const CommonOpts& opts, std::uint64_t ops, bool inject_fault) {
    std::string text;
    bool all_ok = true;
    auto section = [&](const std::string& name, const CheckReport& r) {
        if (r.ok()) {
            text += name + ": pass (" + std::to_string(r.checks) + " checks)\n";
        } else {
            all_ok = false;
            text += name + ": FAIL (" + std::to_string(r.violations.size()) +
                    " violations)\n";
            for (const auto& v : r.violations) text += "  " + v + "\n";
        }
    };

    if (inject_fault) {
        // Negative control: corrupt a built tree and report what the audit
        // said. The run always fails, the message locates the fault.
        const CheckReport r =
            fuzz_harness(Harness::zipzip, std::min<std::uint64_t>(ops, 2000), opts.seed,
                         500, true);
        text += "fault injection:\n";
        for (const auto& v : r.violations) text += "  " + v + "\n";
        std::cout << text;
        if (!opts.out.empty()) write_file(strip_known_extension(opts.out) + ".txt", text);
        return kExitFailure;
    }

    for (Harness h : all_harnesses())
        section(std::string("fuzz ") + harness_name(h),
                fuzz_harness(h, ops, opts.seed, 1000, false));
    section("oracle exhaustive", oracle_exhaustive(6, false));
    section("oracle exhaustive with secondary ties", oracle_exhaustive(5, true));
    section("oracle randomized", oracle_randomized(50, 500, opts.seed));
    section("persistence exhaustive", persistence_exhaustive(5, 4, 30.0));
    section("persistence random", persistence_random(10, 1ULL << 12, opts.seed, 30.0));

    std::cout << text;
    if (!opts.out.empty()) write_file(strip_known_extension(opts.out) + ".txt", text);
    return all_ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zip tree experiment harness"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::uint64_t validate_ops = 20000;
    bool inject_fault = false;

    CLI::App* dd = app.add_subcommand("depth-discrepancy",
                                      "extreme key depths over many trials");
    add_common(dd, opts, true);
    CLI::App* dh = app.add_subcommand("depth-height", "average depth and height");
    add_common(dh, opts, true);
    CLI::App* rt = app.add_subcommand("rank-ties", "rank tie rates and decay slopes");
    add_common(rt, opts, true);
    CLI::App* jb = app.add_subcommand("jit-bits", "deferred rank metadata size");
    add_common(jb, opts, true);
    CLI::App* vp = app.add_subcommand("vary-p", "geometric success probability sweep");
    add_common(vp, opts, true);
    CLI::App* bi = app.add_subcommand("biased", "weighted key depth profiles");
    add_common(bi, opts, false);
    CLI::App* hi = app.add_subcommand("hi-check", "history independence pair checks");
    add_common(hi, opts, false);
    CLI::App* va = app.add_subcommand("validate", "structural audits and oracles");
    add_common(va, opts, false);
    va->add_option("--ops", validate_ops, "fuzz operations per harness")
        ->check(CLI::PositiveNumber);
    va->add_flag("--inject-fault", inject_fault,
                 "corrupt a tree on purpose and prove the audit notices")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (dd->parsed()) return cmd_depth_discrepancy(opts);
        if (dh->parsed()) return cmd_depth_height(opts);
        if (rt->parsed()) return cmd_rank_ties(opts);
        if (jb->parsed()) return cmd_jit_bits(opts, jb->count("--order") > 0);
        if (vp->parsed()) return cmd_vary_p(opts, vp->count("--p") > 0);
        if (bi->parsed()) return cmd_biased(opts);
        if (hi->parsed()) return cmd_hi_check(opts);
        if (va->parsed()) return cmd_validate(opts, validate_ops, inject_fault);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
