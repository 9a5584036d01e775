#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "zipzip/rng.hpp"

namespace zipzip {

using Key = std::uint64_t;
using GeomRank = std::uint64_t;

// Composite rank. r2 == 0 means "no secondary rank": policies without a
// secondary rank leave it at 0 for every node, so comparisons degenerate to
// r1. Policies with a secondary rank draw r2 from [1, R], never 0.
struct RankPair {
    std::uint64_t r1 = 0;
    std::uint64_t r2 = 0;

    friend constexpr auto operator<=>(const RankPair&, const RankPair&) = default;
};

// Strict total order used everywhere a tree has to pick a winner between two
// (rank, key) pairs: higher rank wins, and a full rank tie goes to the
// smaller key.
constexpr bool dominates(const RankPair& rank_a, Key key_a,
                         const RankPair& rank_b, Key key_b) {
    if (rank_a != rank_b) return rank_a > rank_b;
    return key_a < key_b;
}

// Failures before the first success of repeated Bernoulli(p) trials. For
// moderate p the trials run literally, one per 64-bit draw, which keeps the
// distribution exact and lets tests script the stream. Below 1/64 the
// expected trial count makes the loop infeasible, so one draw is inverted
// through the geometric CDF instead; the distribution is the same up to
// double rounding.
template <class Urbg>
std::uint64_t gen_geometric(Urbg& rng, double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("gen_geometric: p must be in (0, 1)");
    if (p < 0.015625) {
        // u in (0, 1]; floor(log u / log(1-p)) counts the failures
        const double u =
            (static_cast<double>(rng() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
        return static_cast<std::uint64_t>(std::log(u) / std::log1p(-p));
    }
    // Success threshold on a full 64-bit word; clamp keeps p representable.
    const double scaled = p * 18446744073709551616.0;
    std::uint64_t threshold =
        scaled >= 18446744073709551615.0 ? ~0ULL : static_cast<std::uint64_t>(scaled);
    if (threshold == 0) threshold = 1;
    std::uint64_t failures = 0;
    while (rng() >= threshold) ++failures;
    return failures;
}

// Unbiased integer on [lo, hi] via masked rejection.
template <class Urbg>
std::uint64_t gen_uniform_rank(Urbg& rng, std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw std::invalid_argument("gen_uniform_rank: empty interval");
    if (lo == hi) return lo;
    const std::uint64_t span = hi - lo;
    if (span == ~0ULL) return rng();
    std::uint64_t mask = span;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    std::uint64_t draw;
    do {
        draw = rng() & mask;
    } while (draw > span);
    return lo + draw;
}

enum class RankVariant { original, uniform, zipzip, variable_p, biased };

const char* variant_name(RankVariant v);
RankVariant variant_from_name(const std::string& name);

// How ranks are drawn. n_cap is the capacity the secondary-rank range (and
// the uniform variant's range) is sized for; it is frozen when the policy is
// made, so a tree keeps one rank universe for its whole life.
struct RankPolicy {
    RankVariant variant = RankVariant::original;
    double p = 0.5;
    unsigned c = 3;
    std::uint64_t n_cap = 1ULL << 16;
    std::function<std::uint64_t(Key)> weight_fn;  // biased only, weights >= 1

    static RankPolicy original(double p = 0.5);
    static RankPolicy uniform(std::uint64_t n_cap, unsigned c = 3);
    static RankPolicy zipzip(std::uint64_t n_cap, unsigned c = 3);
    static RankPolicy variable_p(double p);
    static RankPolicy biased(std::function<std::uint64_t(Key)> weight_fn,
                             std::uint64_t n_cap, unsigned c = 3);

    bool has_r2() const {
        return variant == RankVariant::zipzip || variant == RankVariant::biased;
    }
    bool geometric_r1() const { return variant != RankVariant::uniform; }

    // [1, n_cap^c]; uniform variant only.
    std::uint64_t uniform_r1_hi() const;
    // [1, ceil(log2(n_cap)^c)]; policies with a secondary rank.
    std::uint64_t r2_hi() const;

    void validate() const;
};

enum class RngMode { fresh, keyed };

// Rank randomness source. In keyed mode a key's draws come from a stream
// derived purely from (master_seed, key), which is what makes tree shapes a
// function of the key set alone. Fresh mode consumes one shared stream.
struct KeyedRng {
    std::uint64_t master_seed = 0;
    RngMode mode = RngMode::keyed;
    Xoshiro256 stream;

    explicit KeyedRng(std::uint64_t seed = 0, RngMode m = RngMode::keyed)
        : master_seed(seed), mode(m), stream(mix64(seed, 0x73747265616dULL)) {}

    Xoshiro256 stream_for(Key key) const {
        return Xoshiro256(mix64(master_seed, key, 0x6b657965644bULL));
    }
};

// Draws a full rank pair for `key` under `policy`. Draw order within the
// key's stream is fixed (r1 first, then r2) so keyed streams are stable.
RankPair make_rank(const RankPolicy& policy, Key key, KeyedRng& rng);

}  // namespace zipzip
