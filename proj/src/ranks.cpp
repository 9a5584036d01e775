#include "zipzip/ranks.hpp"

#include <bit>
#include <cmath>

namespace zipzip {

const char* variant_name(RankVariant v) {
    switch (v) {
        case RankVariant::original: return "original";
        case RankVariant::uniform: return "uniform";
        case RankVariant::zipzip: return "zipzip";
        case RankVariant::variable_p: return "variable_p";
        case RankVariant::biased: return "biased";
    }
    return "unknown";
}

RankVariant variant_from_name(const std::string& name) {
    if (name == "original") return RankVariant::original;
    if (name == "uniform") return RankVariant::uniform;
    if (name == "zipzip") return RankVariant::zipzip;
    if (name == "variable_p") return RankVariant::variable_p;
    if (name == "biased") return RankVariant::biased;
    throw std::invalid_argument("unknown variant: " + name);
}

RankPolicy RankPolicy::original(double p) {
    RankPolicy policy;
    policy.variant = RankVariant::original;
    policy.p = p;
    policy.validate();
    return policy;
}

RankPolicy RankPolicy::uniform(std::uint64_t n_cap, unsigned c) {
    RankPolicy policy;
    policy.variant = RankVariant::uniform;
    policy.n_cap = n_cap;
    policy.c = c;
    policy.validate();
    return policy;
}

RankPolicy RankPolicy::zipzip(std::uint64_t n_cap, unsigned c) {
    RankPolicy policy;
    policy.variant = RankVariant::zipzip;
    policy.n_cap = n_cap;
    policy.c = c;
    policy.validate();
    return policy;
}

RankPolicy RankPolicy::variable_p(double p) {
    RankPolicy policy;
    policy.variant = RankVariant::variable_p;
    policy.p = p;
    policy.validate();
    return policy;
}

RankPolicy RankPolicy::biased(std::function<std::uint64_t(Key)> weight_fn,
                              std::uint64_t n_cap, unsigned c) {
    RankPolicy policy;
    policy.variant = RankVariant::biased;
    policy.weight_fn = std::move(weight_fn);
    policy.n_cap = n_cap;
    policy.c = c;
    policy.validate();
    return policy;
}

std::uint64_t RankPolicy::uniform_r1_hi() const {
    // n_cap^c, guarded against overflow; validate() enforces the bound.
    std::uint64_t hi = 1;
    for (unsigned i = 0; i < c; ++i) {
        if (n_cap != 0 && hi > (1ULL << 62) / n_cap)
            throw std::invalid_argument("uniform rank range overflows: n_cap^c too large");
        hi *= n_cap;
    }
    return hi;
}

std::uint64_t RankPolicy::r2_hi() const {
    const double bits = std::log2(static_cast<double>(n_cap < 2 ? 2 : n_cap));
    const double range = std::ceil(std::pow(bits, static_cast<double>(c)));
    if (range >= 9.2e18)
        throw std::invalid_argument("secondary rank range overflows: log2(n_cap)^c too large");
    return range < 1.0 ? 1 : static_cast<std::uint64_t>(range);
}

void RankPolicy::validate() const {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("rank policy: p must be in (0, 1)");
    if (c < 1) throw std::invalid_argument("rank policy: c must be >= 1");
    if (n_cap < 1) throw std::invalid_argument("rank policy: n_cap must be >= 1");
    if (variant == RankVariant::uniform) uniform_r1_hi();
    if (has_r2()) r2_hi();
    if (variant == RankVariant::biased && !weight_fn)
        throw std::invalid_argument("rank policy: biased variant needs a weight_fn");
}

namespace {

RankPair draw_rank(const RankPolicy& policy, Key key, Xoshiro256& stream) {
    RankPair rank;
    switch (policy.variant) {
        case RankVariant::original:
        case RankVariant::variable_p:
            rank.r1 = gen_geometric(stream, policy.p);
            break;
        case RankVariant::uniform:
            rank.r1 = gen_uniform_rank(stream, 1, policy.uniform_r1_hi());
            break;
        case RankVariant::zipzip:
            rank.r1 = gen_geometric(stream, policy.p);
            rank.r2 = gen_uniform_rank(stream, 1, policy.r2_hi());
            break;
        case RankVariant::biased: {
            if (!policy.weight_fn)
                throw std::invalid_argument("make_rank: biased policy without weight_fn");
            const std::uint64_t w = policy.weight_fn(key);
            if (w < 1)
                throw std::invalid_argument("make_rank: missing or zero weight for key");
            // floor(log2 w) is the weight's bit length minus one, exact for
            // all 64-bit integers.
            rank.r1 = static_cast<std::uint64_t>(std::bit_width(w) - 1) +
                      gen_geometric(stream, policy.p);
            rank.r2 = gen_uniform_rank(stream, 1, policy.r2_hi());
            break;
        }
    }
    return rank;
}

}  // namespace

RankPair make_rank(const RankPolicy& policy, Key key, KeyedRng& rng) {
    if (rng.mode == RngMode::keyed) {
        Xoshiro256 stream = rng.stream_for(key);
        return draw_rank(policy, key, stream);
    }
    return draw_rank(policy, key, rng.stream);
}

}  // namespace zipzip
