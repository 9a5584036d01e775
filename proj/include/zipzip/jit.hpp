#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "zipzip/engine.hpp"
#include "zipzip/ranks.hpp"
#include "zipzip/rng.hpp"
#include "zipzip/ziptree.hpp"

namespace zipzip {

// Append-only string of tie-breaking bits, read as a binary fraction
// 0.b0 b1 b2 ...
class BitString {
public:
    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    bool bit(std::size_t i) const { return bits_[i]; }
    void push_back(bool b) { bits_.push_back(b); }
    std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (bool b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }
    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<bool> bits_;
};

enum class BitOrder { less, tie, greater };

// First differing bit decides. If the strings agree for as long as both are
// defined (one a prefix of the other, or equal), the order is still open:
// future bits could land either way.
inline BitOrder compare_bits(const BitString& a, const BitString& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.bit(i) != b.bit(i)) return a.bit(i) ? BitOrder::greater : BitOrder::less;
    }
    return BitOrder::tie;
}

struct JitNode {
    Key key = 0;
    std::uint64_t r1 = 0;
    BitString r2;
    std::uint32_t left = detail::kNull;
    std::uint32_t right = detail::kNull;
};

// Grows both strings, one fresh bit each per round (a draws first, low bit of
// the draw), until the fraction comparison is strict. Only legal on a pair
// that is currently tied.
template <class Urbg>
void resolve_tie(JitNode& a, JitNode& b, Urbg& rng) {
    if (a.r1 != b.r1 || compare_bits(a.r2, b.r2) != BitOrder::tie)
        throw std::logic_error("resolve_tie: pair is already ordered");
    do {
        a.r2.push_back(rng() & 1u);
        b.r2.push_back(rng() & 1u);
    } while (compare_bits(a.r2, b.r2) == BitOrder::tie);
}

class JitTree {
public:
    explicit JitTree(std::uint64_t seed);

    bool insert(Key key);
    bool erase(Key key);
    detail::SearchResult search(Key key) const;

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    std::uint32_t root_index() const { return root_; }
    const JitNode& node(std::uint32_t i) const { return nodes_[i]; }
    std::size_t node_count_upper_bound() const { return nodes_.size(); }
    // test hook
    JitNode& mutable_node(std::uint32_t i) { return nodes_[i]; }

private:
    friend struct JitView;

    std::uint32_t allocate(Key key, std::uint64_t r1);
    void release(std::uint32_t i);

    std::vector<JitNode> nodes_;
    std::vector<std::uint32_t> free_;
    std::uint32_t root_ = detail::kNull;
    std::size_t size_ = 0;
    Xoshiro256 rng_;
};

// Accounting view of the rank bits a tree would need on disk: first ranks as
// unary parent-relative differences (difference d costs d+1 bits), the root's
// absolute rank charged once, plus every stored tie-breaking bit.
struct MetadataReport {
    std::size_t n = 0;
    std::uint64_t r1_diff_bits = 0;
    std::uint64_t r2_bits = 0;
    std::uint64_t root_bits = 0;
    // Plain sum of the differences, before unary framing, so alternative
    // encodings can be costed from the same run.
    std::uint64_t raw_r1_diff_sum = 0;
    double bits_per_node = 0.0;
};

MetadataReport metadata(const JitTree& tree);
std::string metadata_csv_header();
std::string metadata_csv_row(const MetadataReport& r);

std::vector<std::string> validate(const JitTree& tree);
TreeStats stats(const JitTree& tree);

}  // namespace zipzip
