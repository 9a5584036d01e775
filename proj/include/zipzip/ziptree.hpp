#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zipzip/engine.hpp"
#include "zipzip/ranks.hpp"

namespace zipzip {

// Aggregate shape description of one tree. Depths are 1-based (the root has
// depth 1) and per_key_depth is ordered by ascending key.
struct TreeStats {
    std::vector<std::pair<Key, std::uint32_t>> per_key_depth;
    std::uint32_t height = 0;  // 0 iff empty
    std::uint64_t root_r1 = 0;
    std::vector<std::uint32_t> rank_group_sizes;  // maximal same-r1 connected subtrees
};

// Binary search tree in key order, max-heap in rank order, rank ties going
// to the smaller key. Updates restructure only the search path: inserts
// unzip it, deletes zip the two child spines back together. Nodes live in a
// flat arena with index links; erased slots are recycled through a free
// list, so indices carry no meaning across updates.
class ZipTree {
  public:
    struct Node {
        Key key = 0;
        RankPair rank;
        std::uint32_t left = detail::kNull;
        std::uint32_t right = detail::kNull;
    };

    using SearchResult = detail::SearchResult;

    struct Counters {
        std::uint64_t rank_comparisons = 0;
        std::uint64_t full_rank_ties = 0;  // comparisons decided by the key tie-break
    };

    ZipTree(RankPolicy policy, KeyedRng rng);

    // Preset rank source; `shape` describes what the ranks look like so the
    // validators know which rules apply. Used by oracles and tests.
    ZipTree(RankPolicy shape, std::function<RankPair(Key)> rank_source);

    // False on duplicate. A rank is drawn exactly once per successful
    // insertion, after the duplicate check.
    bool insert(Key key);
    bool erase(Key key);
    SearchResult search(Key key) const;

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    const RankPolicy& policy() const { return policy_; }
    Counters& counters() const { return counters_; }

    std::uint32_t root_index() const { return root_; }
    const Node& node(std::uint32_t i) const { return nodes_[i]; }
    // Arena extent; valid indices are below this, though some may be free.
    std::size_t node_count_upper_bound() const { return nodes_.size(); }
    // Raw write access; exists so tests can corrupt a tree and prove the
    // validators notice.
    Node& mutable_node(std::uint32_t i) { return nodes_[i]; }

    // The unique tree for a set of (key, rank) pairs: dominance maximum on
    // top, recursively. Throws on duplicate keys. Pairs may arrive in any
    // key order.
    static ZipTree build_canonical(std::span<const std::pair<Key, RankPair>> pairs,
                                   RankPolicy shape = RankPolicy::original());

  private:
    friend struct ZipTreeView;

    std::uint32_t allocate(Key key, RankPair rank);
    void release(std::uint32_t i);

    RankPolicy policy_;
    KeyedRng rng_;
    std::function<RankPair(Key)> rank_source_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> free_;
    std::uint32_t root_ = detail::kNull;
    std::size_t size_ = 0;
    mutable Counters counters_;
};

// Structural audit: key order, dominance order on every edge (including the
// smaller-key tie rule), reachability matching size. Empty result means the
// tree is sound.
std::vector<std::string> validate(const ZipTree& tree);

TreeStats stats(const ZipTree& tree);

// Canonical text form, one node per line: pre-order, "(key,r1,r2)", children
// indented two spaces per level behind "L:"/"R:" markers. Equal strings mean
// equal trees.
std::string serialize(const ZipTree& tree);

// Verifies the tree is the search-tree image of its dual skip list: a key
// with first rank r occupies levels 0..r, and every node's same-r1 subtree
// members must sit exactly where the corresponding maximal level-r run says
// they should. Requires a geometric-r1 policy; throws otherwise.
bool check_skiplist_isomorphism(const ZipTree& tree);

}  // namespace zipzip
