#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zipzip/engine.hpp"
#include "zipzip/ranks.hpp"

namespace zipzip {

// Leaf-oriented layout: items live in unranked external nodes; each internal
// node carries a routing key equal to the item right after it in symmetric
// order (the smallest item of its right subtree). The smallest item is the
// one key no internal node routes.
struct ExtNode {
    bool internal = false;
    Key key = 0;  // routing key when internal, item key when external
    RankPair rank;
    std::uint32_t left = detail::kNull;
    std::uint32_t right = detail::kNull;
};

class ExtTree {
public:
    ExtTree(RankPolicy policy, KeyedRng rng);

    bool insert(Key key);
    bool erase(Key key);
    // walks to an external node no matter what; depth counts every node on
    // the path, external included
    detail::SearchResult search(Key key) const;

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    const RankPolicy& policy() const { return policy_; }

    std::uint32_t root_index() const { return root_; }
    const ExtNode& node(std::uint32_t i) const { return nodes_[i]; }
    std::size_t node_count_upper_bound() const { return nodes_.size(); }
    // test hook
    ExtNode& mutable_node(std::uint32_t i) { return nodes_[i]; }

    // smallest item key; tree must not be empty
    Key min_key() const;

private:
    std::uint32_t allocate(const ExtNode& n);
    void release(std::uint32_t i);
    std::uint32_t zip_merge(std::uint32_t left, std::uint32_t right);

    std::vector<ExtNode> nodes_;
    std::vector<std::uint32_t> free_;
    std::uint32_t root_ = detail::kNull;
    std::size_t size_ = 0;
    RankPolicy policy_;
    KeyedRng rng_;
};

std::vector<std::string> validate(const ExtTree& tree);
std::string serialize(const ExtTree& tree);

}  // namespace zipzip
