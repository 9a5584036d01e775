#include "zipzip/jit.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <optional>

namespace zipzip {

using detail::kNull;

struct JitView {
    JitTree& t;

    Key key(std::uint32_t i) const { return t.nodes_[i].key; }
    std::uint32_t left(std::uint32_t i) const { return t.nodes_[i].left; }
    std::uint32_t right(std::uint32_t i) const { return t.nodes_[i].right; }
    void set_left(std::uint32_t i, std::uint32_t j) { t.nodes_[i].left = j; }
    void set_right(std::uint32_t i, std::uint32_t j) { t.nodes_[i].right = j; }
    std::uint32_t root() const { return t.root_; }
    void set_root(std::uint32_t j) { t.root_ = j; }

    // Strict order on (r1, fraction). An open fraction comparison is closed
    // on the spot by growing both strings, so callers always get an answer
    // and repeated calls on the same pair are stable.
    bool dominates(std::uint32_t a, std::uint32_t b) {
        JitNode& x = t.nodes_[a];
        JitNode& y = t.nodes_[b];
        if (x.r1 != y.r1) return x.r1 > y.r1;
        BitOrder o = compare_bits(x.r2, y.r2);
        if (o == BitOrder::tie) {
            resolve_tie(x, y, t.rng_);
            o = compare_bits(x.r2, y.r2);
        }
        return o == BitOrder::greater;
    }
};

namespace {

struct JitSearchView {
    const JitTree& t;
    Key key(std::uint32_t i) const { return t.node(i).key; }
    std::uint32_t left(std::uint32_t i) const { return t.node(i).left; }
    std::uint32_t right(std::uint32_t i) const { return t.node(i).right; }
    std::uint32_t root() const { return t.root_index(); }
};

}  // namespace

JitTree::JitTree(std::uint64_t seed) : rng_(mix64(seed, 0x6a6974ULL)) {}

std::uint32_t JitTree::allocate(Key key, std::uint64_t r1) {
    std::uint32_t i;
    if (!free_.empty()) {
        i = free_.back();
        free_.pop_back();
    } else {
        i = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
    }
    nodes_[i] = JitNode{key, r1, {}, kNull, kNull};
    return i;
}

void JitTree::release(std::uint32_t i) {
    nodes_[i] = JitNode{};
    free_.push_back(i);
}

bool JitTree::insert(Key key) {
    JitSearchView probe{*this};
    if (detail::engine_contains(probe, key)) return false;
    const std::uint64_t r1 = gen_geometric(rng_, 0.5);
    const std::uint32_t x = allocate(key, r1);
    JitView view{*this};
    detail::engine_insert_linked(view, x);
    ++size_;
    return true;
}

bool JitTree::erase(Key key) {
    JitView view{*this};
    const std::uint32_t gone = detail::engine_erase(view, key);
    if (gone == kNull) return false;
    release(gone);
    --size_;
    return true;
}

detail::SearchResult JitTree::search(Key key) const {
    JitSearchView view{*this};
    return detail::engine_search(view, key);
}

MetadataReport metadata(const JitTree& tree) {
    MetadataReport r;
    r.n = tree.size();
    const std::uint32_t root = tree.root_index();
    if (root == kNull) return r;
    r.root_bits = std::bit_width(tree.node(root).r1 + 1);

    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
        const std::uint32_t idx = stack.back();
        stack.pop_back();
        const JitNode& n = tree.node(idx);
        r.r2_bits += n.r2.size();
        for (const std::uint32_t child : {n.left, n.right}) {
            if (child == kNull) continue;
            const std::uint64_t d = n.r1 - tree.node(child).r1;
            r.raw_r1_diff_sum += d;
            r.r1_diff_bits += d + 1;
            stack.push_back(child);
        }
    }
    r.bits_per_node =
        static_cast<double>(r.r1_diff_bits + r.r2_bits + r.root_bits) / static_cast<double>(r.n);
    return r;
}

std::string metadata_csv_header() { return "n,r1_diff_bits,r2_bits,root_bits,bits_per_node"; }

std::string metadata_csv_row(const MetadataReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%llu,%llu,%.6f", r.n,
                  static_cast<unsigned long long>(r.r1_diff_bits),
                  static_cast<unsigned long long>(r.r2_bits),
                  static_cast<unsigned long long>(r.root_bits), r.bits_per_node);
    return buf;
}

std::vector<std::string> validate(const JitTree& tree) {
    std::vector<std::string> violations;
    const std::uint32_t root = tree.root_index();
    if (root == kNull) {
        if (tree.size() != 0) violations.push_back("empty root but nonzero size");
        return violations;
    }

    struct Frame {
        std::uint32_t idx;
        std::optional<Key> lo, hi;
    };
    std::vector<Frame> stack{{root, std::nullopt, std::nullopt}};
    std::size_t visited = 0;

    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (++visited > tree.size()) {
            violations.push_back("reachable nodes exceed size (cycle or stale count)");
            return violations;
        }
        const JitNode& n = tree.node(f.idx);
        if (f.lo && !(n.key > *f.lo))
            violations.push_back("key order violated at key " + std::to_string(n.key));
        if (f.hi && !(n.key < *f.hi))
            violations.push_back("key order violated at key " + std::to_string(n.key));
        for (const std::uint32_t child : {n.left, n.right}) {
            if (child == kNull) continue;
            const JitNode& cn = tree.node(child);
            if (n.r1 < cn.r1) {
                violations.push_back("rank order violated at key " + std::to_string(cn.key));
            } else if (n.r1 == cn.r1) {
                switch (compare_bits(n.r2, cn.r2)) {
                    case BitOrder::greater:
                        break;
                    case BitOrder::less:
                        violations.push_back("fraction order violated at key " +
                                             std::to_string(cn.key));
                        break;
                    case BitOrder::tie:
                        violations.push_back("unresolved fraction tie at key " +
                                             std::to_string(cn.key));
                        break;
                }
            }
        }
        if (n.left != kNull) stack.push_back({n.left, f.lo, n.key});
        if (n.right != kNull) stack.push_back({n.right, n.key, f.hi});
    }
    if (visited != tree.size())
        violations.push_back("reachable nodes " + std::to_string(visited) +
                             " do not match size " + std::to_string(tree.size()));
    return violations;
}

TreeStats stats(const JitTree& tree) {
    TreeStats out;
    const std::uint32_t root = tree.root_index();
    if (root == kNull) return out;
    out.root_r1 = tree.node(root).r1;
    out.per_key_depth.reserve(tree.size());

    {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> stack;  // (idx, depth)
        std::uint32_t cur = root;
        std::uint32_t depth = 1;
        while (cur != kNull || !stack.empty()) {
            while (cur != kNull) {
                stack.push_back({cur, depth});
                cur = tree.node(cur).left;
                ++depth;
            }
            const auto [idx, d] = stack.back();
            stack.pop_back();
            out.per_key_depth.push_back({tree.node(idx).key, d});
            out.height = std::max(out.height, d);
            cur = tree.node(idx).right;
            depth = d + 1;
        }
    }

    {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> stack;  // (idx, group)
        out.rank_group_sizes.push_back(0);
        stack.push_back({root, 0});
        while (!stack.empty()) {
            const auto [idx, group] = stack.back();
            stack.pop_back();
            ++out.rank_group_sizes[group];
            const JitNode& n = tree.node(idx);
            for (const std::uint32_t child : {n.left, n.right}) {
                if (child == kNull) continue;
                if (tree.node(child).r1 == n.r1) {
                    stack.push_back({child, group});
                } else {
                    stack.push_back(
                        {child, static_cast<std::uint32_t>(out.rank_group_sizes.size())});
                    out.rank_group_sizes.push_back(0);
                }
            }
        }
        std::sort(out.rank_group_sizes.begin(), out.rank_group_sizes.end());
    }
    return out;
}

}  // namespace zipzip
