#include "zipzip/ziptree.hpp"

#include <algorithm>
#include <optional>

namespace zipzip {

using detail::kNull;

// Engine-facing adapter. Rank comparisons are funnelled through here so the
// tree can keep tie statistics without the engine knowing about them.
struct ZipTreeView {
    ZipTree& t;

    Key key(std::uint32_t i) const { return t.nodes_[i].key; }
    std::uint32_t left(std::uint32_t i) const { return t.nodes_[i].left; }
    std::uint32_t right(std::uint32_t i) const { return t.nodes_[i].right; }
    void set_left(std::uint32_t i, std::uint32_t v) { t.nodes_[i].left = v; }
    void set_right(std::uint32_t i, std::uint32_t v) { t.nodes_[i].right = v; }
    std::uint32_t root() const { return t.root_; }
    void set_root(std::uint32_t v) { t.root_ = v; }

    bool dominates(std::uint32_t a, std::uint32_t b) const {
        const ZipTree::Node& na = t.nodes_[a];
        const ZipTree::Node& nb = t.nodes_[b];
        ++t.counters_.rank_comparisons;
        if (na.rank == nb.rank) ++t.counters_.full_rank_ties;
        return zipzip::dominates(na.rank, na.key, nb.rank, nb.key);
    }
};

namespace {

struct ConstView {
    const ZipTree& t;
    Key key(std::uint32_t i) const { return t.node(i).key; }
    std::uint32_t left(std::uint32_t i) const { return t.node(i).left; }
    std::uint32_t right(std::uint32_t i) const { return t.node(i).right; }
    std::uint32_t root() const { return t.root_index(); }
};

}  // namespace

ZipTree::ZipTree(RankPolicy policy, KeyedRng rng)
    : policy_(std::move(policy)), rng_(rng) {
    policy_.validate();
}

ZipTree::ZipTree(RankPolicy shape, std::function<RankPair(Key)> rank_source)
    : policy_(std::move(shape)), rank_source_(std::move(rank_source)) {}

std::uint32_t ZipTree::allocate(Key key, RankPair rank) {
    std::uint32_t i;
    if (!free_.empty()) {
        i = free_.back();
        free_.pop_back();
        nodes_[i] = Node{};
    } else {
        i = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
    }
    nodes_[i].key = key;
    nodes_[i].rank = rank;
    return i;
}

void ZipTree::release(std::uint32_t i) { free_.push_back(i); }

bool ZipTree::insert(Key key) {
    ConstView cv{*this};
    if (detail::engine_contains(cv, key)) return false;
    // Drawing here rather than through a stored self-referential callable
    // keeps the tree safely movable.
    const RankPair rank =
        rank_source_ ? rank_source_(key) : make_rank(policy_, key, rng_);
    const std::uint32_t x = allocate(key, rank);
    ZipTreeView view{*this};
    detail::engine_insert_linked(view, x);
    ++size_;
    return true;
}

bool ZipTree::erase(Key key) {
    ZipTreeView view{*this};
    const std::uint32_t removed = detail::engine_erase(view, key);
    if (removed == kNull) return false;
    release(removed);
    --size_;
    return true;
}

ZipTree::SearchResult ZipTree::search(Key key) const {
    ConstView cv{*this};
    return detail::engine_search(cv, key);
}

ZipTree ZipTree::build_canonical(std::span<const std::pair<Key, RankPair>> pairs,
                                 RankPolicy shape) {
    std::vector<std::pair<Key, RankPair>> sorted(pairs.begin(), pairs.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].first == sorted[i - 1].first)
            throw std::invalid_argument("build_canonical: duplicate keys");

    ZipTree tree(std::move(shape), [](Key) -> RankPair {
        throw std::logic_error("canonical tree has no rank source");
    });
    // Left-to-right spine construction: each new key displaces the maximal
    // suffix of the right spine it dominates and adopts it as a left child.
    // Equal ranks keep the earlier (smaller) key on top, which is exactly
    // the tie rule, so the result equals the recursive dominance-maximum
    // definition.
    std::vector<std::uint32_t> spine;
    for (const auto& [key, rank] : sorted) {
        const std::uint32_t x = tree.allocate(key, rank);
        std::uint32_t adopted = kNull;
        while (!spine.empty()) {
            const Node& top = tree.nodes_[spine.back()];
            if (!dominates(rank, key, top.rank, top.key)) break;
            adopted = spine.back();
            spine.pop_back();
        }
        tree.nodes_[x].left = adopted;
        if (spine.empty())
            tree.root_ = x;
        else
            tree.nodes_[spine.back()].right = x;
        spine.push_back(x);
        ++tree.size_;
    }
    return tree;
}

std::vector<std::string> validate(const ZipTree& tree) {
    std::vector<std::string> violations;
    const std::uint32_t root = tree.root_index();
    if (root == kNull) {
        if (tree.size() != 0) violations.push_back("empty root but nonzero size");
        return violations;
    }

    struct Frame {
        std::uint32_t idx;
        std::optional<Key> lo, hi;  // open interval the subtree must stay in
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
        const ZipTree::Node& n = tree.node(f.idx);
        if (f.lo && !(n.key > *f.lo))
            violations.push_back("key order violated at key " + std::to_string(n.key));
        if (f.hi && !(n.key < *f.hi))
            violations.push_back("key order violated at key " + std::to_string(n.key));
        for (const std::uint32_t child : {n.left, n.right}) {
            if (child == kNull) continue;
            const ZipTree::Node& cn = tree.node(child);
            if (!dominates(n.rank, n.key, cn.rank, cn.key))
                violations.push_back("dominance violated at key " + std::to_string(cn.key) +
                                     " under key " + std::to_string(n.key));
        }
        if (n.left != kNull) stack.push_back({n.left, f.lo, n.key});
        if (n.right != kNull) stack.push_back({n.right, n.key, f.hi});
    }
    if (visited != tree.size())
        violations.push_back("reachable nodes " + std::to_string(visited) +
                             " do not match size " + std::to_string(tree.size()));
    return violations;
}

TreeStats stats(const ZipTree& tree) {
    TreeStats out;
    const std::uint32_t root = tree.root_index();
    if (root == kNull) return out;
    out.root_r1 = tree.node(root).rank.r1;
    out.per_key_depth.reserve(tree.size());

    // In-order walk yields per-key depths already sorted by key.
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

    // Group pass: a node joins its parent's group iff their r1 agree.
    {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> stack;  // (idx, group)
        out.rank_group_sizes.push_back(0);
        stack.push_back({root, 0});
        while (!stack.empty()) {
            const auto [idx, group] = stack.back();
            stack.pop_back();
            ++out.rank_group_sizes[group];
            const ZipTree::Node& n = tree.node(idx);
            for (const std::uint32_t child : {n.left, n.right}) {
                if (child == kNull) continue;
                if (tree.node(child).rank.r1 == n.rank.r1) {
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

std::string serialize(const ZipTree& tree) {
    std::string out;
    if (tree.root_index() == kNull) return out;
    struct Frame {
        std::uint32_t idx;
        std::uint32_t depth;
        char side;  // 0 root, 'L', 'R'
    };
    std::vector<Frame> stack{{tree.root_index(), 0, 0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const ZipTree::Node& n = tree.node(f.idx);
        out.append(2 * f.depth, ' ');
        if (f.side) {
            out.push_back(f.side);
            out.push_back(':');
        }
        out.push_back('(');
        out += std::to_string(n.key);
        out.push_back(',');
        out += std::to_string(n.rank.r1);
        out.push_back(',');
        out += std::to_string(n.rank.r2);
        out += ")\n";
        // Right pushed first so the left subtree pops first (pre-order).
        if (n.right != kNull) stack.push_back({n.right, f.depth + 1, 'R'});
        if (n.left != kNull) stack.push_back({n.left, f.depth + 1, 'L'});
    }
    return out;
}

bool check_skiplist_isomorphism(const ZipTree& tree) {
    if (!tree.policy().geometric_r1())
        throw std::invalid_argument(
            "skip list correspondence requires a geometric first rank");
    if (!validate(tree).empty()) return false;
    if (tree.root_index() == kNull) return true;

    // In-order positions; pos[i] also records each node's arena index so the
    // subtree walk below can map back.
    std::vector<std::uint32_t> order;      // arena indices, ascending key
    std::vector<std::uint32_t> pos_of;     // arena index -> in-order position
    std::vector<std::uint32_t> parent_of;  // arena index -> parent arena index
    {
        order.reserve(tree.size());
        parent_of.assign(tree.node_count_upper_bound(), kNull);
        std::vector<std::uint32_t> stack;
        std::uint32_t cur = tree.root_index();
        while (cur != kNull || !stack.empty()) {
            while (cur != kNull) {
                stack.push_back(cur);
                const std::uint32_t l = tree.node(cur).left;
                if (l != kNull) parent_of[l] = cur;
                const std::uint32_t r = tree.node(cur).right;
                if (r != kNull) parent_of[r] = cur;
                cur = l;
            }
            cur = stack.back();
            stack.pop_back();
            order.push_back(cur);
            cur = tree.node(cur).right;
        }
        pos_of.assign(tree.node_count_upper_bound(), 0);
        for (std::uint32_t p = 0; p < order.size(); ++p) pos_of[order[p]] = p;
    }
    const auto r1_at = [&](std::uint32_t p) { return tree.node(order[p]).rank.r1; };
    const std::uint32_t n = static_cast<std::uint32_t>(order.size());
    const bool suffix_rule = !tree.policy().has_r2();

    for (std::uint32_t p = 0; p < n; ++p) {
        const std::uint32_t v = order[p];
        const std::uint64_t r = tree.node(v).rank.r1;

        // The maximal run: level-r keys around p, cut off by any key of
        // level above r. Keys of lower rank in between are invisible at
        // level r.
        std::vector<std::uint32_t> run;  // positions, ascending
        {
            std::uint32_t q = p;
            std::vector<std::uint32_t> left_part;
            while (q > 0) {
                --q;
                if (r1_at(q) > r) break;
                if (r1_at(q) == r) left_part.push_back(q);
            }
            run.assign(left_part.rbegin(), left_part.rend());
            run.push_back(p);
            for (std::uint32_t q2 = p + 1; q2 < n; ++q2) {
                if (r1_at(q2) > r) break;
                if (r1_at(q2) == r) run.push_back(q2);
            }
        }

        // Same-r1 members of v's subtree. Dominance order (already checked)
        // means they form a connected crown under v, so the walk prunes at
        // any child of lower r1.
        std::vector<std::uint32_t> members;  // positions
        {
            std::vector<std::uint32_t> stack{v};
            while (!stack.empty()) {
                const std::uint32_t i = stack.back();
                stack.pop_back();
                members.push_back(pos_of[i]);
                for (const std::uint32_t child :
                     {tree.node(i).left, tree.node(i).right}) {
                    if (child != kNull && tree.node(child).rank.r1 == r)
                        stack.push_back(child);
                }
            }
            std::sort(members.begin(), members.end());
        }

        // Members must be a contiguous slice of the run containing p; a
        // group top must own the whole run; without secondary ranks the
        // slice must be exactly the suffix starting at p.
        const auto it = std::find(run.begin(), run.end(), members.front());
        if (it == run.end()) return false;
        const std::size_t offset = static_cast<std::size_t>(it - run.begin());
        if (offset + members.size() > run.size()) return false;
        for (std::size_t k = 0; k < members.size(); ++k)
            if (run[offset + k] != members[k]) return false;

        const std::uint32_t par = parent_of[v];
        const bool group_top = par == kNull || tree.node(par).rank.r1 != r;
        if (group_top && members.size() != run.size()) return false;
        if (suffix_rule) {
            if (members.front() != p) return false;
            if (offset + members.size() != run.size()) return false;
        }
    }
    return true;
}

}  // namespace zipzip
