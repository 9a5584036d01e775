#include "zipzip/external.hpp"

#include <stdexcept>
#include <utility>

namespace zipzip {

using detail::kNull;

ExtTree::ExtTree(RankPolicy policy, KeyedRng rng)
    : policy_(std::move(policy)), rng_(std::move(rng)) {
    policy_.validate();
}

std::uint32_t ExtTree::allocate(const ExtNode& n) {
    std::uint32_t i;
    if (!free_.empty()) {
        i = free_.back();
        free_.pop_back();
    } else {
        i = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
    }
    nodes_[i] = n;
    return i;
}

void ExtTree::release(std::uint32_t i) {
    nodes_[i] = ExtNode{};
    free_.push_back(i);
}

Key ExtTree::min_key() const {
    if (root_ == kNull) throw std::logic_error("min_key on empty tree");
    std::uint32_t cur = root_;
    while (nodes_[cur].internal) cur = nodes_[cur].left;
    return nodes_[cur].key;
}

detail::SearchResult ExtTree::search(Key key) const {
    detail::SearchResult r;
    std::uint32_t cur = root_;
    while (cur != kNull) {
        ++r.depth;
        const ExtNode& n = nodes_[cur];
        if (!n.internal) {
            r.found = n.key == key;
            return r;
        }
        cur = key < n.key ? n.left : n.right;
    }
    return r;
}

bool ExtTree::insert(Key key) {
    if (root_ == kNull) {
        root_ = allocate(ExtNode{false, key, {}, kNull, kNull});
        size_ = 1;
        return true;
    }
    if (search(key).found) return false;

    // A new item brings one new internal node. Normally it routes the item
    // itself; a new smallest item instead displaces the old minimum into the
    // routing slot, so the rank is drawn for the key actually routed.
    const bool new_smallest = key < min_key();
    const Key route_key = new_smallest ? min_key() : key;
    const RankPair rank = make_rank(policy_, route_key, rng_);

    std::uint32_t prev = kNull;
    std::uint32_t cur = root_;
    while (nodes_[cur].internal &&
           dominates(nodes_[cur].rank, nodes_[cur].key, rank, route_key)) {
        prev = cur;
        cur = key < nodes_[cur].key ? nodes_[cur].left : nodes_[cur].right;
    }

    const std::uint32_t v = allocate(ExtNode{true, route_key, rank, kNull, kNull});
    if (prev == kNull)
        root_ = v;
    else if (key < nodes_[prev].key)
        nodes_[prev].left = v;
    else
        nodes_[prev].right = v;

    // Split the displaced search path into the chain of smaller routing keys
    // (linked by right children) and larger ones (linked by left children),
    // ending at the external node the search would have reached.
    std::uint32_t p_top = kNull, p_bot = kNull;
    std::uint32_t q_top = kNull, q_bot = kNull;
    while (nodes_[cur].internal) {
        if (nodes_[cur].key < key) {
            if (p_top == kNull)
                p_top = cur;
            else
                nodes_[p_bot].right = cur;
            p_bot = cur;
            cur = nodes_[cur].right;
        } else {
            if (q_top == kNull)
                q_top = cur;
            else
                nodes_[q_bot].left = cur;
            q_bot = cur;
            cur = nodes_[cur].left;
        }
    }
    const std::uint32_t e = cur;

    if (new_smallest) {
        // the search key is below every routing key, so nothing can be on
        // the smaller-key side, and the walk bottoms out at the old minimum
        if (p_top != kNull) throw std::logic_error("insert: smaller-key path not empty");
        if (nodes_[e].key != route_key)
            throw std::logic_error("insert: expected the displaced minimum");
        const std::uint32_t xe = allocate(ExtNode{false, key, {}, kNull, kNull});
        nodes_[v].left = xe;
        if (q_top != kNull) {
            nodes_[v].right = q_top;
            nodes_[q_bot].left = e;
        } else {
            nodes_[v].right = e;
        }
    } else {
        if (nodes_[e].key >= key) throw std::logic_error("insert: expected a predecessor item");
        const std::uint32_t xe = allocate(ExtNode{false, key, {}, kNull, kNull});
        if (p_top != kNull) {
            nodes_[v].left = p_top;
            nodes_[p_bot].right = e;
        } else {
            nodes_[v].left = e;
        }
        if (q_top != kNull) {
            nodes_[v].right = q_top;
            nodes_[q_bot].left = xe;
        } else {
            nodes_[v].right = xe;
        }
    }
    ++size_;
    return true;
}

// Joins the two subtrees of a removed internal node. The right subtree's
// leftmost external holds the removed item and is freed; the left subtree's
// rightmost external survives and fills the vacated symmetric-order slot.
std::uint32_t ExtTree::zip_merge(std::uint32_t left, std::uint32_t right) {
    if (!nodes_[right].internal) {
        release(right);
        return left;
    }
    if (!nodes_[left].internal) {
        std::uint32_t q = right;
        while (nodes_[nodes_[q].left].internal) q = nodes_[q].left;
        release(nodes_[q].left);
        nodes_[q].left = left;
        return right;
    }
    auto dom = [&](std::uint32_t a, std::uint32_t b) {
        return dominates(nodes_[a].rank, nodes_[a].key, nodes_[b].rank, nodes_[b].key);
    };
    const std::uint32_t merged = dom(left, right) ? left : right;
    std::uint32_t prev = kNull;
    for (;;) {
        if (dom(left, right)) {
            do {
                prev = left;
                left = nodes_[prev].right;
            } while (nodes_[left].internal && dom(left, right));
            nodes_[prev].right = right;
            if (!nodes_[left].internal) {
                // the surviving external was unhooked by the stitch; re-hang
                // it where the removed item's external sat
                std::uint32_t q = right;
                while (nodes_[nodes_[q].left].internal) q = nodes_[q].left;
                release(nodes_[q].left);
                nodes_[q].left = left;
                return merged;
            }
        } else {
            do {
                prev = right;
                right = nodes_[prev].left;
            } while (nodes_[right].internal && !dom(left, right));
            nodes_[prev].left = left;
            if (!nodes_[right].internal) {
                release(right);
                return merged;
            }
        }
    }
}

bool ExtTree::erase(Key key) {
    if (root_ == kNull) return false;
    if (!nodes_[root_].internal) {
        if (nodes_[root_].key != key) return false;
        release(root_);
        root_ = kNull;
        size_ = 0;
        return true;
    }

    std::uint32_t prev2 = kNull, prev = kNull;
    std::uint32_t cur = root_;
    while (nodes_[cur].internal && nodes_[cur].key != key) {
        prev2 = prev;
        prev = cur;
        cur = key < nodes_[cur].key ? nodes_[cur].left : nodes_[cur].right;
    }

    if (!nodes_[cur].internal) {
        if (nodes_[cur].key != key) return false;
        // smallest item: drop its external and the internal above it, whose
        // right subtree moves up
        const std::uint32_t up = nodes_[prev].right;
        if (prev2 == kNull)
            root_ = up;
        else if (nodes_[prev2].left == prev)
            nodes_[prev2].left = up;
        else
            nodes_[prev2].right = up;
        release(cur);
        release(prev);
        --size_;
        return true;
    }

    const std::uint32_t merged = zip_merge(nodes_[cur].left, nodes_[cur].right);
    if (prev == kNull)
        root_ = merged;
    else if (nodes_[prev].left == cur)
        nodes_[prev].left = merged;
    else
        nodes_[prev].right = merged;
    release(cur);
    --size_;
    return true;
}

std::vector<std::string> validate(const ExtTree& tree) {
    std::vector<std::string> violations;
    const std::uint32_t root = tree.root_index();
    if (root == kNull) {
        if (tree.size() != 0) violations.push_back("empty root but nonzero size");
        return violations;
    }

    // One symmetric-order pass gathers everything the layout promises:
    // external,internal,external,... alternation, strictly increasing items,
    // every routing key equal to the item that follows it.
    struct Entry {
        bool internal;
        Key key;
    };
    std::vector<Entry> seq;
    const std::size_t expect = 2 * tree.size() - 1;
    {
        std::vector<std::uint32_t> stack;
        std::uint32_t cur = root;
        std::size_t visited = 0;
        while (cur != kNull || !stack.empty()) {
            while (cur != kNull) {
                if (++visited > expect + 1) {
                    violations.push_back("reachable nodes exceed expected count");
                    return violations;
                }
                stack.push_back(cur);
                const ExtNode& n = tree.node(cur);
                if (!n.internal && (n.left != kNull || n.right != kNull)) {
                    violations.push_back("external node with children at key " +
                                         std::to_string(n.key));
                    return violations;
                }
                cur = n.internal ? n.left : kNull;
            }
            const std::uint32_t idx = stack.back();
            stack.pop_back();
            const ExtNode& n = tree.node(idx);
            seq.push_back({n.internal, n.key});
            cur = n.internal ? n.right : kNull;
        }
    }
    if (seq.size() != expect) {
        violations.push_back("node count " + std::to_string(seq.size()) +
                             " does not match 2*size-1 = " + std::to_string(expect));
        return violations;
    }
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const bool want_internal = (i % 2) == 1;
        if (seq[i].internal != want_internal) {
            violations.push_back("symmetric order does not alternate at position " +
                                 std::to_string(i));
            return violations;
        }
    }
    for (std::size_t i = 0; i + 2 < seq.size(); i += 2) {
        if (!(seq[i].key < seq[i + 2].key))
            violations.push_back("item order violated at key " + std::to_string(seq[i + 2].key));
        if (seq[i + 1].key != seq[i + 2].key)
            violations.push_back("routing key " + std::to_string(seq[i + 1].key) +
                                 " does not name the next item");
    }

    // rank heap over internal-to-internal edges
    {
        std::vector<std::uint32_t> stack{root};
        while (!stack.empty()) {
            const std::uint32_t idx = stack.back();
            stack.pop_back();
            const ExtNode& n = tree.node(idx);
            if (!n.internal) continue;
            for (const std::uint32_t child : {n.left, n.right}) {
                const ExtNode& cn = tree.node(child);
                if (cn.internal && !dominates(n.rank, n.key, cn.rank, cn.key))
                    violations.push_back("rank order violated at routing key " +
                                         std::to_string(cn.key));
                stack.push_back(child);
            }
        }
    }
    return violations;
}

std::string serialize(const ExtTree& tree) {
    std::string out;
    if (tree.root_index() == kNull) return out;
    struct Frame {
        std::uint32_t idx;
        std::uint32_t depth;
        char side;
    };
    std::vector<Frame> stack{{tree.root_index(), 0, 0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const ExtNode& n = tree.node(f.idx);
        out.append(2 * f.depth, ' ');
        if (f.side) {
            out.push_back(f.side);
            out.push_back(':');
        }
        if (n.internal) {
            out.push_back('(');
            out += std::to_string(n.key);
            out.push_back(',');
            out += std::to_string(n.rank.r1);
            out.push_back(',');
            out += std::to_string(n.rank.r2);
            out += ")\n";
            if (n.right != kNull) stack.push_back({n.right, f.depth + 1, 'R'});
            if (n.left != kNull) stack.push_back({n.left, f.depth + 1, 'L'});
        } else {
            out.push_back('[');
            out += std::to_string(n.key);
            out += "]\n";
        }
    }
    return out;
}

}  // namespace zipzip
