#pragma once

#include <cstdint>
#include <utility>

#include "zipzip/ranks.hpp"

namespace zipzip::detail {

inline constexpr std::uint32_t kNull = 0xffffffffu;

// The update loops below are shared by every tree flavour through a view:
//
//   Key  key(i)                 node key
//   u32  left(i) / right(i)     child slots
//   void set_left(i, j) ...     child writes (versioned trees record them)
//   u32  root() / set_root(j)
//   bool dominates(a, b)        strict total order; may mutate rank state
//                               when a variant resolves rank ties lazily
//
// All loops are iterative; nothing here recurses, so path length is bounded
// only by memory.

template <class View>
bool engine_contains(const View& t, Key key) {
    std::uint32_t cur = t.root();
    while (cur != kNull) {
        if (t.key(cur) == key) return true;
        cur = key < t.key(cur) ? t.left(cur) : t.right(cur);
    }
    return false;
}

struct SearchResult {
    bool found = false;
    std::uint32_t depth = 0;  // 1-based; for a miss, nodes visited before falling off
};

template <class View>
SearchResult engine_search(const View& t, Key key) {
    SearchResult r;
    std::uint32_t cur = t.root();
    while (cur != kNull) {
        ++r.depth;
        if (t.key(cur) == key) {
            r.found = true;
            return r;
        }
        cur = key < t.key(cur) ? t.left(cur) : t.right(cur);
    }
    return r;
}

// Links node x (already allocated, key not present) by walking down until x
// dominates the current node, then unzipping the rest of the search path
// into the smaller-key and larger-key spines. Both child slots of x are
// always written.
template <class View>
void engine_insert_linked(View& t, std::uint32_t x) {
    const Key key = t.key(x);
    std::uint32_t cur = t.root();
    std::uint32_t prev = kNull;
    while (cur != kNull && t.dominates(cur, x)) {
        prev = cur;
        cur = key < t.key(cur) ? t.left(cur) : t.right(cur);
    }
    if (prev == kNull)
        t.set_root(x);
    else if (key < t.key(prev))
        t.set_left(prev, x);
    else
        t.set_right(prev, x);
    if (cur == kNull) {
        t.set_left(x, kNull);
        t.set_right(x, kNull);
        return;
    }
    if (key < t.key(cur))
        t.set_right(x, cur);
    else
        t.set_left(x, cur);
    // Unzip: walk the displaced search path one maximal same-side run at a
    // time; the end of each run is stitched to the node after the next run.
    // The first stitch writes x's remaining child slot.
    prev = x;
    while (cur != kNull) {
        const std::uint32_t fix = prev;
        if (t.key(cur) < key) {
            do {
                prev = cur;
                cur = t.right(cur);
            } while (cur != kNull && t.key(cur) < key);
        } else {
            do {
                prev = cur;
                cur = t.left(cur);
            } while (cur != kNull && t.key(cur) > key);
        }
        if (t.key(fix) > key || (fix == x && t.key(prev) > key))
            t.set_left(fix, cur);
        else
            t.set_right(fix, cur);
    }
}

// Unlinks the node holding `key` by zipping the spines of its subtrees in
// dominance order. Returns the removed index, or kNull when absent. The
// removed node's own child slots are left as they were.
template <class View>
std::uint32_t engine_erase(View& t, Key key) {
    std::uint32_t cur = t.root();
    std::uint32_t prev = kNull;
    while (cur != kNull && t.key(cur) != key) {
        prev = cur;
        cur = key < t.key(cur) ? t.left(cur) : t.right(cur);
    }
    if (cur == kNull) return kNull;
    const std::uint32_t x = cur;
    std::uint32_t left = t.left(x);
    std::uint32_t right = t.right(x);
    if (left == kNull)
        cur = right;
    else if (right == kNull)
        cur = left;
    else if (t.dominates(left, right))
        cur = left;
    else
        cur = right;
    if (prev == kNull)
        t.set_root(cur);
    else if (key < t.key(prev))
        t.set_left(prev, cur);
    else
        t.set_right(prev, cur);
    while (left != kNull && right != kNull) {
        if (t.dominates(left, right)) {
            do {
                prev = left;
                left = t.right(left);
            } while (left != kNull && t.dominates(left, right));
            t.set_right(prev, right);
        } else {
            do {
                prev = right;
                right = t.left(right);
            } while (right != kNull && !t.dominates(left, right));
            t.set_left(prev, left);
        }
    }
    return x;
}

}  // namespace zipzip::detail
