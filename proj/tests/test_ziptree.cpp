#include "doctest.h"

#include "zipzip/ziptree.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <vector>

using namespace zipzip;

namespace {

ZipTree preset_tree(const std::vector<std::pair<Key, RankPair>>& ranks,
                    const std::vector<Key>& order, bool with_r2 = false) {
    std::map<Key, RankPair> m(ranks.begin(), ranks.end());
    RankPolicy shape = with_r2 ? RankPolicy::zipzip(1u << 16, 3) : RankPolicy::original();
    ZipTree t(shape, [m](Key k) { return m.at(k); });
    for (Key k : order) t.insert(k);
    return t;
}

// Direct recursive form of the canonical tree: the dominance maximum is the
// root, sides are built independently. Used to anchor the iterative builder.
struct RefNode {
    Key key;
    RankPair rank;
    std::unique_ptr<RefNode> left, right;
};

std::unique_ptr<RefNode> ref_build(const std::vector<std::pair<Key, RankPair>>& sorted,
                                   std::size_t lo, std::size_t hi) {
    if (lo >= hi) return nullptr;
    std::size_t best = lo;
    for (std::size_t i = lo + 1; i < hi; ++i)
        if (dominates(sorted[i].second, sorted[i].first, sorted[best].second,
                      sorted[best].first))
            best = i;
    auto n = std::make_unique<RefNode>();
    n->key = sorted[best].first;
    n->rank = sorted[best].second;
    n->left = ref_build(sorted, lo, best);
    n->right = ref_build(sorted, best + 1, hi);
    return n;
}

bool same_shape(const ZipTree& t, std::uint32_t idx, const RefNode* ref) {
    if (idx == detail::kNull) return ref == nullptr;
    if (ref == nullptr) return false;
    const auto& n = t.node(idx);
    return n.key == ref->key && n.rank == ref->rank && same_shape(t, n.left, ref->left.get()) &&
           same_shape(t, n.right, ref->right.get());
}

bool matches_reference(const ZipTree& t, std::vector<std::pair<Key, RankPair>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    auto ref = ref_build(pairs, 0, pairs.size());
    return same_shape(t, t.root_index(), ref.get());
}

}  // namespace

TEST_CASE("search in the empty tree misses at depth zero") {
    ZipTree t(RankPolicy::original(), KeyedRng(1, RngMode::keyed));
    auto r = t.search(42);
    CHECK_FALSE(r.found);
    CHECK(r.depth == 0);
}

TEST_CASE("search depth counts nodes on the comparison path, root is one") {
    auto t = preset_tree({{5, {0, 0}}}, {5});
    auto hit = t.search(5);
    CHECK(hit.found);
    CHECK(hit.depth == 1);

    auto t3 = preset_tree({{1, {0, 0}}, {2, {1, 0}}, {3, {0, 0}}}, {1, 2, 3});
    auto r1 = t3.search(1);
    CHECK(r1.found);
    CHECK(r1.depth == 2);
    auto r2 = t3.search(2);
    CHECK(r2.found);
    CHECK(r2.depth == 1);
    auto miss = t3.search(4);  // visits 2 then 3, then falls off
    CHECK_FALSE(miss.found);
    CHECK(miss.depth == 2);
}

TEST_CASE("equal full ranks break toward the smaller key") {
    auto t = preset_tree({{1, {0, 0}}, {2, {0, 0}}}, {1, 2});
    CHECK(serialize(t) == "(1,0,0)\n  R:(2,0,0)\n");
    auto t2 = preset_tree({{1, {0, 0}}, {2, {0, 0}}}, {2, 1});
    CHECK(serialize(t2) == serialize(t));
}

TEST_CASE("every insertion order produces the canonical tree") {
    std::vector<std::pair<Key, RankPair>> ranks = {{1, {0, 0}}, {2, {1, 0}}, {3, {0, 0}}};
    std::vector<Key> order = {1, 2, 3};
    std::string want = "(2,1,0)\n  L:(1,0,0)\n  R:(3,0,0)\n";
    do {
        auto t = preset_tree(ranks, order);
        CHECK(serialize(t) == want);
        CHECK(t.node(t.root_index()).key == 2);
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("duplicate inserts are rejected and change nothing") {
    auto t = preset_tree({{1, {0, 0}}, {2, {1, 0}}, {3, {0, 0}}}, {1, 2, 3});
    std::string before = serialize(t);
    CHECK_FALSE(t.insert(2));
    CHECK(t.size() == 3);
    CHECK(serialize(t) == before);
}

TEST_CASE("erase zips the two subtrees back together") {
    auto t = preset_tree({{1, {0, 0}}, {2, {1, 0}}, {3, {0, 0}}}, {1, 2, 3});
    CHECK(t.erase(2));
    CHECK(t.size() == 2);
    CHECK(serialize(t) == "(1,0,0)\n  R:(3,0,0)\n");
    CHECK(validate(t).empty());

    CHECK_FALSE(t.erase(2));
    CHECK(t.erase(1));
    CHECK(t.erase(3));
    CHECK(t.empty());
    CHECK(t.search(3).depth == 0);
}

TEST_CASE("canonical builder handles the worked examples") {
    std::vector<std::pair<Key, RankPair>> a = {{1, {0, 0}}, {2, {1, 0}}, {3, {0, 0}}};
    auto ta = ZipTree::build_canonical(a);
    CHECK(serialize(ta) == "(2,1,0)\n  L:(1,0,0)\n  R:(3,0,0)\n");

    std::vector<std::pair<Key, RankPair>> b = {{1, {0, 0}}, {2, {0, 0}}, {3, {0, 0}}};
    auto tb = ZipTree::build_canonical(b);
    CHECK(serialize(tb) == "(1,0,0)\n  R:(2,0,0)\n    R:(3,0,0)\n");

    std::vector<std::pair<Key, RankPair>> empty;
    auto te = ZipTree::build_canonical(empty);
    CHECK(te.empty());

    std::vector<std::pair<Key, RankPair>> dup = {{1, {0, 0}}, {1, {1, 0}}};
    CHECK_THROWS_AS(ZipTree::build_canonical(dup), std::invalid_argument);
}

TEST_CASE("canonical builder agrees with the recursive definition exhaustively") {
    // every key subset of {0..5} with every r1 assignment from {0,1,2}
    for (unsigned mask = 1; mask < 64; ++mask) {
        std::vector<Key> keys;
        for (Key k = 0; k < 6; ++k)
            if (mask & (1u << k)) keys.push_back(k);
        const std::size_t m = keys.size();
        std::size_t combos = 1;
        for (std::size_t i = 0; i < m; ++i) combos *= 3;
        for (std::size_t c = 0; c < combos; ++c) {
            std::vector<std::pair<Key, RankPair>> pairs;
            std::size_t v = c;
            for (std::size_t i = 0; i < m; ++i) {
                pairs.push_back({keys[i], {v % 3, 0}});
                v /= 3;
            }
            auto t = ZipTree::build_canonical(pairs);
            REQUIRE(matches_reference(t, pairs));
            REQUIRE(validate(t).empty());
        }
    }
}

TEST_CASE("insertion and deletion converge to the canonical tree") {
    std::mt19937_64 mt(12345);
    for (unsigned mask = 1; mask < 32; ++mask) {
        std::vector<Key> keys;
        for (Key k = 0; k < 5; ++k)
            if (mask & (1u << k)) keys.push_back(k);
        const std::size_t m = keys.size();
        std::size_t combos = 1;
        for (std::size_t i = 0; i < m; ++i) combos *= 4;
        for (std::size_t c = 0; c < combos; ++c) {
            std::vector<std::pair<Key, RankPair>> pairs;
            std::size_t v = c;
            for (std::size_t i = 0; i < m; ++i) {
                // r2 of zero and nonzero both exercised
                pairs.push_back({keys[i], {(v % 4) / 2, 1 + (v % 4) % 2}});
                v /= 4;
            }
            std::vector<Key> order = keys;
            std::shuffle(order.begin(), order.end(), mt);
            auto t = preset_tree(pairs, order, true);
            REQUIRE(matches_reference(t, pairs));

            // delete a random half, compare against the canonical remainder
            std::vector<std::pair<Key, RankPair>> kept;
            for (auto& pr : pairs) {
                if (mt() & 1) {
                    REQUIRE(t.erase(pr.first));
                } else {
                    kept.push_back(pr);
                }
            }
            REQUIRE(t.size() == kept.size());
            REQUIRE(matches_reference(t, kept));
            REQUIRE(validate(t).empty());
        }
    }
}

TEST_CASE("validator flags broken order and broken heap") {
    ZipTree t(RankPolicy::original(), KeyedRng(7, RngMode::keyed));
    for (Key k = 0; k < 64; ++k) t.insert(k);
    CHECK(validate(t).empty());

    auto& root = t.mutable_node(t.root_index());
    std::swap(root.left, root.right);
    CHECK_FALSE(validate(t).empty());
    std::swap(root.left, root.right);
    CHECK(validate(t).empty());

    // push a child's rank above its parent
    std::uint32_t child = root.left != detail::kNull ? root.left : root.right;
    REQUIRE(child != detail::kNull);
    auto saved = t.mutable_node(child).rank;
    t.mutable_node(child).rank = {root.rank.r1 + 1, 0};
    CHECK_FALSE(validate(t).empty());
    t.mutable_node(child).rank = saved;
    CHECK(validate(t).empty());
}

TEST_CASE("stats reports depths, height, and rank groups") {
    ZipTree e(RankPolicy::original(), KeyedRng(3, RngMode::keyed));
    auto es = stats(e);
    CHECK(es.height == 0);
    CHECK(es.per_key_depth.empty());
    CHECK(es.rank_group_sizes.empty());

    auto t = preset_tree({{1, {0, 0}}, {2, {0, 0}}, {3, {0, 0}}}, {1, 2, 3});
    auto s = stats(t);
    CHECK(s.height == 3);
    REQUIRE(s.per_key_depth.size() == 3);
    CHECK(s.per_key_depth[0] == std::pair<Key, std::uint32_t>{1, 1});
    CHECK(s.per_key_depth[1] == std::pair<Key, std::uint32_t>{2, 2});
    CHECK(s.per_key_depth[2] == std::pair<Key, std::uint32_t>{3, 3});
    REQUIRE(s.rank_group_sizes.size() == 1);
    CHECK(s.rank_group_sizes[0] == 3);
    CHECK(s.root_r1 == 0);
}

TEST_CASE("per-key depths agree with search depths") {
    ZipTree t(RankPolicy::zipzip(1u << 12, 3), KeyedRng(11, RngMode::keyed));
    for (Key k = 0; k < 500; ++k) t.insert(k * 7919 % 4096);
    auto s = stats(t);
    std::uint32_t max_depth = 0;
    for (auto& [k, d] : s.per_key_depth) {
        auto r = t.search(k);
        CHECK(r.found);
        CHECK(r.depth == d);
        max_depth = std::max(max_depth, d);
    }
    CHECK(s.height == max_depth);
}

TEST_CASE("geometric rank groups average two nodes") {
    for (bool zz : {true, false}) {
        RankPolicy pol = zz ? RankPolicy::zipzip(1u << 14, 3) : RankPolicy::original();
        double total = 0.0, groups = 0.0;
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            ZipTree t(pol, KeyedRng(900 + seed, RngMode::keyed));
            for (Key k = 0; k < (1u << 14); ++k) t.insert(k);
            auto s = stats(t);
            for (auto g : s.rank_group_sizes) total += g;
            groups += static_cast<double>(s.rank_group_sizes.size());
        }
        CHECK(std::abs(total / groups - 2.0) < 0.05);
    }
}

TEST_CASE("skip list correspondence") {
    auto one = preset_tree({{9, {0, 0}}}, {9});
    CHECK(check_skiplist_isomorphism(one));

    std::mt19937_64 mt(777);
    std::vector<std::pair<Key, RankPair>> pairs;
    for (Key k = 1; k <= 1000; ++k) {
        std::uint64_t r = 0;
        while (mt() & 1) ++r;
        pairs.push_back({k, {r, 0}});
    }
    auto t = ZipTree::build_canonical(pairs);
    CHECK(check_skiplist_isomorphism(t));

    // live trees, with and without the tie-breaking second rank
    ZipTree live(RankPolicy::original(), KeyedRng(5, RngMode::keyed));
    for (Key k = 0; k < 2000; ++k) live.insert(k);
    for (Key k = 0; k < 2000; k += 3) live.erase(k);
    CHECK(check_skiplist_isomorphism(live));

    ZipTree zz(RankPolicy::zipzip(1u << 12, 3), KeyedRng(6, RngMode::keyed));
    for (Key k = 0; k < 2000; ++k) zz.insert(k);
    CHECK(check_skiplist_isomorphism(zz));

    // a rank-heap violation breaks the correspondence
    auto& root = t.mutable_node(t.root_index());
    std::uint32_t child = root.left != detail::kNull ? root.left : root.right;
    REQUIRE(child != detail::kNull);
    t.mutable_node(child).rank.r1 = root.rank.r1 + 5;
    CHECK_FALSE(check_skiplist_isomorphism(t));

    ZipTree uni(RankPolicy::uniform(1u << 12, 3), KeyedRng(8, RngMode::keyed));
    uni.insert(1);
    CHECK_THROWS_AS(check_skiplist_isomorphism(uni), std::invalid_argument);
}

TEST_CASE("keyed randomness makes the tree a function of its key set") {
    for (auto variant : {RankVariant::original, RankVariant::zipzip, RankVariant::uniform}) {
        RankPolicy pol = variant == RankVariant::original ? RankPolicy::original()
                         : variant == RankVariant::zipzip ? RankPolicy::zipzip(1u << 16, 3)
                                                          : RankPolicy::uniform(1u << 16, 3);
        ZipTree a(pol, KeyedRng(31337, RngMode::keyed));
        ZipTree b(pol, KeyedRng(31337, RngMode::keyed));

        std::vector<Key> keys(200);
        std::iota(keys.begin(), keys.end(), 1);
        for (Key k : keys) a.insert(k);

        std::mt19937_64 mt(1);
        std::shuffle(keys.begin(), keys.end(), mt);
        for (Key k : keys) b.insert(k);
        // churn: remove and re-add a slice in b only
        for (Key k = 50; k < 150; ++k) b.erase(k);
        for (Key k = 149;; --k) {
            b.insert(k);
            if (k == 50) break;
        }
        CHECK(serialize(a) == serialize(b));
    }
}

TEST_CASE("counters track rank comparisons and full ties") {
    auto t = preset_tree({{1, {0, 0}}, {2, {0, 0}}, {3, {0, 0}}}, {1, 2, 3});
    CHECK(t.counters().full_rank_ties > 0);

    ZipTree z(RankPolicy::zipzip(1u << 16, 3), KeyedRng(2, RngMode::keyed));
    for (Key k = 0; k < 100; ++k) z.insert(k);
    CHECK(z.counters().rank_comparisons > 0);
}

TEST_CASE("arena slots are recycled after erase") {
    ZipTree t(RankPolicy::original(), KeyedRng(4, RngMode::keyed));
    for (Key k = 0; k < 100; ++k) t.insert(k);
    std::size_t cap = t.node_count_upper_bound();
    for (int round = 0; round < 10; ++round) {
        for (Key k = 0; k < 100; ++k) t.erase(k);
        CHECK(t.empty());
        for (Key k = 0; k < 100; ++k) t.insert(k);
    }
    CHECK(t.node_count_upper_bound() == cap);
    CHECK(t.size() == 100);
    CHECK(validate(t).empty());
}
