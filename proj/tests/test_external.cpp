#include "doctest.h"

#include "zipzip/external.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

using namespace zipzip;

namespace {

ExtTree make_tree(std::uint64_t seed) {
    return ExtTree(RankPolicy::zipzip(1u << 16, 3), KeyedRng(seed, RngMode::keyed));
}

std::vector<Key> internal_keys(const ExtTree& t) {
    std::vector<Key> out;
    if (t.root_index() == detail::kNull) return out;
    std::vector<std::uint32_t> stack{t.root_index()};
    while (!stack.empty()) {
        const auto idx = stack.back();
        stack.pop_back();
        const ExtNode& n = t.node(idx);
        if (!n.internal) continue;
        out.push_back(n.key);
        stack.push_back(n.left);
        stack.push_back(n.right);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<std::size_t, std::size_t> node_counts(const ExtTree& t) {
    std::size_t internal = 0, external = 0;
    if (t.root_index() == detail::kNull) return {0, 0};
    std::vector<std::uint32_t> stack{t.root_index()};
    while (!stack.empty()) {
        const auto idx = stack.back();
        stack.pop_back();
        const ExtNode& n = t.node(idx);
        if (n.internal) {
            ++internal;
            stack.push_back(n.left);
            stack.push_back(n.right);
        } else {
            ++external;
        }
    }
    return {internal, external};
}

}  // namespace

TEST_CASE("single item lives in one external node") {
    auto t = make_tree(1);
    CHECK(t.insert(5));
    CHECK(t.size() == 1);
    const ExtNode& root = t.node(t.root_index());
    CHECK_FALSE(root.internal);
    CHECK(root.key == 5);

    auto hit = t.search(5);
    CHECK(hit.found);
    CHECK(hit.depth == 1);
    auto miss = t.search(9);
    CHECK_FALSE(miss.found);
    CHECK(miss.depth == 1);

    CHECK(t.min_key() == 5);
    CHECK(validate(t).empty());
}

TEST_CASE("empty tree basics") {
    auto t = make_tree(2);
    CHECK(validate(t).empty());
    CHECK_FALSE(t.search(1).found);
    CHECK(t.search(1).depth == 0);
    CHECK_FALSE(t.erase(1));
    CHECK_THROWS_AS(t.min_key(), std::logic_error);
}

TEST_CASE("second item splits the root, either insertion order") {
    for (bool ascending : {true, false}) {
        auto t = make_tree(3);
        if (ascending) {
            t.insert(3);
            t.insert(5);
        } else {
            t.insert(5);
            t.insert(3);
        }
        REQUIRE(t.size() == 2);
        const ExtNode& root = t.node(t.root_index());
        REQUIRE(root.internal);
        CHECK(root.key == 5);
        CHECK_FALSE(t.node(root.left).internal);
        CHECK(t.node(root.left).key == 3);
        CHECK_FALSE(t.node(root.right).internal);
        CHECK(t.node(root.right).key == 5);
        CHECK(validate(t).empty());
    }
    // keyed randomness makes the two orders byte-identical
    auto a = make_tree(4), b = make_tree(4);
    a.insert(3);
    a.insert(5);
    b.insert(5);
    b.insert(3);
    CHECK(serialize(a) == serialize(b));
}

TEST_CASE("routing keys are every item except the smallest") {
    std::vector<Key> keys = {1, 2, 3};
    std::sort(keys.begin(), keys.end());
    do {
        auto t = make_tree(5);
        for (Key k : keys) t.insert(k);
        auto rk = internal_keys(t);
        REQUIRE(rk.size() == 2);
        CHECK(rk[0] == 2);
        CHECK(rk[1] == 3);
        CHECK(t.min_key() == 1);
        CHECK(validate(t).empty());
        std::vector<Key> sorted_copy = keys;
        std::sort(sorted_copy.begin(), sorted_copy.end());
        (void)sorted_copy;
    } while (std::next_permutation(keys.begin(), keys.end()));

    auto big = make_tree(6);
    for (Key k = 10; k <= 100; k += 10) big.insert(k);
    auto rk = internal_keys(big);
    REQUIRE(rk.size() == 9);
    for (std::size_t i = 0; i < rk.size(); ++i) CHECK(rk[i] == 20 + 10 * i);
}

TEST_CASE("duplicates are rejected") {
    auto t = make_tree(7);
    CHECK(t.insert(9));
    CHECK_FALSE(t.insert(9));
    t.insert(4);
    t.insert(12);
    CHECK_FALSE(t.insert(4));
    CHECK_FALSE(t.insert(12));
    CHECK(t.size() == 3);
    CHECK(validate(t).empty());
}

TEST_CASE("deleting the sole item empties the tree") {
    auto t = make_tree(8);
    t.insert(5);
    CHECK(t.erase(5));
    CHECK(t.empty());
    CHECK(t.root_index() == detail::kNull);
    CHECK(validate(t).empty());
}

TEST_CASE("deleting the smallest of two leaves one external") {
    auto t = make_tree(9);
    t.insert(3);
    t.insert(5);
    CHECK(t.erase(3));
    REQUIRE(t.size() == 1);
    const ExtNode& root = t.node(t.root_index());
    CHECK_FALSE(root.internal);
    CHECK(root.key == 5);
    CHECK(validate(t).empty());
}

TEST_CASE("deleting the largest of two leaves one external") {
    auto t = make_tree(10);
    t.insert(3);
    t.insert(5);
    CHECK(t.erase(5));
    REQUIRE(t.size() == 1);
    CHECK(t.node(t.root_index()).key == 3);
    CHECK(validate(t).empty());
}

TEST_CASE("delete then re-insert reproduces the identical tree") {
    auto t = make_tree(11);
    for (Key k = 0; k < 80; ++k) t.insert(k * 13 % 997);
    REQUIRE(validate(t).empty());
    for (Key probe : {0ull * 13 % 997, 5ull * 13 % 997, 41ull * 13 % 997, 79ull * 13 % 997}) {
        const std::string before = serialize(t);
        REQUIRE(t.erase(probe));
        REQUIRE(validate(t).empty());
        REQUIRE(t.insert(probe));
        CHECK(serialize(t) == before);
    }
}

TEST_CASE("same key set, same tree, across five hundred sequence pairs") {
    std::mt19937_64 mt(424242);
    for (int pair = 0; pair < 500; ++pair) {
        const std::uint64_t seed = 7000 + static_cast<std::uint64_t>(pair);
        const std::size_t n = 1 + mt() % 40;
        std::set<Key> target;
        while (target.size() < n) target.insert(mt() % 200);

        auto a = make_tree(seed);
        std::vector<Key> order(target.begin(), target.end());
        std::shuffle(order.begin(), order.end(), mt);
        for (Key k : order) a.insert(k);

        auto b = make_tree(seed);
        std::vector<Key> extras;
        for (int i = 0; i < 12; ++i) {
            Key k = mt() % 200;
            if (!target.count(k)) extras.push_back(k);
        }
        std::vector<Key> mixed = order;
        mixed.insert(mixed.end(), extras.begin(), extras.end());
        std::shuffle(mixed.begin(), mixed.end(), mt);
        for (Key k : mixed) b.insert(k);
        std::shuffle(extras.begin(), extras.end(), mt);
        for (Key k : extras) b.erase(k);

        REQUIRE(serialize(a) == serialize(b));
    }
}

TEST_CASE("mixed workload against a reference sorted set") {
    auto t = make_tree(12);
    std::set<Key> oracle;
    std::mt19937_64 mt(555);
    for (int op = 0; op < 100'000; ++op) {
        const Key k = mt() % 400;
        if (mt() % 100 < 55) {
            CHECK(t.insert(k) == oracle.insert(k).second);
        } else {
            CHECK(t.erase(k) == (oracle.erase(k) > 0));
        }
        if (op % 1000 == 999) {
            REQUIRE(validate(t).empty());
            REQUIRE(t.size() == oracle.size());
            auto [internal, external] = node_counts(t);
            REQUIRE(external == oracle.size());
            REQUIRE(internal == (external == 0 ? 0 : external - 1));
        }
    }
    for (Key k = 0; k < 400; ++k) CHECK(t.search(k).found == (oracle.count(k) > 0));
    if (!oracle.empty()) CHECK(t.min_key() == *oracle.begin());
}

TEST_CASE("internal and external counts stay paired after every operation") {
    auto t = make_tree(13);
    std::mt19937_64 mt(88);
    for (int op = 0; op < 2000; ++op) {
        const Key k = mt() % 64;
        if (mt() & 1)
            t.insert(k);
        else
            t.erase(k);
        auto [internal, external] = node_counts(t);
        REQUIRE(external == t.size());
        REQUIRE(internal == (external == 0 ? 0 : external - 1));
    }
}

TEST_CASE("validator catches corrupted routing keys and ranks") {
    auto t = make_tree(14);
    for (Key k = 1; k <= 32; ++k) t.insert(k);
    REQUIRE(validate(t).empty());

    std::uint32_t some_internal = t.root_index();
    REQUIRE(t.node(some_internal).internal);
    const Key saved = t.node(some_internal).key;
    t.mutable_node(some_internal).key = saved + 1000;
    CHECK_FALSE(validate(t).empty());
    t.mutable_node(some_internal).key = saved;
    REQUIRE(validate(t).empty());

    // inflate a child rank over its parent
    const ExtNode& root = t.node(t.root_index());
    for (std::uint32_t c : {root.left, root.right}) {
        if (t.node(c).internal) {
            auto saved_rank = t.node(c).rank;
            t.mutable_node(c).rank = {root.rank.r1 + 7, 1};
            CHECK_FALSE(validate(t).empty());
            t.mutable_node(c).rank = saved_rank;
            break;
        }
    }
    REQUIRE(validate(t).empty());

    // externals must be leaves
    std::uint32_t leaf = t.root_index();
    while (t.node(leaf).internal) leaf = t.node(leaf).left;
    t.mutable_node(leaf).left = t.root_index();
    CHECK_FALSE(validate(t).empty());
    t.mutable_node(leaf).left = detail::kNull;
    REQUIRE(validate(t).empty());
}

TEST_CASE("search depth counts the external node") {
    auto t = make_tree(15);
    for (Key k = 0; k < 256; ++k) t.insert(k);
    // every search must end at depth >= 2 and report found only for members
    for (Key k = 0; k < 256; ++k) {
        auto r = t.search(k);
        CHECK(r.found);
        CHECK(r.depth >= 2);
    }
    auto r = t.search(999);
    CHECK_FALSE(r.found);
    CHECK(r.depth >= 2);
}

TEST_CASE("arena recycles nodes across churn") {
    auto t = make_tree(16);
    for (Key k = 0; k < 64; ++k) t.insert(k);
    const std::size_t cap = t.node_count_upper_bound();
    for (int round = 0; round < 6; ++round) {
        for (Key k = 0; k < 64; ++k) t.erase(k);
        CHECK(t.empty());
        for (Key k = 0; k < 64; ++k) t.insert(k);
    }
    CHECK(t.node_count_upper_bound() == cap);
    CHECK(validate(t).empty());
}
