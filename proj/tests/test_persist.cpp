#include "doctest.h"

#include "zipzip/persist.hpp"
#include "zipzip/ziptree.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

using namespace zipzip;

namespace {

PersistentTree make_tree(std::uint64_t seed) {
    return PersistentTree(RankPolicy::zipzip(1u << 16, 3), KeyedRng(seed, RngMode::keyed));
}

// Full cross-check of one version against its reference set over a key probe
// universe, counting mismatches so hot loops stay cheap.
std::size_t version_mismatches(const PersistentTree& t, std::uint32_t version,
                               const std::set<Key>& expect, Key probe_hi) {
    std::size_t bad = 0;
    if (t.size_at(version) != expect.size()) ++bad;
    for (Key k = 0; k <= probe_hi; ++k)
        if (t.search(version, k) != (expect.count(k) != 0)) ++bad;
    return bad;
}

}  // namespace

TEST_CASE("a new tree is the empty version zero") {
    PersistentTree t = make_tree(11);
    CHECK(t.newest_version() == 0u);
    CHECK(t.size_at(0) == 0u);
    CHECK_FALSE(t.search(0, 0));
    CHECK_FALSE(t.search(0, 12345));
    CHECK(t.fat_node_count() == 0u);
    CHECK(t.serialize_newest().empty());
    CHECK(t.cumulative_slots_at(0) == 0u);
    const auto s = t.space_stats();
    CHECK(s.versions == 1u);
    CHECK(s.nodes == 0u);
    CHECK(s.slot_entries == 0u);
    CHECK(s.slots_per_update == doctest::Approx(0.0));
    CHECK(t.change_count() == 1u);
    CHECK(validate(t).empty());
}

TEST_CASE("shared-stream randomness is rejected") {
    CHECK_THROWS_AS(PersistentTree(RankPolicy::original(), KeyedRng(3, RngMode::fresh)),
                    std::invalid_argument);
}

TEST_CASE("queries on versions that never existed throw") {
    PersistentTree t = make_tree(12);
    t.insert(4);
    CHECK_THROWS_AS(t.search(2, 4), std::out_of_range);
    CHECK_THROWS_AS(t.size_at(2), std::out_of_range);
    CHECK_THROWS_AS(t.cumulative_slots_at(7), std::out_of_range);
}

TEST_CASE("the first insert creates version one and leaves version zero empty") {
    PersistentTree t = make_tree(13);
    CHECK(t.insert(42) == 1u);
    CHECK(t.newest_version() == 1u);
    CHECK(t.search(1, 42));
    CHECK_FALSE(t.search(0, 42));
    CHECK(t.size_at(1) == 1u);
    CHECK(t.size_at(0) == 0u);
    CHECK(t.fat_node_count() == 1u);
    // linking into an empty tree writes exactly the new node's two child slots
    CHECK(t.cumulative_slots_at(1) == 2u);
    CHECK(t.serialize_newest().substr(0, 4) == "(42,");
    CHECK(validate(t).empty());
}

TEST_CASE("duplicate inserts and absent-key deletes still issue versions") {
    PersistentTree t = make_tree(14);
    t.insert(5);
    const std::uint32_t base = t.insert(7);
    CHECK(base == 2u);

    const std::uint32_t dup = t.insert(5);
    CHECK(dup == 3u);
    CHECK(t.size_at(dup) == t.size_at(base));
    CHECK(t.cumulative_slots_at(dup) == t.cumulative_slots_at(base));

    const std::uint32_t miss = t.erase(99);
    CHECK(miss == 4u);
    CHECK(t.size_at(miss) == t.size_at(base));
    CHECK(t.cumulative_slots_at(miss) == t.cumulative_slots_at(base));

    for (std::uint32_t v : {base, dup, miss}) {
        CHECK(t.search(v, 5));
        CHECK(t.search(v, 7));
        CHECK_FALSE(t.search(v, 99));
    }
    CHECK(t.fat_node_count() == 2u);
    CHECK(validate(t).empty());
}

TEST_CASE("membership tracks the half-open lifetime of a key") {
    PersistentTree t = make_tree(15);
    const auto v1 = t.insert(3);
    const auto v2 = t.insert(1);
    const auto v3 = t.erase(3);
    const auto v4 = t.insert(3);
    CHECK(v1 == 1u);
    CHECK(v4 == 4u);
    CHECK_FALSE(t.search(0, 3));
    CHECK(t.search(v1, 3));
    CHECK(t.search(v2, 3));
    CHECK_FALSE(t.search(v3, 3));
    CHECK(t.search(v4, 3));
    for (auto v : {v2, v3, v4}) CHECK(t.search(v, 1));
    CHECK(t.size_at(v3) == 1u);
    CHECK(t.size_at(v4) == 2u);
    CHECK(validate(t).empty());
}

TEST_CASE("a deleted key reuses its fat node when it returns") {
    PersistentTree t = make_tree(16);
    t.insert(3);
    t.insert(8);
    t.insert(1);
    const auto count = t.fat_node_count();
    const RankPair before = t.fat_node(0).rank;
    t.erase(3);
    t.insert(3);
    t.erase(3);
    t.insert(3);
    CHECK(t.fat_node_count() == count);
    CHECK(t.fat_node(0).rank.r1 == before.r1);
    CHECK(t.fat_node(0).rank.r2 == before.r2);
    CHECK(t.search(t.newest_version(), 3));
    CHECK(validate(t).empty());
}

TEST_CASE("every version stays correct under exhaustive short workloads") {
    // all op sequences of length <= 6 over insert/erase of four keys,
    // checking every historical version at every step
    constexpr Key kKeys = 4;
    std::size_t mismatches = 0;
    std::size_t paths = 0;

    struct Walker {
        std::size_t& mismatches;
        std::size_t& paths;
        void walk(const PersistentTree& t, std::vector<std::set<Key>>& snaps, int depth) {
            ++paths;
            for (std::uint32_t v = 0; v < snaps.size(); ++v)
                mismatches += version_mismatches(t, v, snaps[v], kKeys);
            if (!validate(t).empty()) ++mismatches;
            if (depth == 0) return;
            for (Key k = 0; k < kKeys; ++k) {
                for (int op = 0; op < 2; ++op) {
                    PersistentTree next = t;
                    std::set<Key> s = snaps.back();
                    if (op == 0) {
                        next.insert(k);
                        s.insert(k);
                    } else {
                        next.erase(k);
                        s.erase(k);
                    }
                    snaps.push_back(std::move(s));
                    walk(next, snaps, depth - 1);
                    snaps.pop_back();
                }
            }
        }
    };

    std::vector<std::set<Key>> snaps{{}};
    Walker w{mismatches, paths};
    w.walk(make_tree(17), snaps, 6);
    CHECK(paths > 200000u);
    CHECK(mismatches == 0u);
}

TEST_CASE("random workloads keep all versions consistent with set snapshots") {
    std::mt19937_64 gen(900);
    for (int trial = 0; trial < 20; ++trial) {
        PersistentTree t = make_tree(1000 + trial);
        std::vector<std::set<Key>> snaps{{}};
        constexpr Key kUniverse = 64;
        for (int op = 0; op < 300; ++op) {
            const Key k = gen() % kUniverse;
            std::set<Key> s = snaps.back();
            if (gen() & 1) {
                t.insert(k);
                s.insert(k);
            } else {
                t.erase(k);
                s.erase(k);
            }
            snaps.push_back(std::move(s));
        }
        std::size_t mismatches = 0;
        for (std::uint32_t v = 0; v < snaps.size(); ++v)
            mismatches += version_mismatches(t, v, snaps[v], kUniverse);
        REQUIRE(mismatches == 0u);
        REQUIRE(validate(t).empty());
    }
}

TEST_CASE("the newest version is the tree an ephemeral run would build") {
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        for (int which = 0; which < 2; ++which) {
            const RankPolicy policy = which == 0 ? RankPolicy::zipzip(1u << 16, 3)
                                                 : RankPolicy::original();
            PersistentTree p(policy, KeyedRng(seed, RngMode::keyed));
            ZipTree z(policy, KeyedRng(seed, RngMode::keyed));

            std::vector<Key> keys(500);
            for (Key k = 0; k < 500; ++k) keys[k] = k * 7 % 501;
            std::mt19937_64 gen(seed * 31);
            std::shuffle(keys.begin(), keys.end(), gen);
            for (Key k : keys) {
                p.insert(k);
                z.insert(k);
            }
            for (std::size_t i = 0; i < keys.size(); i += 3) {
                p.erase(keys[i]);
                z.erase(keys[i]);
            }
            REQUIRE(p.serialize_newest() == serialize(z));
        }
    }
}

TEST_CASE("slot growth per update stays small on large workloads") {
    PersistentTree t = make_tree(31);
    for (Key k = 0; k < (1u << 14); ++k) t.insert(k);
    std::mt19937_64 gen(77);
    for (int i = 0; i < 4000; ++i) {
        const Key k = gen() % (1u << 14);
        if (gen() & 1)
            t.erase(k);
        else
            t.insert(k);
    }
    for (std::uint32_t v : {1024u, 4096u, 16384u, t.newest_version()}) {
        const double per = static_cast<double>(t.cumulative_slots_at(v)) / v;
        CHECK(per <= 30.0);
    }
    const auto s = t.space_stats();
    CHECK(s.slots_per_update <= 30.0);
    CHECK(s.slots_per_update > 0.5);
    CHECK(validate(t).empty());
}

TEST_CASE("space report is one row per version") {
    CHECK(space_csv_header() == "version,cumulative_slots,slots_per_update");
    PersistentTree t = make_tree(32);
    CHECK(space_csv(t) == "version,cumulative_slots,slots_per_update\n0,0,0.000000\n");
    t.insert(9);
    t.insert(4);
    const std::string csv = space_csv(t);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.find("\n0,0,0.000000\n") != std::string::npos);
    CHECK(csv.find("\n1,2,2.000000\n") != std::string::npos);
}

TEST_CASE("the validator notices corrupted slot history") {
    PersistentTree t = make_tree(33);
    for (Key k = 0; k < 12; ++k) t.insert(k);
    for (Key k = 0; k < 12; k += 2) t.erase(k);
    REQUIRE(validate(t).empty());

    FatNode* victim = nullptr;
    for (std::uint32_t i = 0; i < t.fat_node_count(); ++i)
        if (t.mutable_fat_node(i).left_slots.size() >= 2) {
            victim = &t.mutable_fat_node(i);
            break;
        }
    REQUIRE(victim != nullptr);

    std::swap(victim->left_slots[0].version, victim->left_slots[1].version);
    auto v = validate(t);
    REQUIRE(!v.empty());
    CHECK(v.front().find("not strictly increasing") != std::string::npos);
    std::swap(victim->left_slots[0].version, victim->left_slots[1].version);
    REQUIRE(validate(t).empty());

    const FatSlot dropped = victim->right_slots.back();
    victim->right_slots.pop_back();
    auto v2 = validate(t);
    REQUIRE(!v2.empty());
    CHECK(v2.front().find("counter disagrees") != std::string::npos);
    victim->right_slots.push_back(dropped);
    CHECK(validate(t).empty());
}
