#include "zipzip/verify.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace zipzip {

void CheckReport::merge(const CheckReport& other) {
    checks += other.checks;
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

const char* harness_name(Harness h) {
    switch (h) {
        case Harness::original: return "original";
        case Harness::uniform: return "uniform";
        case Harness::zipzip: return "zipzip";
        case Harness::variable_p: return "variable_p";
        case Harness::biased: return "biased";
        case Harness::jit: return "jit";
        case Harness::external: return "external";
        case Harness::persistent: return "persistent";
    }
    return "?";
}

std::vector<Harness> all_harnesses() {
    return {Harness::original, Harness::uniform,  Harness::zipzip,
            Harness::variable_p, Harness::biased, Harness::jit,
            Harness::external,  Harness::persistent};
}

namespace {

constexpr std::uint64_t kFuzzUniverse = 4096;

std::uint64_t biased_weight(Key k) { return (k & 7) + 1; }

RankPolicy harness_policy(Harness h, std::uint64_t n_cap) {
    switch (h) {
        case Harness::original: return RankPolicy::original();
        case Harness::uniform: return RankPolicy::uniform(n_cap, 3);
        case Harness::zipzip: return RankPolicy::zipzip(n_cap, 3);
        case Harness::variable_p: return RankPolicy::variable_p(0.3);
        case Harness::biased: return RankPolicy::biased(biased_weight, n_cap, 3);
        default: break;
    }
    throw std::invalid_argument("no single rank policy for this harness");
}

void note(CheckReport& r, std::string msg) {
    if (r.violations.size() < 64) r.violations.push_back(std::move(msg));
}

}  // namespace

bool same_tree(const ZipTree& a, const ZipTree& b) {
    if (a.size() != b.size()) return false;
    constexpr auto null = detail::kNull;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stack{
        {a.root_index(), b.root_index()}};
    while (!stack.empty()) {
        const auto [ia, ib] = stack.back();
        stack.pop_back();
        if ((ia == null) != (ib == null)) return false;
        if (ia == null) continue;
        const auto& na = a.node(ia);
        const auto& nb = b.node(ib);
        if (na.key != nb.key || na.rank != nb.rank) return false;
        stack.push_back({na.left, nb.left});
        stack.push_back({na.right, nb.right});
    }
    return true;
}

CheckReport hi_sequence_pairs(Harness h, std::size_t pairs, std::uint64_t master_seed) {
    if (h == Harness::jit)
        throw std::invalid_argument("jit metadata depends on operation history");
    CheckReport report;
    constexpr Key universe = 512;

    for (std::size_t i = 0; i < pairs; ++i) {
        const std::uint64_t seed =
            mix64(master_seed, static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(i));
        std::mt19937_64 gen(mix64(seed, 0x70616972ULL));

        std::vector<Key> final_set, extras;
        for (Key k = 0; k < universe; ++k) {
            const auto roll = gen() & 3;
            if (roll == 0)
                final_set.push_back(k);
            else if (roll == 1)
                extras.push_back(k);
        }

        // history A: plain inserts of the final set
        std::vector<Key> hist_a = final_set;
        std::shuffle(hist_a.begin(), hist_a.end(), gen);

        // history B: a superset with duplicates sprinkled in, then the
        // extras (and a few temporary removals of real members) undone
        std::vector<Key> hist_b = final_set;
        hist_b.insert(hist_b.end(), extras.begin(), extras.end());
        for (std::size_t dup = 0; dup < final_set.size() / 4 + 1 && !final_set.empty(); ++dup)
            hist_b.push_back(final_set[gen() % final_set.size()]);
        std::shuffle(hist_b.begin(), hist_b.end(), gen);

        std::vector<Key> churn;
        for (Key k : final_set)
            if ((gen() & 7) == 0) churn.push_back(k);
        std::vector<Key> removals = extras;
        removals.insert(removals.end(), churn.begin(), churn.end());
        std::shuffle(removals.begin(), removals.end(), gen);

        std::string sa, sb;
        if (h == Harness::external) {
            ExtTree a(harness_policy(Harness::zipzip, universe), KeyedRng(seed));
            ExtTree b(harness_policy(Harness::zipzip, universe), KeyedRng(seed));
            for (Key k : hist_a) a.insert(k);
            for (Key k : hist_b) b.insert(k);
            for (Key k : removals) b.erase(k);
            for (Key k : churn) b.insert(k);
            sa = serialize(a);
            sb = serialize(b);
        } else if (h == Harness::persistent) {
            PersistentTree a(harness_policy(Harness::zipzip, universe), KeyedRng(seed));
            PersistentTree b(harness_policy(Harness::zipzip, universe), KeyedRng(seed));
            for (Key k : hist_a) a.insert(k);
            for (Key k : hist_b) b.insert(k);
            for (Key k : removals) b.erase(k);
            for (Key k : churn) b.insert(k);
            sa = a.serialize_newest();
            sb = b.serialize_newest();
        } else {
            ZipTree a(harness_policy(h, universe), KeyedRng(seed));
            ZipTree b(harness_policy(h, universe), KeyedRng(seed));
            for (Key k : hist_a) a.insert(k);
            for (Key k : hist_b) b.insert(k);
            for (Key k : removals) b.erase(k);
            for (Key k : churn) b.insert(k);
            sa = serialize(a);
            sb = serialize(b);
        }
        ++report.checks;
        if (sa != sb)
            note(report, std::string(harness_name(h)) + ": histories diverged, pair " +
                             std::to_string(i) + ", seed " + std::to_string(seed));
    }
    return report;
}

namespace {

// One fuzz step driver per engine, so the loop below stays uniform.
struct FuzzTarget {
    virtual ~FuzzTarget() = default;
    virtual bool insert(Key k) = 0;
    virtual bool erase(Key k) = 0;
    virtual bool contains(Key k) const = 0;
    virtual void audit(const std::set<Key>& model, CheckReport& r) = 0;
    virtual bool corrupt() = 0;
};

struct ZipTarget : FuzzTarget {
    ZipTree t;
    bool skiplist;
    ZipTarget(RankPolicy po, std::uint64_t seed)
        : t(po, KeyedRng(seed)), skiplist(po.geometric_r1()) {}
    bool insert(Key k) override { return t.insert(k); }
    bool erase(Key k) override { return t.erase(k); }
    bool contains(Key k) const override { return t.search(k).found; }
    void audit(const std::set<Key>& model, CheckReport& r) override {
        ++r.checks;
        for (const auto& v : validate(t)) note(r, "ziptree audit: " + v);
        if (t.size() != model.size()) note(r, "ziptree audit: size drift");
        if (skiplist && !check_skiplist_isomorphism(t))
            note(r, "ziptree audit: skip-list correspondence broken");
    }
    bool corrupt() override {
        if (t.root_index() == detail::kNull) return false;
        const auto& root = t.node(t.root_index());
        const auto child = root.left != detail::kNull ? root.left : root.right;
        if (child == detail::kNull) return false;
        t.mutable_node(child).rank.r1 = root.rank.r1 + 7;
        return true;
    }
};

struct JitTarget : FuzzTarget {
    JitTree t;
    explicit JitTarget(std::uint64_t seed) : t(seed) {}
    bool insert(Key k) override { return t.insert(k); }
    bool erase(Key k) override { return t.erase(k); }
    bool contains(Key k) const override { return t.search(k).found; }
    void audit(const std::set<Key>& model, CheckReport& r) override {
        ++r.checks;
        for (const auto& v : validate(t)) note(r, "jit audit: " + v);
        if (t.size() != model.size()) note(r, "jit audit: size drift");
    }
    bool corrupt() override {
        if (t.root_index() == detail::kNull) return false;
        const auto& root = t.node(t.root_index());
        if (root.left == detail::kNull) return false;
        t.mutable_node(root.left).r1 = root.r1 + 7;
        return true;
    }
};

struct ExtTarget : FuzzTarget {
    ExtTree t;
    ExtTarget(RankPolicy po, std::uint64_t seed) : t(po, KeyedRng(seed)) {}
    bool insert(Key k) override { return t.insert(k); }
    bool erase(Key k) override { return t.erase(k); }
    bool contains(Key k) const override { return t.search(k).found; }
    void audit(const std::set<Key>& model, CheckReport& r) override {
        ++r.checks;
        for (const auto& v : validate(t)) note(r, "external audit: " + v);
        if (t.size() != model.size()) note(r, "external audit: size drift");
    }
    bool corrupt() override {
        if (t.root_index() == detail::kNull || !t.node(t.root_index()).internal) return false;
        t.mutable_node(t.root_index()).key += 1;
        return true;
    }
};

struct PersistTarget : FuzzTarget {
    PersistentTree t;
    std::vector<std::pair<std::uint32_t, std::set<Key>>> snaps;
    PersistTarget(RankPolicy po, std::uint64_t seed) : t(po, KeyedRng(seed)) {}
    bool insert(Key k) override {
        const bool had = t.search(t.newest_version(), k);
        t.insert(k);
        return !had;
    }
    bool erase(Key k) override {
        const bool had = t.search(t.newest_version(), k);
        t.erase(k);
        return had;
    }
    bool contains(Key k) const override { return t.search(t.newest_version(), k); }
    void audit(const std::set<Key>& model, CheckReport& r) override {
        ++r.checks;
        for (const auto& v : validate(t)) note(r, "persistent audit: " + v);
        if (t.size_at(t.newest_version()) != model.size())
            note(r, "persistent audit: size drift");
        snaps.emplace_back(t.newest_version(), model);
        for (const auto& [version, snap] : snaps) {
            if (t.size_at(version) != snap.size()) {
                note(r, "persistent audit: historical size changed at version " +
                            std::to_string(version));
                continue;
            }
            // sampled membership: every stored member stride-probed plus gaps
            std::size_t idx = 0;
            for (Key k : snap) {
                if (idx++ % 17 == 0 && !t.search(version, k))
                    note(r, "persistent audit: lost key " + std::to_string(k) +
                                " at version " + std::to_string(version));
            }
            for (Key k = 0; k < kFuzzUniverse; k += 97)
                if (t.search(version, k) != (snap.count(k) != 0))
                    note(r, "persistent audit: membership drift at version " +
                                std::to_string(version));
        }
    }
    bool corrupt() override {
        for (std::uint32_t i = 0; i < t.fat_node_count(); ++i)
            if (t.mutable_fat_node(i).left_slots.size() >= 2) {
                auto& slots = t.mutable_fat_node(i).left_slots;
                std::swap(slots[0].version, slots[1].version);
                return true;
            }
        if (t.fat_node_count() == 0) return false;
        t.mutable_fat_node(0).left_slots.pop_back();
        return true;
    }
};

}  // namespace

CheckReport fuzz_harness(Harness h, std::uint64_t ops, std::uint64_t master_seed,
                         std::uint64_t audit_every, bool inject_fault) {
    CheckReport report;
    const std::uint64_t seed = mix64(master_seed, static_cast<std::uint64_t>(h), 0xf022ULL);

    std::unique_ptr<FuzzTarget> target;
    switch (h) {
        case Harness::jit:
            target = std::make_unique<JitTarget>(seed);
            break;
        case Harness::external:
            target = std::make_unique<ExtTarget>(harness_policy(Harness::zipzip, kFuzzUniverse),
                                                 seed);
            break;
        case Harness::persistent:
            target = std::make_unique<PersistTarget>(
                harness_policy(Harness::zipzip, kFuzzUniverse), seed);
            break;
        default:
            target = std::make_unique<ZipTarget>(harness_policy(h, kFuzzUniverse), seed);
            break;
    }

    std::set<Key> model;
    std::mt19937_64 gen(mix64(seed, 0x6f7073ULL));
    if (audit_every == 0) audit_every = 1000;

    for (std::uint64_t op = 1; op <= ops; ++op) {
        const Key k = gen() % kFuzzUniverse;
        const auto roll = gen() % 100;
        ++report.checks;
        if (roll < 45) {
            const bool fresh = target->insert(k);
            if (fresh != model.insert(k).second)
                note(report, std::string(harness_name(h)) + ": insert return drift at op " +
                                 std::to_string(op));
        } else if (roll < 80) {
            const bool had = target->erase(k);
            if (had != (model.erase(k) > 0))
                note(report, std::string(harness_name(h)) + ": erase return drift at op " +
                                 std::to_string(op));
        } else {
            if (target->contains(k) != (model.count(k) != 0))
                note(report, std::string(harness_name(h)) + ": lookup drift at op " +
                                 std::to_string(op));
        }
        if (op % audit_every == 0) target->audit(model, report);
    }
    target->audit(model, report);

    if (inject_fault) {
        ++report.checks;
        if (!target->corrupt()) {
            note(report, std::string(harness_name(h)) +
                             ": tree too small to inject a fault into");
        } else {
            CheckReport post;
            target->audit(model, post);
            if (post.ok())
                note(report, std::string(harness_name(h)) +
                                 ": injected corruption passed the audit unnoticed");
            else
                note(report, std::string(harness_name(h)) + ": injected fault detected (" +
                                 post.violations.front() + ")");
        }
    }
    return report;
}

namespace {

ZipTree incremental_from(const std::vector<std::pair<Key, RankPair>>& pairs,
                         const std::vector<std::size_t>& order, RankPolicy shape) {
    std::vector<std::pair<Key, RankPair>> sorted = pairs;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    ZipTree t(shape, [sorted](Key k) {
        const auto it = std::lower_bound(
            sorted.begin(), sorted.end(), k,
            [](const auto& entry, Key key) { return entry.first < key; });
        return it->second;
    });
    for (std::size_t i : order) t.insert(pairs[i].first);
    return t;
}

}  // namespace

CheckReport oracle_exhaustive(std::size_t max_keys, bool with_r2_ties) {
    CheckReport report;
    std::uint64_t instance = 0;
    for (std::size_t n = 0; n <= max_keys; ++n) {
        const std::uint64_t radix = with_r2_ties ? 6 : 3;
        std::uint64_t combos = 1;
        for (std::size_t i = 0; i < n; ++i) combos *= radix;

        std::vector<std::size_t> asc(n), desc(n), mixed(n);
        std::iota(asc.begin(), asc.end(), 0);
        std::iota(desc.rbegin(), desc.rend(), 0);

        for (std::uint64_t code = 0; code < combos; ++code) {
            std::vector<std::pair<Key, RankPair>> pairs(n);
            std::uint64_t rest = code;
            for (std::size_t k = 0; k < n; ++k) {
                RankPair r;
                r.r1 = rest % 3;
                rest /= 3;
                if (with_r2_ties) {
                    r.r2 = 1 + rest % 2;
                    rest /= 2;
                }
                pairs[k] = {static_cast<Key>(k), r};
            }

            const std::vector<std::size_t>* order;
            switch (instance % 3) {
                case 0: order = &asc; break;
                case 1: order = &desc; break;
                default: {
                    std::iota(mixed.begin(), mixed.end(), 0);
                    std::mt19937_64 gen(mix64(instance, 0x6f72ULL));
                    std::shuffle(mixed.begin(), mixed.end(), gen);
                    order = &mixed;
                }
            }
            ++instance;

            const RankPolicy shape =
                with_r2_ties ? RankPolicy::zipzip(16, 3) : RankPolicy::original();
            const ZipTree inc = incremental_from(pairs, *order, shape);
            const ZipTree canon = ZipTree::build_canonical(pairs, shape);
            ++report.checks;
            if (!same_tree(inc, canon))
                note(report, "oracle mismatch: n=" + std::to_string(n) +
                                 " code=" + std::to_string(code) +
                                 (with_r2_ties ? " (r2 ties)" : ""));
        }
    }
    return report;
}

CheckReport oracle_randomized(std::size_t instances, std::uint64_t n,
                              std::uint64_t master_seed) {
    CheckReport report;
    for (std::size_t i = 0; i < instances; ++i) {
        std::mt19937_64 gen(mix64(master_seed, static_cast<std::uint64_t>(i), 0x6f726eULL));
        // draw n distinct keys from a universe four times as large
        std::set<Key> key_set;
        while (key_set.size() < n) key_set.insert(gen() % (4 * n));
        std::vector<std::pair<Key, RankPair>> pairs;
        pairs.reserve(n);
        for (Key k : key_set) {
            RankPair r;
            r.r1 = gen() % 4;
            r.r2 = 1 + gen() % 3;
            pairs.emplace_back(k, r);
        }
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), gen);

        const RankPolicy shape = RankPolicy::zipzip(16, 3);
        ZipTree inc = incremental_from(pairs, order, shape);
        ZipTree canon = ZipTree::build_canonical(pairs, shape);
        ++report.checks;
        if (!same_tree(inc, canon)) {
            note(report, "randomized oracle mismatch, instance " + std::to_string(i));
            continue;
        }

        // erase a third and compare against the survivors' canonical tree
        std::vector<std::pair<Key, RankPair>> survivors;
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            if (j % 3 == 0)
                inc.erase(pairs[j].first);
            else
                survivors.push_back(pairs[j]);
        }
        ZipTree canon2 = ZipTree::build_canonical(survivors, shape);
        ++report.checks;
        if (!same_tree(inc, canon2))
            note(report, "randomized oracle mismatch after erases, instance " +
                             std::to_string(i));
    }
    return report;
}

namespace {

void persistence_walk(const PersistentTree& t, std::vector<std::set<Key>>& snaps,
                      int depth, Key key_universe, double max_slots_per_update,
                      CheckReport& report) {
    for (std::uint32_t v = 0; v < snaps.size(); ++v) {
        bool bad = t.size_at(v) != snaps[v].size();
        for (Key k = 0; k < key_universe && !bad; ++k)
            bad = t.search(v, k) != (snaps[v].count(k) != 0);
        ++report.checks;
        if (bad)
            note(report,
                 "persistence: version " + std::to_string(v) + " diverged at depth " +
                     std::to_string(static_cast<int>(snaps.size()) - 1));
    }
    const std::uint32_t newest = t.newest_version();
    if (newest > 0 &&
        static_cast<double>(t.cumulative_slots_at(newest)) / newest > max_slots_per_update)
        note(report, "persistence: slot budget exceeded at version " + std::to_string(newest));
    if (depth == 0) return;
    for (Key k = 0; k < key_universe; ++k) {
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
            persistence_walk(next, snaps, depth - 1, key_universe, max_slots_per_update,
                             report);
            snaps.pop_back();
        }
    }
}

}  // namespace

CheckReport persistence_exhaustive(int max_len, Key key_universe,
                                   double max_slots_per_update) {
    CheckReport report;
    PersistentTree t(RankPolicy::zipzip(64, 3), KeyedRng(4242));
    std::vector<std::set<Key>> snaps{{}};
    persistence_walk(t, snaps, max_len, key_universe, max_slots_per_update, report);
    return report;
}

CheckReport persistence_random(std::size_t workloads, std::uint64_t n,
                               std::uint64_t master_seed, double max_slots_per_update) {
    CheckReport report;
    const std::uint64_t universe = n + n / 4;
    for (std::size_t w = 0; w < workloads; ++w) {
        const std::uint64_t seed = mix64(master_seed, static_cast<std::uint64_t>(w), 0x7773ULL);
        PersistentTree t(RankPolicy::zipzip(universe, 3), KeyedRng(seed));
        std::mt19937_64 gen(mix64(seed, 1));

        std::vector<Key> grow(n);
        std::iota(grow.begin(), grow.end(), 0);
        std::shuffle(grow.begin(), grow.end(), gen);

        std::set<Key> model;
        std::vector<std::pair<std::uint32_t, std::set<Key>>> checkpoints;
        auto step = [&](bool is_insert, Key k) {
            if (is_insert) {
                t.insert(k);
                model.insert(k);
            } else {
                t.erase(k);
                model.erase(k);
            }
            const std::uint32_t v = t.newest_version();
            if (v % 1024 == 0) checkpoints.emplace_back(v, model);
            if (static_cast<double>(t.cumulative_slots_at(v)) / v > max_slots_per_update) {
                ++report.checks;
                note(report, "persistence: slot budget exceeded in workload " +
                                 std::to_string(w) + " at version " + std::to_string(v));
            }
        };
        for (Key k : grow) step(true, k);
        for (std::uint64_t i = 0; i < n / 2; ++i)
            step((gen() & 1) != 0, gen() % universe);
        checkpoints.emplace_back(t.newest_version(), model);

        for (const auto& [version, snap] : checkpoints) {
            ++report.checks;
            if (t.size_at(version) != snap.size()) {
                note(report, "persistence: size drift in workload " + std::to_string(w) +
                                 " at version " + std::to_string(version));
                continue;
            }
            bool bad = false;
            for (Key k = 0; k < universe && !bad; k += 13)
                bad = t.search(version, k) != (snap.count(k) != 0);
            std::size_t idx = 0;
            for (Key k : snap) {
                if (bad) break;
                if (idx++ % 29 == 0) bad = !t.search(version, k);
            }
            if (bad)
                note(report, "persistence: membership drift in workload " +
                                 std::to_string(w) + " at version " + std::to_string(version));
        }
        for (const auto& v : validate(t)) note(report, "persistence: " + v);
    }
    return report;
}

}  // namespace zipzip
