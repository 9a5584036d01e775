#include "zipzip/persist.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace zipzip {

using detail::kNull;

struct PersistView {
    PersistentTree& t;
    std::uint32_t version;  // the version being written
    std::uint32_t working_root;

    Key key(std::uint32_t i) const { return t.nodes_[i].key; }
    std::uint32_t left(std::uint32_t i) const { return newest(t.nodes_[i].left_slots); }
    std::uint32_t right(std::uint32_t i) const { return newest(t.nodes_[i].right_slots); }
    void set_left(std::uint32_t i, std::uint32_t j) { write(t.nodes_[i].left_slots, j); }
    void set_right(std::uint32_t i, std::uint32_t j) { write(t.nodes_[i].right_slots, j); }
    std::uint32_t root() const { return working_root; }
    void set_root(std::uint32_t j) { working_root = j; }

    bool dominates(std::uint32_t a, std::uint32_t b) const {
        const FatNode& x = t.nodes_[a];
        const FatNode& y = t.nodes_[b];
        return zipzip::dominates(x.rank, x.key, y.rank, y.key);
    }

    static std::uint32_t newest(const std::vector<FatSlot>& slots) {
        return slots.empty() ? kNull : slots.back().child;
    }
    void write(std::vector<FatSlot>& slots, std::uint32_t j) {
        if (!slots.empty() && slots.back().version == version) {
            slots.back().child = j;
        } else {
            slots.push_back({version, j});
            ++t.slot_entries_;
        }
    }
};

PersistentTree::PersistentTree(RankPolicy policy, KeyedRng rng)
    : policy_(std::move(policy)), rng_(std::move(rng)) {
    policy_.validate();
    if (rng_.mode != RngMode::keyed)
        throw std::invalid_argument("persistent tree requires keyed randomness");
    roots_.push_back(kNull);
    sizes_.push_back(0);
    slots_hist_.push_back(0);
}

std::uint32_t PersistentTree::node_for(Key key) {
    auto it = node_of_key_.find(key);
    if (it != node_of_key_.end()) return it->second;
    const std::uint32_t i = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(FatNode{key, make_rank(policy_, key, rng_), {}, {}});
    node_of_key_.emplace(key, i);
    return i;
}

std::uint32_t PersistentTree::child_at(std::uint32_t node, bool left,
                                       std::uint32_t version) const {
    const auto& slots = left ? nodes_[node].left_slots : nodes_[node].right_slots;
    auto it = std::upper_bound(
        slots.begin(), slots.end(), version,
        [](std::uint32_t v, const FatSlot& s) { return v < s.version; });
    if (it == slots.begin()) return kNull;
    return std::prev(it)->child;
}

std::uint32_t PersistentTree::insert(Key key) {
    const std::uint32_t v = static_cast<std::uint32_t>(roots_.size());
    if (search(v - 1, key)) {
        roots_.push_back(roots_.back());
        sizes_.push_back(sizes_.back());
        slots_hist_.push_back(slot_entries_);
        return v;
    }
    const std::uint32_t x = node_for(key);
    PersistView view{*this, v, roots_.back()};
    detail::engine_insert_linked(view, x);
    roots_.push_back(view.working_root);
    sizes_.push_back(sizes_.back() + 1);
    slots_hist_.push_back(slot_entries_);
    return v;
}

std::uint32_t PersistentTree::erase(Key key) {
    const std::uint32_t v = static_cast<std::uint32_t>(roots_.size());
    PersistView view{*this, v, roots_.back()};
    const std::uint32_t gone = detail::engine_erase(view, key);
    roots_.push_back(view.working_root);
    sizes_.push_back(gone == kNull ? sizes_.back() : sizes_.back() - 1);
    slots_hist_.push_back(slot_entries_);
    return v;
}

bool PersistentTree::search(std::uint32_t version, Key key) const {
    if (version >= roots_.size()) throw std::out_of_range("unknown version");
    std::uint32_t cur = roots_[version];
    while (cur != kNull) {
        if (nodes_[cur].key == key) return true;
        cur = child_at(cur, key < nodes_[cur].key, version);
    }
    return false;
}

std::size_t PersistentTree::size_at(std::uint32_t version) const {
    if (version >= sizes_.size()) throw std::out_of_range("unknown version");
    return sizes_[version];
}

std::uint64_t PersistentTree::cumulative_slots_at(std::uint32_t version) const {
    if (version >= slots_hist_.size()) throw std::out_of_range("unknown version");
    return slots_hist_[version];
}

PersistentTree::SpaceStats PersistentTree::space_stats() const {
    SpaceStats s;
    s.versions = roots_.size();
    s.nodes = nodes_.size();
    s.slot_entries = slot_entries_;
    const std::size_t updates = roots_.size() - 1;
    s.slots_per_update =
        updates == 0 ? 0.0
                     : static_cast<double>(slot_entries_) / static_cast<double>(updates);
    return s;
}

std::string PersistentTree::serialize_newest() const {
    std::string out;
    const std::uint32_t version = newest_version();
    if (roots_[version] == kNull) return out;
    struct Frame {
        std::uint32_t idx;
        std::uint32_t depth;
        char side;
    };
    std::vector<Frame> stack{{roots_[version], 0, 0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const FatNode& n = nodes_[f.idx];
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
        const std::uint32_t l = child_at(f.idx, true, version);
        const std::uint32_t r = child_at(f.idx, false, version);
        if (r != kNull) stack.push_back({r, f.depth + 1, 'R'});
        if (l != kNull) stack.push_back({l, f.depth + 1, 'L'});
    }
    return out;
}

std::vector<std::string> validate(const PersistentTree& tree) {
    std::vector<std::string> violations;
    std::uint64_t counted = 0;
    for (std::uint32_t i = 0; i < tree.fat_node_count(); ++i) {
        const FatNode& n = tree.fat_node(i);
        for (const auto* slots : {&n.left_slots, &n.right_slots}) {
            counted += slots->size();
            for (std::size_t s = 1; s < slots->size(); ++s) {
                if (!((*slots)[s - 1].version < (*slots)[s].version)) {
                    violations.push_back("slot versions not strictly increasing at key " +
                                         std::to_string(n.key));
                    break;
                }
            }
        }
    }
    const auto stats = tree.space_stats();
    if (counted != stats.slot_entries)
        violations.push_back("slot entry counter disagrees with stored slots");
    if (tree.change_count() != stats.slot_entries + stats.versions)
        violations.push_back("change count does not cover slots plus root entries");
    return violations;
}

std::string space_csv_header() { return "version,cumulative_slots,slots_per_update"; }

std::string space_csv(const PersistentTree& tree) {
    std::string out = space_csv_header() + "\n";
    char buf[96];
    for (std::uint32_t v = 0; v <= tree.newest_version(); ++v) {
        const std::uint64_t slots = tree.cumulative_slots_at(v);
        const double per =
            v == 0 ? 0.0 : static_cast<double>(slots) / static_cast<double>(v);
        std::snprintf(buf, sizeof buf, "%u,%llu,%.6f\n", v,
                      static_cast<unsigned long long>(slots), per);
        out += buf;
    }
    return out;
}

}  // namespace zipzip
