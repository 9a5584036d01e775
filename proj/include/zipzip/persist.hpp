#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "zipzip/engine.hpp"
#include "zipzip/ranks.hpp"

namespace zipzip {

// Child slot valid from `version` onward, until a later entry supersedes it.
struct FatSlot {
    std::uint32_t version;
    std::uint32_t child;
};

// A node that remembers every child link it ever had. Slot lists grow at the
// back only; reads binary-search for the newest entry at or before the
// queried version.
struct FatNode {
    Key key = 0;
    RankPair rank;
    std::vector<FatSlot> left_slots;
    std::vector<FatSlot> right_slots;
};

// Partially persistent tree: updates always extend the newest version, every
// older version stays readable. Version 0 is the empty tree; each update
// issues the next version id, duplicates and absent-key deletes included.
class PersistentTree {
public:
    // keyed randomness is required: a key's rank must survive delete and
    // re-insert so its fat node can be reused across versions
    PersistentTree(RankPolicy policy, KeyedRng rng);

    std::uint32_t insert(Key key);
    std::uint32_t erase(Key key);
    bool search(std::uint32_t version, Key key) const;

    std::uint32_t newest_version() const { return static_cast<std::uint32_t>(roots_.size() - 1); }
    std::size_t size_at(std::uint32_t version) const;

    struct SpaceStats {
        std::size_t versions = 0;
        std::size_t nodes = 0;
        std::uint64_t slot_entries = 0;
        double slots_per_update = 0.0;
    };
    SpaceStats space_stats() const;
    // every slot entry plus one root-table entry per version
    std::uint64_t change_count() const { return slot_entries_ + roots_.size(); }
    std::uint64_t cumulative_slots_at(std::uint32_t version) const;

    std::size_t fat_node_count() const { return nodes_.size(); }
    const FatNode& fat_node(std::uint32_t i) const { return nodes_[i]; }
    FatNode& mutable_fat_node(std::uint32_t i) { return nodes_[i]; }

    // newest version in the shared text form, for cross-engine comparisons
    std::string serialize_newest() const;

    const RankPolicy& policy() const { return policy_; }

private:
    friend struct PersistView;

    std::uint32_t node_for(Key key);
    std::uint32_t child_at(std::uint32_t node, bool left, std::uint32_t version) const;

    std::vector<FatNode> nodes_;
    std::unordered_map<Key, std::uint32_t> node_of_key_;
    std::vector<std::uint32_t> roots_;       // root per version
    std::vector<std::size_t> sizes_;         // key count per version
    std::vector<std::uint64_t> slots_hist_;  // cumulative slot entries per version
    std::uint64_t slot_entries_ = 0;
    RankPolicy policy_;
    KeyedRng rng_;
};

std::vector<std::string> validate(const PersistentTree& tree);
std::string space_csv_header();
std::string space_csv(const PersistentTree& tree);

}  // namespace zipzip
