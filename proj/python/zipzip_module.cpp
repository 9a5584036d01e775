// Python bindings for the tree family. The surface mirrors what the CLI
// exercises: build a tree under a named rank policy, update it, inspect
// depths and structure, and replay history on the persistent variant.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <stdexcept>
#include <string>

#include "zipzip/persist.hpp"
#include "zipzip/stats.hpp"
#include "zipzip/ziptree.hpp"

namespace py = pybind11;
using namespace zipzip;

namespace {

RankPolicy make_policy(const std::string& variant, std::uint64_t n_cap, unsigned c,
                       double p, const std::map<std::uint64_t, std::uint64_t>& weights) {
    if (variant == "original") return RankPolicy::original();
    if (variant == "uniform") return RankPolicy::uniform(n_cap, c);
    if (variant == "zipzip") return RankPolicy::zipzip(n_cap, c);
    if (variant == "variable_p") return RankPolicy::variable_p(p);
    if (variant == "biased") {
        // Copy the dict out so the policy owns plain data, not a handle
        // back into the interpreter.
        auto table = weights;
        return RankPolicy::biased(
            [table](Key k) {
                const auto it = table.find(k);
                return it == table.end() ? std::uint64_t{1} : it->second;
            },
            n_cap, c);
    }
    throw std::invalid_argument("unknown variant: " + variant);
}

KeyedRng make_rng(std::uint64_t seed, bool keyed) {
    return KeyedRng(seed, keyed ? RngMode::keyed : RngMode::fresh);
}

py::dict stats_dict(const ZipTree& t) {
    const TreeStats s = stats(t);
    py::dict d;
    d["height"] = s.height;
    d["root_r1"] = s.root_r1;
    py::dict depths;
    for (const auto& [key, depth] : s.per_key_depth) depths[py::int_(key)] = depth;
    d["per_key_depth"] = depths;
    d["rank_group_sizes"] = s.rank_group_sizes;
    return d;
}

}  // namespace

PYBIND11_MODULE(zipzip, m) {
    m.doc() = "zip tree family: randomized search trees with one or two ranks per key";

    py::class_<ZipTree>(m, "ZipTree")
        .def(py::init([](const std::string& variant, std::uint64_t n_cap, unsigned c,
                         double p, std::uint64_t seed, bool keyed,
                         const std::map<std::uint64_t, std::uint64_t>& weights) {
                 return ZipTree(make_policy(variant, n_cap, c, p, weights),
                                make_rng(seed, keyed));
             }),
             py::arg("variant") = "zipzip", py::arg("n_cap") = 1 << 16,
             py::arg("c") = 3, py::arg("p") = 0.5, py::arg("seed") = 0,
             py::arg("keyed") = true,
             py::arg("weights") = std::map<std::uint64_t, std::uint64_t>{},
             "Build an empty tree. `variant` picks the rank policy; keys not in "
             "`weights` weigh 1 for the biased variant; `keyed` randomness makes "
             "the final shape a function of the key set alone.")
        .def("insert", &ZipTree::insert, py::arg("key"),
             "Insert a key. False if it was already present.")
        .def("erase", &ZipTree::erase, py::arg("key"),
             "Remove a key. False if it was absent.")
        .def(
            "search",
            [](const ZipTree& t, Key key) {
                const auto r = t.search(key);
                return py::make_tuple(r.found, r.depth);
            },
            py::arg("key"),
            "(found, depth): depth counts nodes on the comparison path, root = 1.")
        .def("__contains__", [](const ZipTree& t, Key key) { return t.search(key).found; })
        .def("__len__", &ZipTree::size)
        .def("stats", &stats_dict,
             "Shape summary: height, root_r1, per-key depths, rank group sizes.")
        .def("serialize", [](const ZipTree& t) { return serialize(t); },
             "Canonical text form; equal strings mean structurally equal trees.")
        .def("validate", [](const ZipTree& t) { return validate(t); },
             "Structural audit. Empty list means the tree is sound.");

    py::class_<PersistentTree>(m, "PersistentTree")
        .def(py::init([](const std::string& variant, std::uint64_t n_cap, unsigned c,
                         double p, std::uint64_t seed) {
                 return PersistentTree(make_policy(variant, n_cap, c, p, {}),
                                       KeyedRng(seed, RngMode::keyed));
             }),
             py::arg("variant") = "zipzip", py::arg("n_cap") = 1 << 16,
             py::arg("c") = 3, py::arg("p") = 0.5, py::arg("seed") = 0,
             "Partially persistent tree: updates stamp new versions, every "
             "version stays queryable. Randomness is always keyed.")
        .def("insert", &PersistentTree::insert, py::arg("key"),
             "Insert and return the new version id.")
        .def("erase", &PersistentTree::erase, py::arg("key"),
             "Erase and return the new version id.")
        .def("search", &PersistentTree::search, py::arg("version"), py::arg("key"),
             "Whether `key` was present as of `version`.")
        .def("newest_version", &PersistentTree::newest_version)
        .def("size_at", &PersistentTree::size_at, py::arg("version"))
        .def("__len__",
             [](const PersistentTree& t) { return t.size_at(t.newest_version()); })
        .def("serialize_newest", &PersistentTree::serialize_newest,
             "Canonical text form of the newest version.")
        .def("space",
             [](const PersistentTree& t) {
                 const auto s = t.space_stats();
                 py::dict d;
                 d["versions"] = s.versions;
                 d["nodes"] = s.nodes;
                 d["slot_entries"] = s.slot_entries;
                 d["slots_per_update"] = s.slots_per_update;
                 return d;
             },
             "Fat-node storage accounting across all versions.");

    m.def("expected_depth", &expected_depth, py::arg("j"), py::arg("n"),
          "Expected depth of the j-th smallest of n keys under two-rank "
          "policies: H_j + H_{n-j+1} - 1 (root depth 1).");
    m.def("variants", [] {
        return std::vector<std::string>{"original", "uniform", "zipzip", "variable_p",
                                        "biased"};
    });
}
