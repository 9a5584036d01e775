#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zipzip/external.hpp"
#include "zipzip/jit.hpp"
#include "zipzip/persist.hpp"
#include "zipzip/ziptree.hpp"

namespace zipzip {

struct CheckReport {
    std::uint64_t checks = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    void merge(const CheckReport& other);
};

// Everything the property harnesses can drive.
enum class Harness {
    original,
    uniform,
    zipzip,
    variable_p,
    biased,
    jit,
    external,
    persistent
};
const char* harness_name(Harness h);
std::vector<Harness> all_harnesses();

// Structural equality: same keys, ranks and child topology.
bool same_tree(const ZipTree& a, const ZipTree& b);

// History independence: two different update histories reaching the same
// final key set under the same keyed seed must serialize identically. The
// jit harness is rejected (its metadata genuinely depends on history).
CheckReport hi_sequence_pairs(Harness h, std::size_t pairs, std::uint64_t master_seed);

// Mixed insert/erase/lookup fuzz against std::set, auditing the structure
// every audit_every ops and at the end. inject_fault corrupts the structure
// after the run and demands the audit notice, proving the checks have teeth.
CheckReport fuzz_harness(Harness h, std::uint64_t ops, std::uint64_t master_seed,
                         std::uint64_t audit_every = 1000, bool inject_fault = false);

// Incremental updates vs direct canonical construction. The exhaustive form
// covers key counts 0..max_keys with every r1 assignment from {0,1,2} (and,
// when asked, every r2 assignment from {1,2}); the randomized form builds
// n-key instances from a small rank universe, then erases a third of the
// keys and compares against the canonical tree of the survivors.
CheckReport oracle_exhaustive(std::size_t max_keys, bool with_r2_ties);
CheckReport oracle_randomized(std::size_t instances, std::uint64_t n,
                              std::uint64_t master_seed);

// Version audits: exhaustive op-sequence tree (every insert/erase sequence
// up to max_len over key_universe keys, all versions checked at every step)
// and larger random workloads with snapshot checkpoints. Both gate the
// cumulative slot count per update.
CheckReport persistence_exhaustive(int max_len, Key key_universe,
                                   double max_slots_per_update);
CheckReport persistence_random(std::size_t workloads, std::uint64_t n,
                               std::uint64_t master_seed, double max_slots_per_update);

}  // namespace zipzip
