#pragma once

#include <optional>
#include <vector>

#include "ivr/martingale.hpp"

// Exhaustive cone searches over candidate extensions, plus the move-bound
// table. Each kernel has a serial reference implementation and an OpenMP
// one; results are bit-identical (argmin over a totally ordered key), so the
// parallel kernels are safe to use wherever the serial ones are. test_search
// asserts the agreement; bench/ compares their throughput.

namespace ivr::search {

// Lex-least tau extending base with |tau| == len and value(tau) <= bound.
// nullopt when no extension qualifies (or none is defined).
std::optional<BinaryString> least_value_extension_serial(const MartingaleView& m,
                                                         const BinaryString& base, size_t len,
                                                         const Int& bound);
std::optional<BinaryString> least_value_extension_parallel(const MartingaleView& m,
                                                           const BinaryString& base, size_t len,
                                                           const Int& bound);
std::optional<BinaryString> least_value_extension(const MartingaleView& m,
                                                  const BinaryString& base, size_t len,
                                                  const Int& bound);

struct MaximinOutcome {
  BinaryString choice;
  size_t min_distance = 0;  // min over forbidden of distance(choice, mu); SIZE_MAX if none
};

// Among strings of length len extending base (excluding `visited` when
// require_unvisited), pick one maximizing the min distance to the forbidden
// strings (all of length len); ties go to the lex-least. nullopt when the
// cone holds no eligible string.
std::optional<MaximinOutcome> maximin_enumerate_serial(
    const std::vector<BinaryString>& forbidden, const BinaryString& base, size_t len,
    const StringSet& visited, bool require_unvisited);
std::optional<MaximinOutcome> maximin_enumerate_parallel(
    const std::vector<BinaryString>& forbidden, const BinaryString& base, size_t len,
    const StringSet& visited, bool require_unvisited);

// Prefix-pruned search; handles gaps far beyond enumeration range. Agrees
// with the enumeration kernels wherever both run.
std::optional<MaximinOutcome> maximin_pruned(const std::vector<BinaryString>& forbidden,
                                             const BinaryString& base, size_t len,
                                             const StringSet& visited, bool require_unvisited);

// n(k) for k in [0, kmax] by the literal mu-search
// n(k) = (mu n)(k - 1 - 2 - ... - 2^(n-1) < k/2), with n(0) = 0 by convention.
std::vector<uint32_t> move_bound_table_serial(uint64_t kmax);
std::vector<uint32_t> move_bound_table_parallel(uint64_t kmax);

bool openmp_enabled();
int worker_count();

}  // namespace ivr::search
