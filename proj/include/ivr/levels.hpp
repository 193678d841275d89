#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ivr/martingale.hpp"

namespace ivr {

enum class LevelVariant { Plain, Coding, Pivr };

const char* variant_name(LevelVariant v);
std::optional<LevelVariant> variant_from_name(const std::string& name);

class LevelOverflowError : public std::runtime_error {
 public:
  explicit LevelOverflowError(size_t index)
      : std::runtime_error("level overflow at index " + std::to_string(index)) {}
};

class ConeExhaustedError : public std::runtime_error {
 public:
  ConeExhaustedError() : std::runtime_error("cone exhausted") {}
};

// Forbidden-string count bound per level step: f_{i+1} (plain) or f'_{i+1}
// (coding). The pivr bound depends on the level table (2^{d_i}), see
// LevelTable::forbidden_limit.
Int forbidden_bound(size_t i, LevelVariant variant);

// Least n with k - (2^n - 1) < k/2, exactly; n(0) = 0 by convention. The
// maximum distance a capital-k integer bettor can push the construction
// toward a forbidden string before its capital halves.
size_t move_bound(const Int& k);

// Least x with 2^x >= f, for f >= 1.
size_t gap_exponent(const Int& f);

struct LevelTable {
  LevelVariant variant = LevelVariant::Plain;
  std::vector<Int> capitals;                   // declared adversary capitals m_k(lambda)
  std::vector<Int> l;                          // l_0 .. l_count
  std::vector<Int> d;                          // d_0 .. d_count
  std::vector<std::vector<Int>> intermediate;  // row i+1: l_{i+1,0} .. l_{i+1,i+1}
  std::vector<Int> f;                          // row i+1: the variant's forbidden bound

  size_t count() const { return l.empty() ? 0 : l.size() - 1; }
  // l_i as a materializable string length.
  size_t level_len(size_t i) const;
  Int forbidden_limit(size_t i) const;  // bound on forbidden strings of length l_{i+1}
};

// Fills l, d and the intermediate grids per the variant's recursion up to
// index `count`. Exponents above max_exponent raise LevelOverflowError.
LevelTable build_levels(LevelVariant variant, std::vector<Int> capitals, size_t count,
                        size_t max_exponent = (size_t(1) << 20));

struct ForbiddenEntry {
  size_t level = 0;
  BinaryString value;
  Stage stage = 0;
  std::string cause;
};

struct BoundViolation {
  size_t level = 0;
  BinaryString prefix;
  Int count;
  Int bound;
};

// Registered forbidden strings, grouped by level index. Registration is
// idempotent; the per-cone count check is a diagnostic, never an abort.
class ForbiddenRegistry {
 public:
  explicit ForbiddenRegistry(const LevelTable* table = nullptr) : table_(table) {}

  // Returns true if newly added. Throws if |value| != l_level.
  bool insert(size_t level, const BinaryString& value, Stage stage, std::string cause);

  const StringSet& at_level(size_t level) const;
  std::vector<BinaryString> of_length(size_t len,
                                      const BinaryString* extending = nullptr) const;
  size_t count_above(size_t level, const BinaryString& prefix) const;
  const std::vector<ForbiddenEntry>& entries() const { return entries_; }
  const std::vector<BoundViolation>& bound_violations() const { return violations_; }
  size_t size() const { return entries_.size(); }

 private:
  const LevelTable* table_;
  std::map<size_t, StringSet> by_level_;
  std::vector<ForbiddenEntry> entries_;
  std::vector<BoundViolation> violations_;
};

// Among strings of length target_len extending base (excluding visited when
// required), maximize the min distance to the registered forbidden strings
// of that length (restricted to those extending forbidden_cone when given);
// ties go to the (length,lex)-least. Dispatches to exhaustive enumeration
// when target_len - |base| <= enumeration_cap, else to the pruned search.
BinaryString maximin_select(const ForbiddenRegistry& reg, const BinaryString& base,
                            size_t target_len, const StringSet& visited, bool require_unvisited,
                            const BinaryString* forbidden_cone = nullptr,
                            size_t enumeration_cap = 20);

}  // namespace ivr
