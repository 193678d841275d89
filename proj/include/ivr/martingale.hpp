#pragma once

#include <gmpxx.h>

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ivr/bits.hpp"

namespace ivr {

using Int = mpz_class;
using Stage = uint64_t;

inline constexpr Stage kLimitStage = std::numeric_limits<Stage>::max();

// A wager is a signed integer: stake |w| on child bit 1 if w > 0, on child
// bit 0 if w < 0, neutral if 0. Fairness then holds by construction:
// value(s0) + value(s1) = 2*value(s) for every wagered node.
struct WagerEntry {
  Int amount;
  Stage defined_at = 0;
};

// Wager source for builtin strategies: a pure function of the node, with a
// per-node availability stage. Deterministic by construction.
class WagerRule {
 public:
  virtual ~WagerRule() = default;
  virtual std::optional<Int> amount(const BinaryString& node) const = 0;
  virtual Stage available_from(const BinaryString& node) const = 0;
  // True iff every node of length < len has a wager declared by `stage`.
  virtual bool total_to_length(size_t len, Stage stage) const = 0;
};

// A (possibly partial, possibly staged) integer-valued betting strategy.
// Wagers come from an explicit map, an optional neutral-by-default region
// (used by strategies that bet on one path and stand pat elsewhere), or a
// rule. Once declared, a wager never changes at later stages.
class MartingaleTable {
 public:
  MartingaleTable() : initial_capital_(0) {}
  explicit MartingaleTable(Int initial_capital) : initial_capital_(std::move(initial_capital)) {}

  static MartingaleTable from_rule(Int initial_capital, std::shared_ptr<const WagerRule> rule);

  const Int& initial_capital() const { return initial_capital_; }

  // Declares the wager at `node`. Throws if a different wager is already
  // present; declaring the identical wager again is a no-op.
  void declare(const BinaryString& node, Int amount, Stage defined_at = 0);

  // Marks every not-explicitly-wagered node of length < depth as neutral
  // from `from_stage` on. Monotone: later calls may only raise the depth.
  void extend_neutral(size_t depth, Stage from_stage);

  std::optional<Int> wager_at(const BinaryString& node, Stage stage) const;

  // First stage at which the node carries a wager; nullopt if it never does.
  std::optional<Stage> available_from(const BinaryString& node) const;

  // True iff every node of length < len has a wager declared by `stage`
  // (equivalently: the value is defined on all strings of length len).
  bool total_to_length(size_t len, Stage stage) const;

  bool rule_backed() const { return rule_ != nullptr; }
  const std::map<BinaryString, WagerEntry, LenLexLess>& entries() const { return entries_; }
  size_t neutral_depth_at(Stage stage) const;
  size_t max_entry_length() const;

 private:
  Int initial_capital_;
  std::map<BinaryString, WagerEntry, LenLexLess> entries_;
  std::map<size_t, std::vector<Stage>> depth_stages_;  // sorted per depth
  std::vector<std::pair<Stage, size_t>> neutral_steps_;  // (from_stage, depth), both increasing
  std::shared_ptr<const WagerRule> rule_;
};

// A martingale restricted to the wagers declared by a given stage: the m_s
// snapshot. Stage kLimitStage is the limit table.
class MartingaleView {
 public:
  MartingaleView(const MartingaleTable& table, Stage stage) : table_(&table), stage_(stage) {}

  const MartingaleTable& table() const { return *table_; }
  Stage stage() const { return stage_; }
  const Int& initial_capital() const { return table_->initial_capital(); }

  std::optional<Int> wager(const BinaryString& node) const {
    return table_->wager_at(node, stage_);
  }

  // Defined at sigma iff every proper prefix carries a wager.
  bool defined(const BinaryString& sigma) const;

  // initial capital plus the won/lost stakes along sigma; nullopt if any
  // proper prefix is unwagered (partiality, not invalidity).
  std::optional<Int> value(const BinaryString& sigma) const;

  // max over 0 <= n <= |sigma| of value(sigma|n); nullopt if undefined.
  std::optional<Int> max_value_along(const BinaryString& sigma) const;

  bool total_to_length(size_t len) const { return table_->total_to_length(len, stage_); }

 private:
  const MartingaleTable* table_;
  Stage stage_;
};

inline MartingaleView snapshot(const MartingaleTable& table, Stage stage) {
  return MartingaleView(table, stage);
}
inline MartingaleView limit(const MartingaleTable& table) {
  return MartingaleView(table, kLimitStage);
}

// Value restriction of Def-style F-valued / single-valued strategies.
struct ValueConstraint {
  enum class Kind { Integer, FValued, Single };
  Kind kind = Kind::Integer;
  std::vector<Int> allowed;  // F, sorted (FValued); {a, 0} is implied for Single
  Int single_stake = 0;      // a != 0

  static ValueConstraint integer() { return {}; }
  static ValueConstraint f_valued(std::vector<Int> f);
  static ValueConstraint single(Int a);

  bool admits(const Int& magnitude) const;
  std::string describe() const;
};

struct Violation {
  enum class Kind { NegativeValue, OrphanWager, StakeOutsideConstraint, StakeExceedsCapital };
  Kind kind;
  BinaryString node;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

// Walks the defined region down to `depth` and reports every violation:
// reachable negative values, orphan wagers (non-downward-closed domain),
// stakes outside the constraint, stakes exceeding the capital at hand.
ValidationReport validate(const MartingaleView& m, const ValueConstraint& constraint,
                          size_t depth);

// Builtin strategies. All stakes are capped at the current capital so the
// strategy never books a negative balance.
MartingaleTable make_doubling(int bit, Int initial_capital, Stage available_from = 0);
MartingaleTable make_constant_bet(int bit, Int stake, Int initial_capital,
                                  Stage available_from = 0);
MartingaleTable make_bet_on_bit(int bit, Int stake, Int initial_capital,
                                Stage available_from = 0);
MartingaleTable make_copycat(std::shared_ptr<const MartingaleTable> other, Stage delay);

}  // namespace ivr
