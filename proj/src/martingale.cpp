#include "ivr/martingale.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace ivr {

MartingaleTable MartingaleTable::from_rule(Int initial_capital,
                                           std::shared_ptr<const WagerRule> rule) {
  MartingaleTable t(std::move(initial_capital));
  t.rule_ = std::move(rule);
  return t;
}

void MartingaleTable::declare(const BinaryString& node, Int amount, Stage defined_at) {
  if (rule_) throw std::logic_error("declare: table is rule-backed");
  auto it = entries_.find(node);
  if (it != entries_.end()) {
    if (it->second.amount != amount) {
      throw std::logic_error("conflicting wager redeclared at " + node.text());
    }
    if (defined_at < it->second.defined_at) it->second.defined_at = defined_at;
    return;
  }
  auto& stages = depth_stages_[node.size()];
  stages.insert(std::upper_bound(stages.begin(), stages.end(), defined_at), defined_at);
  entries_.emplace(node, WagerEntry{std::move(amount), defined_at});
}

void MartingaleTable::extend_neutral(size_t depth, Stage from_stage) {
  if (!neutral_steps_.empty()) {
    auto& [s, d] = neutral_steps_.back();
    if (from_stage < s || depth < d) {
      throw std::logic_error("extend_neutral must be monotone in stage and depth");
    }
    if (depth == d) return;
  }
  neutral_steps_.emplace_back(from_stage, depth);
}

size_t MartingaleTable::neutral_depth_at(Stage stage) const {
  size_t depth = 0;
  for (const auto& [s, d] : neutral_steps_) {
    if (s <= stage) depth = d;
  }
  return depth;
}

size_t MartingaleTable::max_entry_length() const {
  size_t n = neutral_steps_.empty() ? 0 : neutral_steps_.back().second;
  if (!depth_stages_.empty()) n = std::max(n, depth_stages_.rbegin()->first + 1);
  return n;
}

std::optional<Int> MartingaleTable::wager_at(const BinaryString& node, Stage stage) const {
  auto it = entries_.find(node);
  if (it != entries_.end() && it->second.defined_at <= stage) return it->second.amount;
  if (node.size() < neutral_depth_at(stage)) return Int(0);
  if (rule_ && rule_->available_from(node) <= stage) return rule_->amount(node);
  return std::nullopt;
}

std::optional<Stage> MartingaleTable::available_from(const BinaryString& node) const {
  std::optional<Stage> best;
  auto consider = [&](Stage s) {
    if (!best || s < *best) best = s;
  };
  auto it = entries_.find(node);
  if (it != entries_.end()) consider(it->second.defined_at);
  for (const auto& [s, d] : neutral_steps_) {
    if (node.size() < d) {
      consider(s);
      break;  // steps are increasing in both fields
    }
  }
  if (rule_) {
    Stage a = rule_->available_from(node);
    if (a != kLimitStage) consider(a);
  }
  return best;
}

bool MartingaleTable::total_to_length(size_t len, Stage stage) const {
  if (len == 0) return true;
  if (rule_) return rule_->total_to_length(len, stage);
  size_t neutral = neutral_depth_at(stage);
  for (size_t d = neutral; d < len; ++d) {
    // 2^d explicit wagers needed at depth d; impossible to materialize at 63+.
    if (d >= 63) return false;
    auto it = depth_stages_.find(d);
    if (it == depth_stages_.end()) return false;
    const auto& stages = it->second;
    size_t have = static_cast<size_t>(
        std::upper_bound(stages.begin(), stages.end(), stage) - stages.begin());
    if (have < (uint64_t(1) << d)) return false;
  }
  return true;
}

bool MartingaleView::defined(const BinaryString& sigma) const {
  BinaryString node;
  for (size_t n = 0; n < sigma.size(); ++n) {
    if (!wager(node).has_value()) return false;
    node.push_back(sigma.bit(n));
  }
  return true;
}

std::optional<Int> MartingaleView::value(const BinaryString& sigma) const {
  Int v = initial_capital();
  BinaryString node;
  for (size_t n = 0; n < sigma.size(); ++n) {
    auto w = wager(node);
    if (!w) return std::nullopt;
    if (sigma.bit(n) == 1) v += *w; else v -= *w;
    node.push_back(sigma.bit(n));
  }
  return v;
}

std::optional<Int> MartingaleView::max_value_along(const BinaryString& sigma) const {
  Int v = initial_capital();
  Int best = v;
  BinaryString node;
  for (size_t n = 0; n < sigma.size(); ++n) {
    auto w = wager(node);
    if (!w) return std::nullopt;
    if (sigma.bit(n) == 1) v += *w; else v -= *w;
    if (v > best) best = v;
    node.push_back(sigma.bit(n));
  }
  return best;
}

ValueConstraint ValueConstraint::f_valued(std::vector<Int> f) {
  ValueConstraint c;
  c.kind = Kind::FValued;
  std::sort(f.begin(), f.end());
  c.allowed = std::move(f);
  return c;
}

ValueConstraint ValueConstraint::single(Int a) {
  if (a == 0) throw std::invalid_argument("single-valued constraint needs a != 0");
  ValueConstraint c;
  c.kind = Kind::Single;
  c.single_stake = std::move(a);
  return c;
}

bool ValueConstraint::admits(const Int& magnitude) const {
  switch (kind) {
    case Kind::Integer:
      return true;
    case Kind::FValued:
      return std::binary_search(allowed.begin(), allowed.end(), magnitude);
    case Kind::Single:
      return magnitude == 0 || magnitude == single_stake;
  }
  return false;
}

std::string ValueConstraint::describe() const {
  switch (kind) {
    case Kind::Integer:
      return "integer";
    case Kind::FValued: {
      std::string s = "F={";
      for (size_t i = 0; i < allowed.size(); ++i) {
        if (i) s += ",";
        s += allowed[i].get_str();
      }
      return s + "}";
    }
    case Kind::Single:
      return "single a=" + single_stake.get_str();
  }
  return "?";
}

namespace {

void validate_walk(const MartingaleView& m, const ValueConstraint& constraint, size_t depth,
                   BinaryString& node, Int value, ValidationReport& out) {
  if (value < 0) {
    out.violations.push_back({Violation::Kind::NegativeValue, node,
                              "value " + value.get_str() + " at " +
                                  (node.empty() ? "(empty)" : node.text())});
    return;  // children only get worse on one side; report the first point of failure
  }
  if (node.size() >= depth) return;
  auto w = m.wager(node);
  if (!w) return;  // partial: absence is not a violation
  Int mag = abs(*w);
  if (!constraint.admits(mag)) {
    out.violations.push_back({Violation::Kind::StakeOutsideConstraint, node,
                              "wager " + mag.get_str() + " outside " + constraint.describe() +
                                  " at " + (node.empty() ? "(empty)" : node.text())});
  }
  if (mag > value) {
    out.violations.push_back({Violation::Kind::StakeExceedsCapital, node,
                              "stake " + mag.get_str() + " exceeds capital " + value.get_str() +
                                  " at " + (node.empty() ? "(empty)" : node.text())});
  }
  for (int b = 0; b <= 1; ++b) {
    node.push_back(b);
    Int child = b == 1 ? Int(value + *w) : Int(value - *w);
    validate_walk(m, constraint, depth, node, child, out);
    node.pop_back();
  }
}

}  // namespace

ValidationReport validate(const MartingaleView& m, const ValueConstraint& constraint,
                          size_t depth) {
  ValidationReport out;
  for (const auto& [node, entry] : m.table().entries()) {
    if (entry.defined_at > m.stage() || node.empty()) continue;
    bool orphan = false;
    for (size_t n = 0; n < node.size() && !orphan; ++n) {
      orphan = !m.wager(node.prefix(n)).has_value();
    }
    if (orphan) {
      out.violations.push_back({Violation::Kind::OrphanWager, node,
                                "wager at " + node.text() + " but an ancestor is unwagered"});
    }
  }
  BinaryString node;
  validate_walk(m, constraint, depth, node, m.initial_capital(), out);
  return out;
}

namespace {

// Shared walk for the capital-capped builtins: replays the schedule along the
// node's bits and reports the stake the strategy places at that node.
class PathRule : public WagerRule {
 public:
  PathRule(Stage from) : from_(from) {}
  Stage available_from(const BinaryString&) const override { return from_; }
  bool total_to_length(size_t, Stage stage) const override { return from_ <= stage; }

 protected:
  Stage from_;
};

class DoublingRule : public PathRule {
 public:
  DoublingRule(int bit, Int capital, Stage from)
      : PathRule(from), bit_(bit), capital_(std::move(capital)) {}

  std::optional<Int> amount(const BinaryString& node) const override {
    Int value = capital_;
    Int schedule = 1;
    Int stake;
    for (size_t i = 0; i <= node.size(); ++i) {
      stake = schedule <= value ? schedule : value;
      if (i == node.size()) break;
      if (stake > 0) {
        if (node.bit(i) == bit_) {
          value += stake;
          schedule = 1;  // reset after a win
        } else {
          value -= stake;
          schedule *= 2;  // double after a loss
        }
      }
      // neutral steps leave the schedule alone
    }
    return bit_ == 1 ? stake : Int(-stake);
  }

 private:
  int bit_;
  Int capital_;
};

class FixedStakeRule : public PathRule {
 public:
  FixedStakeRule(int bit, Int stake, Int capital, bool cap_at_capital, Stage from)
      : PathRule(from),
        bit_(bit),
        stake_(std::move(stake)),
        capital_(std::move(capital)),
        cap_(cap_at_capital) {}

  std::optional<Int> amount(const BinaryString& node) const override {
    Int value = capital_;
    Int stake;
    for (size_t i = 0; i <= node.size(); ++i) {
      if (cap_) {
        stake = stake_ <= value ? stake_ : value;  // bet_on_bit: bet what is left
      } else {
        stake = stake_ <= value ? stake_ : Int(0);  // constant_bet: go neutral
      }
      if (i == node.size()) break;
      if (stake > 0) { if (node.bit(i) == bit_) value += stake; else value -= stake; }
    }
    return bit_ == 1 ? stake : Int(-stake);
  }

 private:
  int bit_;
  Int stake_;
  Int capital_;
  bool cap_;
};

class CopycatRule : public WagerRule {
 public:
  CopycatRule(std::shared_ptr<const MartingaleTable> other, Stage delay)
      : other_(std::move(other)), delay_(delay) {}

  std::optional<Int> amount(const BinaryString& node) const override {
    return other_->wager_at(node, kLimitStage);
  }
  Stage available_from(const BinaryString& node) const override {
    Stage base = kLimitStage;
    auto it = other_->entries().find(node);
    if (it != other_->entries().end()) {
      base = it->second.defined_at;
    } else if (other_->wager_at(node, kLimitStage).has_value()) {
      // find the first stage at which the inner table answers here
      Stage lo = 0, hi = kLimitStage;
      if (other_->wager_at(node, 0).has_value()) {
        base = 0;
      } else {
        while (lo + 1 < hi) {
          Stage mid = lo + (hi - lo) / 2;
          (other_->wager_at(node, mid).has_value() ? hi : lo) = mid;
        }
        base = hi;
      }
    }
    if (base == kLimitStage) return kLimitStage;
    return base > kLimitStage - delay_ ? kLimitStage : base + delay_;
  }
  bool total_to_length(size_t len, Stage stage) const override {
    if (len == 0) return true;
    if (stage != kLimitStage && stage < delay_) return false;
    return other_->total_to_length(len, stage == kLimitStage ? stage : stage - delay_);
  }

 private:
  std::shared_ptr<const MartingaleTable> other_;
  Stage delay_;
};

}  // namespace

MartingaleTable make_doubling(int bit, Int initial_capital, Stage available_from) {
  Int cap = initial_capital;
  return MartingaleTable::from_rule(
      std::move(initial_capital),
      std::make_shared<DoublingRule>(bit, std::move(cap), available_from));
}

MartingaleTable make_constant_bet(int bit, Int stake, Int initial_capital, Stage available_from) {
  Int cap = initial_capital;
  return MartingaleTable::from_rule(
      std::move(initial_capital),
      std::make_shared<FixedStakeRule>(bit, std::move(stake), std::move(cap), false,
                                       available_from));
}

MartingaleTable make_bet_on_bit(int bit, Int stake, Int initial_capital, Stage available_from) {
  Int cap = initial_capital;
  return MartingaleTable::from_rule(
      std::move(initial_capital),
      std::make_shared<FixedStakeRule>(bit, std::move(stake), std::move(cap), true,
                                       available_from));
}

MartingaleTable make_copycat(std::shared_ptr<const MartingaleTable> other, Stage delay) {
  Int cap = other->initial_capital();
  return MartingaleTable::from_rule(std::move(cap),
                                    std::make_shared<CopycatRule>(std::move(other), delay));
}

}  // namespace ivr
