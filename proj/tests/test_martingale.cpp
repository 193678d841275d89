#include "doctest.h"

#include "ivr/martingale.hpp"
#include "oracles.hpp"

using namespace ivr;

namespace {
BinaryString bs(const char* s) { return BinaryString::from_text(s); }

// the stage-0 strategy of the injury construction: $2 staking $1 on bit 1
MartingaleTable ones_bettor(Int capital) { return make_bet_on_bit(1, 1, capital); }

MartingaleTable all_neutral(Int capital) {
  // constant_bet with a stake above the capital never bets
  return make_constant_bet(1, capital + 1, capital);
}
}  // namespace

TEST_CASE("evaluate along winning and losing paths") {
  MartingaleTable m = ones_bettor(2);
  CHECK(*limit(m).value(bs("1")) == 3);
  CHECK(*limit(m).value(bs("11")) == 4);
  CHECK(*limit(m).value(bs("0")) == 1);
}

TEST_CASE("all-neutral table keeps its capital everywhere") {
  MartingaleTable m = all_neutral(7);
  CHECK(*limit(m).value(bs("0101")) == 7);
  CHECK(*limit(m).value(BinaryString()) == 7);
  CHECK(*limit(m).max_value_along(bs("001101")) == 7);
}

TEST_CASE("evaluate distinguishes undefined from invalid") {
  MartingaleTable t(Int(5));
  t.declare(bs("1"), Int(2), 0);  // orphan on purpose: lambda unwagered
  CHECK_FALSE(limit(t).value(bs("10")).has_value());
  CHECK_FALSE(limit(t).defined(bs("11")));
  CHECK(limit(t).value(bs("1")).has_value() == false);  // lambda unwagered
  CHECK(*limit(t).value(BinaryString()) == 5);
}

TEST_CASE("validate flags the spec's example violations") {
  MartingaleTable good = ones_bettor(2);
  CHECK(validate(limit(good), ValueConstraint::integer(), 8).valid());

  MartingaleTable bad(Int(1));
  bad.declare(BinaryString(), Int(2), 0);
  auto rep = validate(limit(bad), ValueConstraint::integer(), 4);
  REQUIRE_FALSE(rep.valid());
  bool saw_negative = false, saw_exceeds = false;
  for (const auto& v : rep.violations) {
    saw_negative |= v.kind == Violation::Kind::NegativeValue;
    saw_exceeds |= v.kind == Violation::Kind::StakeExceedsCapital;
  }
  CHECK(saw_negative);
  CHECK(saw_exceeds);

  MartingaleTable f(Int(10));
  f.declare(BinaryString(), Int(2), 0);
  auto frep = validate(limit(f), ValueConstraint::f_valued({Int(0), Int(1)}), 4);
  REQUIRE_FALSE(frep.valid());
  CHECK(frep.violations[0].kind == Violation::Kind::StakeOutsideConstraint);

  auto srep = validate(limit(f), ValueConstraint::single(Int(2)), 4);
  CHECK(srep.valid());
}

TEST_CASE("validate flags orphan wagers (non-downward-closed domain)") {
  MartingaleTable t(Int(3));
  t.declare(bs("01"), Int(1), 0);
  auto rep = validate(limit(t), ValueConstraint::integer(), 4);
  REQUIRE_FALSE(rep.valid());
  CHECK(rep.violations[0].kind == Violation::Kind::OrphanWager);
}

TEST_CASE("fairness identity holds by construction on random valid tables") {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    MartingaleTable t = oracle::random_valid_table(rng, 6, 8, 3);
    MartingaleView m = limit(t);
    for (const auto& [node, entry] : t.entries()) {
      Int parent = *m.value(node);
      Int left = *m.value(node.child(0));
      Int right = *m.value(node.child(1));
      CHECK(left + right == 2 * parent);
      CHECK(parent >= 0);
      // Kolmogorov-style child bound
      CHECK(std::min(left, right) <= parent);
      CHECK(parent <= std::max(left, right));
    }
  }
}

TEST_CASE("capital bound: value <= 2^len * initial capital") {
  oracle::Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    MartingaleTable t = oracle::random_valid_table(rng, 7, 6, 6);
    MartingaleView m = limit(t);
    for (const auto& s : oracle::all_strings(BinaryString(), 7)) {
      Int bound = t.initial_capital();
      for (size_t i = 0; i < s.size(); ++i) bound *= 2;
      CHECK(*m.value(s) <= bound);
    }
  }
}

TEST_CASE("staged snapshots are monotone and downward closed") {
  oracle::Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    MartingaleTable t = oracle::random_staged_table(rng, 6, 6, 100, 25);
    for (Stage s = 0; s <= 100; s += 7) {
      MartingaleView early(t, s);
      MartingaleView later(t, s + 7);
      for (const auto& [node, entry] : t.entries()) {
        auto w_early = early.wager(node);
        if (w_early.has_value()) {
          // once defined, identical at all later stages
          REQUIRE(later.wager(node).has_value());
          CHECK(*later.wager(node) == *w_early);
        }
        // domains are downward closed at every stage
        if (early.defined(node) && !node.empty()) {
          CHECK(early.defined(node.prefix(node.size() - 1)));
        }
      }
    }
  }
}

TEST_CASE("total_to_length tracks per-depth completeness and stages") {
  MartingaleTable t(Int(4));
  t.declare(BinaryString(), Int(1), 3);
  t.declare(bs("0"), Int(0), 5);
  t.declare(bs("1"), Int(1), 4);
  CHECK(t.total_to_length(1, 3));
  CHECK_FALSE(t.total_to_length(2, 4));
  CHECK(t.total_to_length(2, 5));
  CHECK_FALSE(t.total_to_length(3, 100));
  CHECK(ones_bettor(3).total_to_length(40, 0));
}

TEST_CASE("doubling cap rule: capital sequence along 01 is 2,1,2") {
  // regenerated with the oracle replayer per the cap rule
  auto expected = oracle::replay_builtin("doubling", 1, 0, 2, "01");
  CHECK(expected == std::vector<long long>{2, 1, 2});
  MartingaleTable m = make_doubling(1, 2);
  MartingaleView v = limit(m);
  CHECK(*v.value(bs("0")) == 1);
  CHECK(*v.value(bs("01")) == 2);
}

TEST_CASE("doubling never goes negative and resets after wins") {
  oracle::Rng rng(24);
  MartingaleTable m = make_doubling(1, 5);
  MartingaleView v = limit(m);
  for (int trial = 0; trial < 60; ++trial) {
    std::string bits;
    for (int i = 0; i < 12; ++i) bits.push_back(rng.below(2) ? '1' : '0');
    auto expect = oracle::replay_builtin("doubling", 1, 0, 5, bits);
    BinaryString s;
    for (size_t i = 0; i < bits.size(); ++i) {
      s.push_back(bits[i] - '0');
      CHECK(*v.value(s) == Int(static_cast<long>(expect[i + 1])));
      CHECK(*v.value(s) >= 0);
    }
  }
}

TEST_CASE("bet_on_bit examples") {
  MartingaleTable m = make_bet_on_bit(1, 1, 10);
  CHECK(*limit(m).value(bs("11111")) == 15);
  CHECK(*limit(m).max_value_along(bs("11111")) == 15);
  // stakes cap at the capital left
  MartingaleTable small = make_bet_on_bit(1, 3, 2);
  CHECK(*limit(small).value(bs("0")) == 0);
  CHECK(*limit(small).value(bs("01")) == 0);
}

TEST_CASE("constant_bet goes neutral below its stake") {
  MartingaleTable m = make_constant_bet(1, 3, 2);
  MartingaleView v = limit(m);
  CHECK(*v.value(bs("0")) == 2);
  CHECK(*v.value(bs("111")) == 2);
}

TEST_CASE("max_capital_along matches the oracle on builtins") {
  MartingaleTable m = ones_bettor(2);
  CHECK(*limit(m).max_value_along(bs("111")) == 5);
  // doubling on bit 1, capital 2, along 0001 (frozen from the replayer)
  auto trace = oracle::replay_builtin("doubling", 1, 0, 2, "0001");
  long long best = 2;
  for (long long x : trace) best = std::max(best, x);
  CHECK(best == 2);
  MartingaleTable d = make_doubling(1, 2);
  CHECK(*limit(d).max_value_along(bs("0001")) == Int(static_cast<long>(best)));
}

TEST_CASE("copycat replays another table's wagers with a stage delay") {
  auto inner = std::make_shared<MartingaleTable>(Int(4));
  inner->declare(BinaryString(), Int(1), 2);
  inner->declare(bs("1"), Int(-2), 6);
  MartingaleTable cc = make_copycat(inner, 10);
  CHECK_FALSE(MartingaleView(cc, 11).wager(BinaryString()).has_value());
  CHECK(*MartingaleView(cc, 12).wager(BinaryString()) == 1);
  CHECK_FALSE(MartingaleView(cc, 12).wager(bs("1")).has_value());
  CHECK(*MartingaleView(cc, 16).wager(bs("1")) == -2);
  CHECK(*limit(cc).value(bs("10")) == 7);
  // copycat of a rule-backed total strategy stays total, shifted
  auto rule = std::make_shared<MartingaleTable>(make_bet_on_bit(1, 1, 3));
  MartingaleTable cc2 = make_copycat(rule, 5);
  CHECK_FALSE(cc2.total_to_length(4, 4));
  CHECK(cc2.total_to_length(4, 5));
}

TEST_CASE("validity closure: a clean validate means evaluate stays safe") {
  oracle::Rng rng(25);
  for (int trial = 0; trial < 30; ++trial) {
    MartingaleTable t = oracle::random_valid_table(rng, 6, 5, 2);
    REQUIRE(validate(limit(t), ValueConstraint::integer(), 6).valid());
    for (const auto& s : oracle::all_strings(BinaryString(), 6)) {
      auto v = limit(t).value(s);
      REQUIRE(v.has_value());
      CHECK(*v >= 0);
    }
  }
}
