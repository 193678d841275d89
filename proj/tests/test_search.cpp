#include "doctest.h"

#include "ivr/search.hpp"
#include "oracles.hpp"

using namespace ivr;

namespace {
BinaryString bs(const char* s) { return BinaryString::from_text(s); }
}  // namespace

TEST_CASE("least_value_extension: serial, parallel and brute force agree") {
  oracle::Rng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    MartingaleTable t = oracle::random_valid_table(rng, 9, 6, 2);
    MartingaleView m = limit(t);
    BinaryString base;
    size_t blen = rng.below(3);
    for (size_t i = 0; i < blen; ++i) base.push_back(static_cast<int>(rng.below(2)));
    size_t len = blen + 4 + rng.below(5);
    Int bound = *m.value(base) - static_cast<long>(rng.below(3));
    auto serial = search::least_value_extension_serial(m, base, len, bound);
    auto parallel = search::least_value_extension_parallel(m, base, len, bound);
    CHECK(serial == parallel);
    // brute force: first string in lex order meeting the bound
    std::optional<BinaryString> brute;
    for (const auto& tau : oracle::all_strings(base, len)) {
      auto v = m.value(tau);
      if (v && *v <= bound) {
        brute = tau;
        break;
      }
    }
    CHECK(serial == brute);
  }
}

TEST_CASE("least_value_extension crosses the parallel-dispatch threshold") {
  MartingaleTable t = make_bet_on_bit(1, 1, 40);
  MartingaleView m = limit(t);
  // gap 18 >= the internal parallel threshold; bound forces a right-ish path
  auto got = search::least_value_extension(m, BinaryString(), 18, Int(40));
  auto serial = search::least_value_extension_serial(m, BinaryString(), 18, Int(40));
  REQUIRE(got.has_value());
  CHECK(got == serial);
}

TEST_CASE("maximin kernels agree with the brute oracle") {
  oracle::Rng rng(32);
  for (int trial = 0; trial < 80; ++trial) {
    size_t base_len = rng.below(3);
    BinaryString base;
    for (size_t i = 0; i < base_len; ++i) base.push_back(static_cast<int>(rng.below(2)));
    size_t len = base_len + 3 + rng.below(6);
    std::vector<BinaryString> forbidden;
    size_t nf = rng.below(6);
    for (size_t i = 0; i < nf; ++i) {
      BinaryString mu;
      for (size_t j = 0; j < len; ++j) mu.push_back(static_cast<int>(rng.below(2)));
      forbidden.push_back(mu);
    }
    StringSet visited;
    size_t nv = rng.below(10);
    for (size_t i = 0; i < nv; ++i) {
      BinaryString v = base;
      for (size_t j = base_len; j < len; ++j) v.push_back(static_cast<int>(rng.below(2)));
      visited.insert(v);
    }
    bool exclude = rng.below(2) == 1;
    auto serial = search::maximin_enumerate_serial(forbidden, base, len, visited, exclude);
    auto parallel = search::maximin_enumerate_parallel(forbidden, base, len, visited, exclude);
    auto pruned = search::maximin_pruned(forbidden, base, len, visited, exclude);
    auto brute = oracle::brute_maximin(forbidden, base, len, visited, exclude);
    REQUIRE(serial.has_value() == brute.has_value());
    if (serial) {
      CHECK(serial->choice == brute->first);
      CHECK(serial->min_distance == brute->second);
      REQUIRE(parallel.has_value());
      CHECK(parallel->choice == brute->first);
      REQUIRE(pruned.has_value());
      CHECK(pruned->choice == brute->first);
      CHECK(pruned->min_distance == brute->second);
    }
  }
}

TEST_CASE("maximin pruned handles gaps far beyond enumeration") {
  std::vector<BinaryString> forbidden;
  BinaryString mu = BinaryString::ones(120);
  forbidden.push_back(mu);
  StringSet visited;
  auto out = search::maximin_pruned(forbidden, bs("1"), 120, visited, false);
  REQUIRE(out.has_value());
  // escape at depth 1: candidate 10^119, distance 119
  CHECK(out->min_distance == 119);
  CHECK(out->choice.bit(0) == 1);
  CHECK(out->choice.bit(1) == 0);
}

TEST_CASE("maximin respects the visited exclusion") {
  std::vector<BinaryString> forbidden;
  StringSet visited;
  visited.insert(bs("000"));
  auto out = search::maximin_pruned(forbidden, BinaryString(), 3, visited, true);
  REQUIRE(out.has_value());
  CHECK(out->choice == bs("001"));
  // whole cone visited -> nothing eligible
  StringSet all;
  for (const auto& s : oracle::all_strings(bs("0"), 3)) all.insert(s);
  CHECK_FALSE(search::maximin_pruned(forbidden, bs("0"), 3, all, true).has_value());
}

TEST_CASE("move-bound tables: serial, parallel and the literal mu-search agree") {
  auto serial = search::move_bound_table_serial(20000);
  auto parallel = search::move_bound_table_parallel(20000);
  REQUIRE(serial.size() == parallel.size());
  CHECK(serial == parallel);
  for (uint64_t k = 0; k <= 20000; ++k) {
    CHECK(serial[k] == oracle::brute_move_bound(k));
  }
  CHECK(serial[0] == 0);
  CHECK(serial[1] == 1);
  CHECK(serial[2] == 2);
  CHECK(serial[6] == 3);
}
